// General polygonal 2D meshes with the per-(cell,face) geometry the hybrid
// scheme needs: outward normals, orthogonal distances d_{K,sigma}, and the
// pyramid measures |P_{K,sigma}| = |sigma| d_{K,sigma} / 2 that partition
// each cell.
#pragma once

#include <hfvdd/types.hpp>

#include <array>
#include <span>
#include <vector>

namespace hfvdd {

enum class FaceTag { Interior, Dirichlet0, Dirichlet1, Neumann };

inline bool is_dirichlet(FaceTag t) {
  return t == FaceTag::Dirichlet0 || t == FaceTag::Dirichlet1;
}

// "interior" | "d0" | "d1" | "neumann".
const char* tag_name(FaceTag t);

struct Rect {
  Real x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  Real width() const { return x1 - x0; }
  Real height() const { return y1 - y0; }
};

// How boundary faces are tagged.  PnDiode: Dirichlet0 on the bottom edge,
// Dirichlet1 on the top edge where x <= x0 + contact_fraction * width,
// Neumann elsewhere.  AllDirichlet: every boundary face is Dirichlet0.
enum class BoundaryLayout { AllDirichlet, PnDiode };

struct Face {
  int v0 = -1, v1 = -1;
  Vec2 center = Vec2::Zero();
  Real measure = 0.0;
  int cell0 = -1, cell1 = -1;  // cell1 < 0 on the boundary
  FaceTag tag = FaceTag::Interior;
};

struct Cell {
  Vec2 center = Vec2::Zero();
  Real measure = 0.0;
  Real diameter = 0.0;
  int first = 0;  // offset into the cf_* arrays and the vertex loop
  int count = 0;  // number of faces (= number of loop vertices)
};

struct Mesh {
  std::vector<Vec2> vertex;
  std::vector<Face> face;
  std::vector<Cell> cell;

  // Per (cell,face) incidence in cell-local order, CSR layout of length
  // sum_K count(K).
  std::vector<int> cf_face;
  std::vector<Vec2> cf_normal;  // unit outward normal n_{K,sigma}
  std::vector<Real> cf_d;       // distance from x_K to the face line, > 0
  std::vector<Real> cf_pyr;     // |P_{K,sigma}|

  // Counterclockwise vertex loop of each cell, same CSR offsets.
  std::vector<int> loop_vertex;

  Rect bbox;

  int n_cells() const { return static_cast<int>(cell.size()); }
  int n_faces() const { return static_cast<int>(face.size()); }

  std::span<const int> faces_of(int K) const {
    return {cf_face.data() + cell[K].first, static_cast<size_t>(cell[K].count)};
  }
  std::span<const int> loop_of(int K) const {
    return {loop_vertex.data() + cell[K].first,
            static_cast<size_t>(cell[K].count)};
  }
  // Index into the cf_* arrays of local face `j` of cell K.
  int cf_index(int K, int j) const { return cell[K].first + j; }
};

// Builds a mesh from cell vertex loops; faces are derived from consecutive
// loop pairs and shared by index.  `centers` may be empty (centroids) or give
// one explicit point per cell.  Loops are reoriented counterclockwise.
Mesh from_polygons(std::vector<Vec2> vertices,
                   const std::vector<std::vector<int>>& loops,
                   const std::vector<Vec2>& centers = {});

// Builds a mesh from explicit faces (vertex pairs, optional boundary tags)
// and per-cell face lists, keeping each cell's face order as given.  Cell
// centers default to the centroid; `centers[K] = {true, point}` overrides.
Mesh from_face_lists(std::vector<Vec2> vertices,
                     const std::vector<std::array<int, 2>>& face_vertices,
                     const std::vector<FaceTag>& face_tags,
                     const std::vector<std::vector<int>>& cell_faces,
                     const std::vector<std::pair<bool, Vec2>>& centers = {});

// nx-by-ny axis-aligned rectangles.
Mesh build_cartesian(int nx, int ny, Rect domain = {},
                     BoundaryLayout layout = BoundaryLayout::AllDirichlet);

// Structured triangulation: level L is a (7 2^L)-by-(4 2^L) grid with each
// rectangle cut along its diagonal, hence 56 * 4^L triangles.
Mesh build_triangular(int level, Rect domain = {},
                      BoundaryLayout layout = BoundaryLayout::AllDirichlet);

// Brick-wall honeycomb: ny rows of bricks, alternate rows offset by half a
// brick, shared mid-edge vertices displaced vertically by `tilt` times the
// row height.  Interior cells are hexagons, boundary fill cells quads or
// pentagons; nx=8, ny=9 gives 76 cells.
Mesh build_hexagonal(int nx, int ny, Rect domain = {}, Real tilt = 0.2,
                     BoundaryLayout layout = BoundaryLayout::AllDirichlet);

// Retags boundary faces; contact_fraction is the x-extent of the second
// Dirichlet contact along the top edge (PN diode geometry).
void apply_boundary_layout(Mesh& mesh, BoundaryLayout layout,
                           Real contact_fraction = 0.25);

// Structural checks: positive measures and distances, pyramid partition,
// normal closure, interior-normal opposition.  Throws InvalidInput.
void validate(const Mesh& mesh);

struct RegularityReport {
  int n_cells = 0;
  int n_faces = 0;
  int n_dirichlet = 0;
  int n_neumann = 0;
  Real h_max = 0.0;            // largest cell diameter
  Real theta = 0.0;            // max of the two ratio families below
  Real max_h_over_d = 0.0;     // h_K / d_{K,sigma}
  Real max_h_over_face = 0.0;  // h_K / |sigma|  (2D)
  Real min_d = 0.0;
  Real min_face_measure = 0.0;
  int worst_cell = -1;  // attains theta
  std::string summary() const;
};

RegularityReport regularity(const Mesh& mesh);

// Average of f over cell K: degree-5 (7-point) triangle rule on each face
// pyramid.
template <class F>
Real cell_average(const Mesh& mesh, int K, F&& f) {
  static const Real sq15 = std::sqrt(15.0);
  static const Real wc = 9.0 / 40.0;
  static const Real a1 = (6.0 + sq15) / 21.0, w1 = (155.0 + sq15) / 1200.0;
  static const Real a2 = (6.0 - sq15) / 21.0, w2 = (155.0 - sq15) / 1200.0;
  const Cell& c = mesh.cell[K];
  Real integral = 0.0;
  for (int j = 0; j < c.count; ++j) {
    int cf = c.first + j;
    const Face& fc = mesh.face[mesh.cf_face[cf]];
    Vec2 p0 = mesh.vertex[fc.v0], p1 = mesh.vertex[fc.v1];
    Real area = mesh.cf_pyr[cf];
    auto at = [&](Real l0, Real l1, Real l2) {
      Vec2 x = l0 * c.center + l1 * p0 + l2 * p1;
      return f(x);
    };
    Real s = wc * at(1.0 / 3, 1.0 / 3, 1.0 / 3);
    s += w1 * (at(1 - 2 * a1, a1, a1) + at(a1, 1 - 2 * a1, a1) +
               at(a1, a1, 1 - 2 * a1));
    s += w2 * (at(1 - 2 * a2, a2, a2) + at(a2, 1 - 2 * a2, a2) +
               at(a2, a2, 1 - 2 * a2));
    integral += area * s;
  }
  return integral / c.measure;
}

// Average of f over face sigma: two-point Gauss on the segment.
template <class F>
Real face_average(const Mesh& mesh, int sigma, F&& f) {
  const Face& fc = mesh.face[sigma];
  Vec2 mid = fc.center;
  Vec2 half = 0.5 * (mesh.vertex[fc.v1] - mesh.vertex[fc.v0]);
  static const Real t = 1.0 / std::sqrt(3.0);
  return 0.5 * (f(Vec2(mid - t * half)) + f(Vec2(mid + t * half)));
}

}  // namespace hfvdd
