#include <hfvdd/mesh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace hfvdd {
namespace {

// Shoelace sums are anchored at the first loop vertex: rounding then scales
// with the cell size instead of the absolute coordinates, which matters for
// fine meshes far from the origin.
Real shoelace_area(const std::vector<Vec2>& v, const std::vector<int>& loop) {
  const Vec2& o = v[loop[0]];
  Real a = 0.0;
  for (size_t i = 0; i < loop.size(); ++i) {
    Vec2 p = v[loop[i]] - o;
    Vec2 q = v[loop[(i + 1) % loop.size()]] - o;
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& v, const std::vector<int>& loop,
                      Real area) {
  const Vec2& o = v[loop[0]];
  Vec2 c = Vec2::Zero();
  for (size_t i = 0; i < loop.size(); ++i) {
    Vec2 p = v[loop[i]] - o;
    Vec2 q = v[loop[(i + 1) % loop.size()]] - o;
    Real w = p.x() * q.y() - q.x() * p.y();
    c += w * (p + q);
  }
  return o + c / (6.0 * area);
}

Real loop_diameter(const std::vector<Vec2>& v, const std::vector<int>& loop) {
  Real diam = 0.0;
  for (size_t i = 0; i < loop.size(); ++i)
    for (size_t j = i + 1; j < loop.size(); ++j)
      diam = std::max(diam, (v[loop[i]] - v[loop[j]]).norm());
  return diam;
}

void finish_bbox(Mesh& mesh) {
  Real x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Vec2& p : mesh.vertex) {
    x0 = std::min(x0, p.x());
    y0 = std::min(y0, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  }
  mesh.bbox = {x0, y0, x1, y1};
}

}  // namespace

const char* tag_name(FaceTag t) {
  switch (t) {
    case FaceTag::Dirichlet0:
      return "d0";
    case FaceTag::Dirichlet1:
      return "d1";
    case FaceTag::Neumann:
      return "neumann";
    case FaceTag::Interior:
      break;
  }
  return "interior";
}

Mesh from_polygons(std::vector<Vec2> vertices,
                   const std::vector<std::vector<int>>& loops,
                   const std::vector<Vec2>& centers) {
  if (!centers.empty() && centers.size() != loops.size())
    throw InvalidInput("from_polygons: centers must be empty or one per cell");
  Mesh mesh;
  mesh.vertex = std::move(vertices);

  std::map<std::pair<int, int>, int> face_of_edge;
  for (size_t K = 0; K < loops.size(); ++K) {
    std::vector<int> loop = loops[K];
    if (loop.size() < 3)
      throw InvalidInput("from_polygons: cell " + std::to_string(K) +
                         " has fewer than 3 vertices");
    for (int v : loop)
      if (v < 0 || v >= static_cast<int>(mesh.vertex.size()))
        throw InvalidInput("from_polygons: cell " + std::to_string(K) +
                           " references missing vertex " + std::to_string(v));
    Real area = shoelace_area(mesh.vertex, loop);
    if (area < 0.0) {
      std::reverse(loop.begin(), loop.end());
      area = -area;
    }
    if (!(area > 1e-300))
      throw InvalidInput("from_polygons: cell " + std::to_string(K) +
                         " has non-positive area");

    Cell cell;
    cell.first = static_cast<int>(mesh.cf_face.size());
    cell.count = static_cast<int>(loop.size());
    cell.measure = area;
    cell.center = centers.empty() ? polygon_centroid(mesh.vertex, loop, area)
                                  : centers[K];
    cell.diameter = loop_diameter(mesh.vertex, loop);

    for (size_t i = 0; i < loop.size(); ++i) {
      int a = loop[i], b = loop[(i + 1) % loop.size()];
      auto key = std::minmax(a, b);
      auto [it, inserted] = face_of_edge.try_emplace(key, mesh.n_faces());
      int fi = it->second;
      if (inserted) {
        Face f;
        f.v0 = a;
        f.v1 = b;
        f.center = 0.5 * (mesh.vertex[a] + mesh.vertex[b]);
        f.measure = (mesh.vertex[b] - mesh.vertex[a]).norm();
        f.cell0 = static_cast<int>(K);
        mesh.face.push_back(f);
      } else {
        Face& f = mesh.face[fi];
        if (f.cell1 >= 0)
          throw InvalidInput("from_polygons: face " + std::to_string(fi) +
                             " bounds more than two cells");
        f.cell1 = static_cast<int>(K);
      }
      mesh.cf_face.push_back(fi);
      mesh.loop_vertex.push_back(a);
      Vec2 e = mesh.vertex[b] - mesh.vertex[a];
      Vec2 n(e.y(), -e.x());  // outward for a counterclockwise loop
      n.normalize();
      mesh.cf_normal.push_back(n);
      Real d = (mesh.face[fi].center - cell.center).dot(n);
      mesh.cf_d.push_back(d);
      mesh.cf_pyr.push_back(0.5 * mesh.face[fi].measure * d);
    }
    mesh.cell.push_back(cell);
  }

  for (Face& f : mesh.face)
    if (f.cell1 < 0) f.tag = FaceTag::Neumann;
  finish_bbox(mesh);
  return mesh;
}

Mesh from_face_lists(std::vector<Vec2> vertices,
                     const std::vector<std::array<int, 2>>& face_vertices,
                     const std::vector<FaceTag>& face_tags,
                     const std::vector<std::vector<int>>& cell_faces,
                     const std::vector<std::pair<bool, Vec2>>& centers) {
  Mesh mesh;
  mesh.vertex = std::move(vertices);
  int nv = static_cast<int>(mesh.vertex.size());
  for (size_t fi = 0; fi < face_vertices.size(); ++fi) {
    auto [a, b] = face_vertices[fi];
    if (a < 0 || b < 0 || a >= nv || b >= nv || a == b)
      throw InvalidInput("mesh: face " + std::to_string(fi) +
                         " has invalid endpoints");
    Face f;
    f.v0 = a;
    f.v1 = b;
    f.center = 0.5 * (mesh.vertex[a] + mesh.vertex[b]);
    f.measure = (mesh.vertex[b] - mesh.vertex[a]).norm();
    if (!(f.measure > 0.0))
      throw InvalidInput("mesh: face " + std::to_string(fi) +
                         " has zero measure");
    mesh.face.push_back(f);
  }

  for (size_t K = 0; K < cell_faces.size(); ++K) {
    const std::vector<int>& fl = cell_faces[K];
    if (fl.size() < 3)
      throw InvalidInput("mesh: cell " + std::to_string(K) +
                         " lists fewer than 3 faces");
    std::vector<int> counted(fl.begin(), fl.end());
    std::sort(counted.begin(), counted.end());
    if (std::adjacent_find(counted.begin(), counted.end()) != counted.end())
      throw InvalidInput("mesh: cell " + std::to_string(K) +
                         " lists a face twice");
    // Chain the cell's faces into a closed vertex loop.
    std::map<int, std::vector<int>> at_vertex;
    for (int fi : fl) {
      if (fi < 0 || fi >= mesh.n_faces())
        throw InvalidInput("mesh: cell " + std::to_string(K) +
                           " references missing face " + std::to_string(fi));
      at_vertex[mesh.face[fi].v0].push_back(fi);
      at_vertex[mesh.face[fi].v1].push_back(fi);
    }
    for (auto& [v, fs] : at_vertex)
      if (fs.size() != 2)
        throw InvalidInput("mesh: cell " + std::to_string(K) +
                           " faces do not close a simple loop at vertex " +
                           std::to_string(v));
    std::vector<int> loop;
    int cur_face = fl[0];
    int v = mesh.face[cur_face].v0;
    const int start = v;
    for (size_t step = 0; step < fl.size(); ++step) {
      loop.push_back(v);
      const Face& f = mesh.face[cur_face];
      v = (f.v0 == v) ? f.v1 : f.v0;
      const std::vector<int>& fs = at_vertex[v];
      cur_face = (fs[0] == cur_face) ? fs[1] : fs[0];
    }
    if (v != start)
      throw InvalidInput("mesh: cell " + std::to_string(K) +
                         " faces do not form a single closed loop");

    Real area = shoelace_area(mesh.vertex, loop);
    bool ccw = area > 0.0;
    if (!ccw) area = -area;
    if (!(area > 1e-300))
      throw InvalidInput("mesh: cell " + std::to_string(K) +
                         " has non-positive area");

    Cell cell;
    cell.first = static_cast<int>(mesh.cf_face.size());
    cell.count = static_cast<int>(fl.size());
    cell.measure = area;
    cell.center = (K < centers.size() && centers[K].first)
                      ? centers[K].second
                      : polygon_centroid(mesh.vertex, loop,
                                         ccw ? area : -area);
    cell.diameter = loop_diameter(mesh.vertex, loop);

    // Orientation of each face as traversed by the counterclockwise loop.
    std::map<std::pair<int, int>, bool> forward;  // (a,b) -> a precedes b
    for (size_t i = 0; i < loop.size(); ++i) {
      int a = loop[i], b = loop[(i + 1) % loop.size()];
      forward[std::minmax(a, b)] = ccw ? (a < b) : (b < a);
    }
    for (int fi : fl) {
      Face& f = mesh.face[fi];
      if (f.cell0 < 0)
        f.cell0 = static_cast<int>(K);
      else if (f.cell1 < 0)
        f.cell1 = static_cast<int>(K);
      else
        throw InvalidInput("mesh: face " + std::to_string(fi) +
                           " bounds more than two cells");
      int a = std::min(f.v0, f.v1), b = std::max(f.v0, f.v1);
      bool fwd = forward.at({a, b});  // true: loop goes a -> b
      Vec2 e = mesh.vertex[b] - mesh.vertex[a];
      if (!fwd) e = -e;
      Vec2 n(e.y(), -e.x());
      n.normalize();
      mesh.cf_face.push_back(fi);
      mesh.cf_normal.push_back(n);
      Real d = (f.center - cell.center).dot(n);
      mesh.cf_d.push_back(d);
      mesh.cf_pyr.push_back(0.5 * f.measure * d);
      mesh.loop_vertex.push_back(-1);  // filled below
    }
    // Store the loop (shared CSR offsets with cf arrays).
    std::vector<int> ccw_loop = loop;
    if (!ccw) std::reverse(ccw_loop.begin(), ccw_loop.end());
    for (int j = 0; j < cell.count; ++j)
      mesh.loop_vertex[cell.first + j] = ccw_loop[j];
    mesh.cell.push_back(cell);
  }

  for (size_t fi = 0; fi < mesh.face.size(); ++fi) {
    Face& f = mesh.face[fi];
    if (f.cell0 < 0)
      throw InvalidInput("mesh: face " + std::to_string(fi) +
                         " belongs to no cell");
    if (f.cell1 < 0) {
      f.tag = (fi < face_tags.size() && face_tags[fi] != FaceTag::Interior)
                  ? face_tags[fi]
                  : FaceTag::Neumann;
    } else if (fi < face_tags.size() && face_tags[fi] != FaceTag::Interior) {
      throw InvalidInput("mesh: interior face " + std::to_string(fi) +
                         " carries a boundary tag");
    }
  }
  finish_bbox(mesh);
  return mesh;
}

Mesh build_cartesian(int nx, int ny, Rect dom, BoundaryLayout layout) {
  if (nx < 1 || ny < 1) throw InvalidInput("build_cartesian: need nx, ny >= 1");
  std::vector<Vec2> verts;
  verts.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.emplace_back(dom.x0 + dom.width() * i / nx,
                         dom.y0 + dom.height() * j / ny);
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::vector<int>> loops;
  loops.reserve(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      loops.push_back(
          {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  Mesh mesh = from_polygons(std::move(verts), loops);
  apply_boundary_layout(mesh, layout);
  validate(mesh);
  return mesh;
}

Mesh build_triangular(int level, Rect dom, BoundaryLayout layout) {
  if (level < 0 || level > 8)
    throw InvalidInput("build_triangular: level must lie in [0,8]");
  int nx = 7 << level, ny = 4 << level;
  std::vector<Vec2> verts;
  verts.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.emplace_back(dom.x0 + dom.width() * i / nx,
                         dom.y0 + dom.height() * j / ny);
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::vector<int>> loops;
  loops.reserve(2 * static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      loops.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  Mesh mesh = from_polygons(std::move(verts), loops);
  apply_boundary_layout(mesh, layout);
  validate(mesh);
  return mesh;
}

Mesh build_hexagonal(int nx, int ny, Rect dom, Real tilt,
                     BoundaryLayout layout) {
  if (nx < 2 || ny < 2) throw InvalidInput("build_hexagonal: need nx, ny >= 2");
  if (!(std::abs(tilt) < 0.45))
    throw InvalidInput("build_hexagonal: |tilt| must stay below 0.45");

  // Vertex at half-grid column k (0..2nx) on horizontal line i (0..ny);
  // interior mid-edge vertices are displaced by +-tilt row heights.
  std::map<std::pair<int, int>, int> vid;
  std::vector<Vec2> verts;
  auto vertex_at = [&](int k, int i) {
    auto [it, inserted] =
        vid.try_emplace({k, i}, static_cast<int>(verts.size()));
    if (inserted) {
      Real shift = 0.0;
      if (i > 0 && i < ny && k > 0 && k < 2 * nx)
        shift = ((k + i) % 2 ? tilt : -tilt);
      verts.emplace_back(dom.x0 + dom.width() * k / (2.0 * nx),
                         dom.y0 + dom.height() * (i + shift) / ny);
    }
    return it->second;
  };

  // One brick spanning half-grid columns [klo, khi] in row r; horizontal
  // edges are split at every intermediate column when the line is interior.
  auto make_brick = [&](int klo, int khi, int r) {
    std::vector<int> loop;
    loop.push_back(vertex_at(klo, r));
    for (int k = klo + 1; k <= khi; ++k)
      if (k == khi || r > 0) loop.push_back(vertex_at(k, r));
    loop.push_back(vertex_at(khi, r + 1));
    for (int k = khi - 1; k >= klo; --k)
      if (k == klo || r + 1 < ny) loop.push_back(vertex_at(k, r + 1));
    return loop;
  };

  std::vector<std::vector<int>> loops;
  for (int r = 0; r < ny; ++r) {
    if (r % 2 == 0) {
      for (int j = 0; j < nx; ++j) loops.push_back(make_brick(2 * j, 2 * j + 2, r));
    } else {
      for (int j = 0; j <= nx; ++j)
        loops.push_back(
            make_brick(std::max(0, 2 * j - 1), std::min(2 * nx, 2 * j + 1), r));
    }
  }
  Mesh mesh = from_polygons(std::move(verts), loops);
  apply_boundary_layout(mesh, layout);
  validate(mesh);
  return mesh;
}

void apply_boundary_layout(Mesh& mesh, BoundaryLayout layout,
                           Real contact_fraction) {
  Real eps = 1e-9 * std::max(mesh.bbox.width(), mesh.bbox.height());
  for (Face& f : mesh.face) {
    if (f.cell1 >= 0) {
      f.tag = FaceTag::Interior;
      continue;
    }
    if (layout == BoundaryLayout::AllDirichlet) {
      f.tag = FaceTag::Dirichlet0;
      continue;
    }
    if (f.center.y() <= mesh.bbox.y0 + eps)
      f.tag = FaceTag::Dirichlet0;
    else if (f.center.y() >= mesh.bbox.y1 - eps &&
             f.center.x() <=
                 mesh.bbox.x0 + contact_fraction * mesh.bbox.width() + eps)
      f.tag = FaceTag::Dirichlet1;
    else
      f.tag = FaceTag::Neumann;
  }
}

void validate(const Mesh& mesh) {
  if (mesh.cell.empty()) throw InvalidInput("mesh: no cells");
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face[fi];
    if (!(f.measure > 0.0))
      throw InvalidInput("mesh: face " + std::to_string(fi) +
                         " has zero measure");
    if (f.cell1 < 0 && f.tag == FaceTag::Interior)
      throw InvalidInput("mesh: boundary face " + std::to_string(fi) +
                         " left untagged");
    if (f.cell1 >= 0 && f.tag != FaceTag::Interior)
      throw InvalidInput("mesh: interior face " + std::to_string(fi) +
                         " carries a boundary tag");
  }
  std::vector<Vec2> normal_sum(mesh.n_faces(), Vec2::Zero());
  std::vector<int> touch(mesh.n_faces(), 0);
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Cell& c = mesh.cell[K];
    Vec2 closure = Vec2::Zero();
    Real pyr_sum = 0.0;
    for (int j = 0; j < c.count; ++j) {
      int cf = c.first + j;
      int fi = mesh.cf_face[cf];
      const Face& f = mesh.face[fi];
      if (!(mesh.cf_d[cf] > 0.0))
        throw InvalidInput("mesh: cell " + std::to_string(K) +
                           " is not star-shaped with respect to its center "
                           "(face " +
                           std::to_string(fi) + ")");
      closure += f.measure * mesh.cf_normal[cf];
      pyr_sum += mesh.cf_pyr[cf];
      normal_sum[fi] += mesh.cf_normal[cf];
      ++touch[fi];
    }
    if (closure.norm() > 1e-12 * c.diameter)
      throw InvalidInput("mesh: cell " + std::to_string(K) +
                         " violates the normal closure identity");
    // The pyramid heights subtract absolute face/cell centers, so their
    // rounding floor follows the coordinate magnitude, not the cell measure.
    Real coord = std::max({std::abs(mesh.bbox.x0), std::abs(mesh.bbox.x1),
                           std::abs(mesh.bbox.y0), std::abs(mesh.bbox.y1)});
    Real part_tol = 1e-12 * c.measure +
                    32.0 * std::numeric_limits<Real>::epsilon() * coord *
                        c.diameter;
    if (std::abs(pyr_sum - c.measure) > part_tol)
      throw InvalidInput("mesh: cell " + std::to_string(K) +
                         " pyramid measures do not partition the cell");
  }
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face[fi];
    int expected = f.cell1 >= 0 ? 2 : 1;
    if (touch[fi] != expected)
      throw InvalidInput("mesh: face " + std::to_string(fi) +
                         " incidence does not match its cells");
    if (expected == 2 && normal_sum[fi].norm() > 1e-12)
      throw InvalidInput("mesh: interior face " + std::to_string(fi) +
                         " normals are not opposite");
  }
}

std::string RegularityReport::summary() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "cells %d, faces %d (dirichlet %d, neumann %d)\n"
                "h_max %.6g, theta %.6g (h/d %.6g, h/|face| %.6g), "
                "worst cell %d\n"
                "min d %.6g, min face measure %.6g",
                n_cells, n_faces, n_dirichlet, n_neumann, h_max, theta,
                max_h_over_d, max_h_over_face, worst_cell, min_d,
                min_face_measure);
  return buf;
}

RegularityReport regularity(const Mesh& mesh) {
  RegularityReport r;
  r.n_cells = mesh.n_cells();
  r.n_faces = mesh.n_faces();
  for (const Face& f : mesh.face) {
    if (is_dirichlet(f.tag)) ++r.n_dirichlet;
    if (f.tag == FaceTag::Neumann) ++r.n_neumann;
  }
  r.min_d = std::numeric_limits<Real>::infinity();
  r.min_face_measure = std::numeric_limits<Real>::infinity();
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Cell& c = mesh.cell[K];
    r.h_max = std::max(r.h_max, c.diameter);
    for (int j = 0; j < c.count; ++j) {
      int cf = c.first + j;
      const Face& f = mesh.face[mesh.cf_face[cf]];
      Real rd = c.diameter / mesh.cf_d[cf];
      Real rf = c.diameter / f.measure;
      if (std::max(rd, rf) > r.theta) {
        r.theta = std::max(rd, rf);
        r.worst_cell = K;
      }
      r.max_h_over_d = std::max(r.max_h_over_d, rd);
      r.max_h_over_face = std::max(r.max_h_over_face, rf);
      r.min_d = std::min(r.min_d, mesh.cf_d[cf]);
      r.min_face_measure = std::min(r.min_face_measure, f.measure);
    }
  }
  return r;
}

}  // namespace hfvdd
