#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hfvdd/mesh.hpp>
#include <hfvdd/mesh_io.hpp>
#include <hfvdd/types.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hfvdd;

namespace {

// Structural identities every valid mesh satisfies, checked directly from
// the raw incidence arrays rather than through validate().
void check_invariants(const Mesh& mesh) {
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const Cell& c = mesh.cell[K];
    REQUIRE(c.measure > 0.0);
    REQUIRE(c.diameter > 0.0);
    Vec2 closure = Vec2::Zero();
    Real pyr_sum = 0.0;
    for (int j = 0; j < c.count; ++j) {
      int cf = mesh.cf_index(K, j);
      int fi = mesh.cf_face[cf];
      const Face& f = mesh.face[fi];
      CHECK(mesh.cf_d[cf] > 0.0);
      CHECK(mesh.cf_normal[cf].norm() == doctest::Approx(1.0).epsilon(1e-13));
      // d_{K,sigma} is the normal distance from the center to the face line.
      CHECK(std::abs((f.center - c.center).dot(mesh.cf_normal[cf]) -
                     mesh.cf_d[cf]) < 1e-13 * c.diameter);
      CHECK(std::abs(mesh.cf_pyr[cf] - 0.5 * f.measure * mesh.cf_d[cf]) <
            1e-13 * c.measure);
      closure += f.measure * mesh.cf_normal[cf];
      pyr_sum += mesh.cf_pyr[cf];
    }
    CHECK(closure.norm() <= 1e-12 * c.diameter);
    CHECK(std::abs(pyr_sum - c.measure) <= 1e-12 * c.measure);
  }
  // Interior faces are seen by exactly their two cells, with opposite
  // normals; boundary faces carry a non-interior tag.
  std::vector<Vec2> normal_sum(mesh.n_faces(), Vec2::Zero());
  std::vector<int> touch(mesh.n_faces(), 0);
  for (int K = 0; K < mesh.n_cells(); ++K)
    for (int j = 0; j < mesh.cell[K].count; ++j) {
      int cf = mesh.cf_index(K, j);
      normal_sum[mesh.cf_face[cf]] += mesh.cf_normal[cf];
      ++touch[mesh.cf_face[cf]];
    }
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face[fi];
    if (f.cell1 >= 0) {
      CHECK(touch[fi] == 2);
      CHECK(normal_sum[fi].norm() <= 1e-12);
      CHECK(f.tag == FaceTag::Interior);
    } else {
      CHECK(touch[fi] == 1);
      CHECK(f.tag != FaceTag::Interior);
    }
  }
  CHECK_NOTHROW(validate(mesh));
}

// 2x2 quadrilateral mesh with the shared interior vertex pushed off-center,
// so no cell is a rectangle.
Mesh jittered_quads() {
  std::vector<Vec2> v = {{0.0, 0.0},  {0.5, 0.0},   {1.0, 0.0},
                         {0.0, 0.5},  {0.55, 0.45}, {1.0, 0.5},
                         {0.0, 1.0},  {0.5, 1.0},   {1.0, 1.0}};
  std::vector<std::vector<int>> loops = {
      {0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}};
  return from_polygons(std::move(v), loops);
}

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

}  // namespace

TEST_CASE("unit square cell geometry") {
  Mesh m = build_cartesian(1, 1);
  REQUIRE(m.n_cells() == 1);
  REQUIRE(m.n_faces() == 4);
  const Cell& c = m.cell[0];
  CHECK(c.measure == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.center.x() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.center.y() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  for (int j = 0; j < 4; ++j) {
    int cf = m.cf_index(0, j);
    CHECK(m.face[m.cf_face[cf]].measure == doctest::Approx(1.0));
    CHECK(m.cf_d[cf] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.cf_pyr[cf] == doctest::Approx(0.25).epsilon(1e-15));
  }
  RegularityReport rep = regularity(m);
  CHECK(rep.theta ==
        doctest::Approx(2.8284271247461901).epsilon(1e-14));  // 2 sqrt(2)
  CHECK(rep.max_h_over_face == doctest::Approx(std::sqrt(2.0)));
  CHECK(rep.h_max == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cartesian grids scale as expected") {
  Mesh m = build_cartesian(8, 8);
  CHECK(m.n_cells() == 64);
  CHECK(m.n_faces() == 2 * 8 * 9);
  RegularityReport rep = regularity(m);
  CHECK(rep.h_max == doctest::Approx(std::sqrt(2.0) / 8.0).epsilon(1e-14));
  // Uniform squares: every refinement level has the same shape constant.
  CHECK(rep.theta == doctest::Approx(2.8284271247461901).epsilon(1e-13));

  Mesh wide = build_cartesian(2, 1, {0.0, 0.0, 2.0, 1.0});
  REQUIRE(wide.n_cells() == 2);
  CHECK(wide.cell[0].measure == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wide.cell[1].measure == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(wide.cell[0].center.x() == doctest::Approx(0.5));
  CHECK(wide.cell[1].center.x() == doctest::Approx(1.5));
  check_invariants(wide);
}

TEST_CASE("triangular refinement quadruples the cell count") {
  Mesh t0 = build_triangular(0);
  Mesh t1 = build_triangular(1);
  Mesh t2 = build_triangular(2);
  CHECK(t0.n_cells() == 56);
  CHECK(t1.n_cells() == 224);
  CHECK(t2.n_cells() == 896);
  // Self-similar refinement: the shape constant is level-independent.
  Real theta0 = regularity(t0).theta;
  CHECK(regularity(t1).theta == doctest::Approx(theta0).epsilon(1e-12));
  CHECK(regularity(t2).theta == doctest::Approx(theta0).epsilon(1e-12));
  Real area = 0.0;
  for (const Cell& c : t0.cell) area += c.measure;
  CHECK(area == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(build_triangular(-1), InvalidInput);
  CHECK_THROWS_AS(build_triangular(9), InvalidInput);
}

TEST_CASE("hexagonal brick wall has the documented cell count") {
  Mesh h = build_hexagonal(8, 9);
  CHECK(h.n_cells() == 76);
  RegularityReport rep = regularity(h);
  CHECK(std::isfinite(rep.theta));
  CHECK(rep.theta < 40.0);
  Real area = 0.0;
  for (const Cell& c : h.cell) area += c.measure;
  CHECK(area == doctest::Approx(1.0).epsilon(1e-13));
  check_invariants(h);

  Mesh h2 = build_hexagonal(16, 17);
  CHECK(h2.n_cells() == 280);
  check_invariants(h2);
  CHECK_THROWS_AS(build_hexagonal(1, 1), InvalidInput);
  CHECK_THROWS_AS(build_hexagonal(8, 9, {}, 0.5), InvalidInput);
}

TEST_CASE("structural invariants hold across mesh families") {
  check_invariants(build_cartesian(5, 3));
  check_invariants(build_triangular(1));
  check_invariants(build_hexagonal(8, 9));
  check_invariants(jittered_quads());
}

TEST_CASE("diode boundary layout partitions the boundary") {
  Mesh m = build_cartesian(8, 8, {}, BoundaryLayout::PnDiode);
  int d0 = 0, d1 = 0, neu = 0, interior = 0;
  for (const Face& f : m.face) {
    if (f.cell1 >= 0) {
      ++interior;
      CHECK(f.tag == FaceTag::Interior);
      continue;
    }
    if (f.tag == FaceTag::Dirichlet0) {
      ++d0;
      CHECK(f.center.y() == doctest::Approx(0.0));
    } else if (f.tag == FaceTag::Dirichlet1) {
      ++d1;
      CHECK(f.center.y() == doctest::Approx(1.0));
      CHECK(f.center.x() < 0.25);
    } else {
      CHECK(f.tag == FaceTag::Neumann);
      ++neu;
    }
  }
  CHECK(d0 == 8);
  CHECK(d1 == 2);  // top-edge faces centred at 1/16 and 3/16
  CHECK(neu == 22);
  CHECK(d0 + d1 + neu + interior == m.n_faces());

  // Widening the contact pulls more top faces into the second contact.
  apply_boundary_layout(m, BoundaryLayout::PnDiode, 0.5);
  int d1_wide = 0;
  for (const Face& f : m.face)
    if (f.tag == FaceTag::Dirichlet1) ++d1_wide;
  CHECK(d1_wide == 4);
  check_invariants(m);
}

TEST_CASE("quadrature rules are exact for their degree") {
  Mesh m = build_cartesian(1, 1);
  // Affine integrand: the average is the value at the centroid.
  CHECK(cell_average(m, 0, [](Vec2 x) { return 2.0 * x.x() + 3.0 * x.y(); }) ==
        doctest::Approx(2.5).epsilon(1e-14));
  // Degree-5 integrand over the unit square: mean of x^3 y^2 is 1/12.
  CHECK(cell_average(m, 0, [](Vec2 x) {
          return x.x() * x.x() * x.x() * x.y() * x.y();
        }) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  // Bottom edge, cubic integrand: mean of x^3 on [0,1] is 1/4.
  int bottom = -1;
  for (int fi = 0; fi < m.n_faces(); ++fi)
    if (m.face[fi].center.y() == 0.0) bottom = fi;
  REQUIRE(bottom >= 0);
  CHECK(face_average(m, bottom, [](Vec2 x) {
          return x.x() * x.x() * x.x();
        }) == doctest::Approx(0.25).epsilon(1e-14));
  // The composite cell rule integrates exactly on non-square cells too.
  Mesh j = jittered_quads();
  Real integral = 0.0;
  for (int K = 0; K < j.n_cells(); ++K)
    integral += j.cell[K].measure *
                cell_average(j, K, [](Vec2 x) { return x.x() * x.y(); });
  CHECK(integral == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("sliver cells are reported with a large shape constant") {
  Mesh thin = build_cartesian(1, 1, {0.0, 0.0, 1.0, 0.01});
  RegularityReport rep = regularity(thin);
  CHECK(rep.theta > 100.0);
  CHECK(rep.worst_cell == 0);
  CHECK(rep.summary().find("theta") != std::string::npos);
}

TEST_CASE("mesh file parsing matches the built-in builder") {
  const char* text =
      "# unit square\n"
      "polymesh 2d\n"
      "vertices\n"
      "0 0 0\n"
      "1 1 0\n"
      "2 1 1\n"
      "3 0 1\n"
      "faces\n"
      "0: 0 1 d0\n"
      "1: 1 2 neumann\n"
      "2: 2 3 d1\n"
      "3: 3 0 neumann\n"
      "cells\n"
      "0: 0 1 2 3\n";
  std::istringstream in(text);
  Mesh file = read_mesh(in);
  Mesh built = build_cartesian(1, 1);
  REQUIRE(file.n_cells() == 1);
  REQUIRE(file.n_faces() == 4);
  CHECK(file.cell[0].measure == doctest::Approx(built.cell[0].measure));
  CHECK(file.cell[0].center.x() == doctest::Approx(built.cell[0].center.x()));
  CHECK(file.cell[0].center.y() == doctest::Approx(built.cell[0].center.y()));
  CHECK(file.face[0].tag == FaceTag::Dirichlet0);
  CHECK(file.face[2].tag == FaceTag::Dirichlet1);
  check_invariants(file);
}

TEST_CASE("save and reload preserve the mesh") {
  Mesh orig = build_hexagonal(8, 9, {}, 0.2, BoundaryLayout::PnDiode);
  std::string path = temp_path("hfvdd_roundtrip.mesh");
  save_mesh(orig, path);
  Mesh back = load_mesh(path);
  std::remove(path.c_str());
  REQUIRE(back.n_cells() == orig.n_cells());
  REQUIRE(back.n_faces() == orig.n_faces());
  for (size_t i = 0; i < orig.vertex.size(); ++i)
    CHECK((back.vertex[i] - orig.vertex[i]).norm() == 0.0);
  for (int fi = 0; fi < orig.n_faces(); ++fi) {
    CHECK(back.face[fi].tag == orig.face[fi].tag);
    CHECK(back.face[fi].measure ==
          doctest::Approx(orig.face[fi].measure).epsilon(1e-15));
  }
  for (int K = 0; K < orig.n_cells(); ++K) {
    CHECK(back.cell[K].measure ==
          doctest::Approx(orig.cell[K].measure).epsilon(1e-14));
    CHECK((back.cell[K].center - orig.cell[K].center).norm() < 1e-14);
  }
  check_invariants(back);
}

TEST_CASE("builder specs and sources") {
  CHECK(build_from_spec("cart:4x3").n_cells() == 12);
  CHECK(build_from_spec("tri:1").n_cells() == 224);
  CHECK(build_from_spec("hex:8x9").n_cells() == 76);
  CHECK(build_from_spec("hex:8x9:0.1").n_cells() == 76);
  CHECK_THROWS_AS(build_from_spec("cart:4"), InvalidInput);
  CHECK_THROWS_AS(build_from_spec("tri:x"), InvalidInput);
  CHECK_THROWS_AS(build_from_spec("voronoi:3x3"), InvalidInput);
  CHECK(load_mesh_source("builder:cart:2x2").n_cells() == 4);
  CHECK_THROWS_AS(load_mesh_source("/nonexistent/path.mesh"), IoError);
}

TEST_CASE("invalid inputs are rejected with named reasons") {
  // Zero-length face.
  std::vector<Vec2> v = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_WITH_AS(
      from_face_lists(v, {{0, 0}, {1, 2}, {2, 3}, {3, 0}},
                      {FaceTag::Dirichlet0, FaceTag::Neumann,
                       FaceTag::Dirichlet0, FaceTag::Neumann},
                      {{0, 1, 2, 3}}),
      doctest::Contains("invalid endpoints"), InvalidInput);
  // Faces that do not chain into a loop.
  CHECK_THROWS_AS(from_face_lists(v, {{0, 1}, {1, 2}, {2, 3}, {3, 1}},
                                  {FaceTag::Dirichlet0, FaceTag::Neumann,
                                   FaceTag::Dirichlet0, FaceTag::Neumann},
                                  {{0, 1, 2, 3}}),
                  InvalidInput);
  // validate() catches corrupted incidence data by name.
  Mesh m = build_cartesian(2, 2);
  m.cf_d[0] = -m.cf_d[0];
  CHECK_THROWS_WITH_AS(validate(m), doctest::Contains("star-shaped"),
                       InvalidInput);
  Mesh m2 = build_cartesian(2, 2);
  m2.face[0].measure = 0.0;
  CHECK_THROWS_WITH_AS(validate(m2), doctest::Contains("zero measure"),
                       InvalidInput);
  Mesh m3 = build_cartesian(2, 2);
  m3.cf_normal[0] = -m3.cf_normal[0];
  CHECK_THROWS_AS(validate(m3), InvalidInput);
  // Untagged boundary face.
  Mesh m4 = build_cartesian(2, 2);
  m4.face[0].tag = FaceTag::Interior;
  bool boundary = m4.face[0].cell1 < 0;
  if (boundary) CHECK_THROWS_AS(validate(m4), InvalidInput);
}

TEST_CASE("regularity report counts tags") {
  Mesh m = build_cartesian(4, 4, {}, BoundaryLayout::PnDiode);
  RegularityReport rep = regularity(m);
  CHECK(rep.n_cells == 16);
  CHECK(rep.n_faces == 40);
  CHECK(rep.n_dirichlet == 5);  // 4 bottom + 1 top contact face
  CHECK(rep.n_neumann == 11);
  CHECK(rep.min_d == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(rep.min_face_measure == doctest::Approx(0.25).epsilon(1e-14));
}
