#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace latdist;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<std::size_t> face_sizes(const ConvexPolyhedron& p) {
  std::vector<std::size_t> sizes;
  for (const auto& f : p.faces) sizes.push_back(f.size());
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

} // namespace

TEST_CASE("cubic lattice yields the unit cube", "[voronoi]") {
  const auto cell = compute_voronoi_cell(testutil::cubic());
  REQUIRE(cell.vertices.size() == 8);
  REQUIRE(cell.faces.size() == 6);
  CHECK_THAT(polyhedron_volume(cell), WithinAbs(1.0, 1e-12));
  CHECK_THAT(inradius(cell), WithinAbs(0.5, 1e-12));
  for (const Vec3& v : cell.vertices) {
    CHECK_THAT(std::abs(v.x()), WithinAbs(0.5, 1e-12));
    CHECK_THAT(std::abs(v.y()), WithinAbs(0.5, 1e-12));
    CHECK_THAT(std::abs(v.z()), WithinAbs(0.5, 1e-12));
  }
  CHECK(euler_characteristic(cell) == 2);
}

TEST_CASE("BCC lattice yields the truncated octahedron", "[voronoi]") {
  const auto cell = compute_voronoi_cell(testutil::bcc());
  REQUIRE(cell.vertices.size() == 24);
  REQUIRE(cell.faces.size() == 14);
  const auto sizes = face_sizes(cell);
  CHECK(std::count(sizes.begin(), sizes.end(), 4) == 6);
  CHECK(std::count(sizes.begin(), sizes.end(), 6) == 8);
  CHECK_THAT(polyhedron_volume(cell), WithinAbs(0.5, 1e-12));
  CHECK_THAT(inradius(cell), WithinAbs(std::sqrt(3.0) / 4, 1e-12));
  CHECK(euler_characteristic(cell) == 2);
}

TEST_CASE("FCC lattice yields the rhombic dodecahedron", "[voronoi]") {
  const auto cell = compute_voronoi_cell(testutil::fcc());
  REQUIRE(cell.vertices.size() == 14);
  REQUIRE(cell.faces.size() == 12);
  const auto sizes = face_sizes(cell);
  CHECK(std::count(sizes.begin(), sizes.end(), 4) == 12);
  CHECK_THAT(polyhedron_volume(cell), WithinAbs(0.25, 1e-12));
  CHECK_THAT(inradius(cell), WithinAbs(std::sqrt(2.0) / 4, 1e-12));
  CHECK(euler_characteristic(cell) == 2);
}

TEST_CASE("cells agree with the plane-triple intersection oracle",
          "[voronoi]") {
  std::mt19937 rng(23);
  std::vector<LatticeBasis> bases = {testutil::cubic(), testutil::bcc(),
                                     testutil::fcc()};
  for (int t = 0; t < 6; ++t) bases.push_back(testutil::random_basis(rng));
  for (const auto& b : bases) {
    const auto cell = compute_voronoi_cell(b);
    const auto ref = oracle::voronoi_cell_by_triples(b);
    INFO("vertices " << cell.vertices.size() << " vs oracle "
                     << ref.vertices.size());
    CHECK(testutil::same_vertex_set(cell.vertices, ref.vertices, 1e-6));
    CHECK(cell.faces.size() == ref.face_count);
    CHECK_THAT(polyhedron_volume(cell), WithinRel(ref.volume, 1e-9));
  }
}

TEST_CASE("validate_cell accepts true cells and rejects impostors",
          "[voronoi]") {
  const auto cubic_cell = compute_voronoi_cell(testutil::cubic());
  CHECK(validate_cell(cubic_cell, testutil::cubic()));
  CHECK_FALSE(validate_cell(cubic_cell, testutil::bcc()));

  // heavily sheared basis: an extent-1 shell without reduction is not enough
  const LatticeBasis sheared({1, 0, 0}, {5, 1, 0}, {0, 0, 1});
  const auto bad = clip_voronoi_cell(sheared, 1);
  CHECK_FALSE(validate_cell(bad, sheared, 1));
  const auto good = clip_voronoi_cell(reduce_basis(sheared), 3);
  CHECK(validate_cell(good, sheared, 3));
  CHECK_THAT(polyhedron_volume(good), WithinRel(unit_cell_volume(sheared), 1e-9));
}

TEST_CASE("random cells satisfy the geometric invariants", "[voronoi]") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = testutil::random_basis(rng);
    const auto cell = compute_voronoi_cell(b);

    CHECK(cell.vertices.size() <= 24);
    CHECK(cell.faces.size() <= 14);
    CHECK_THAT(polyhedron_volume(cell), WithinRel(unit_cell_volume(b), 1e-6));
    CHECK(euler_characteristic(cell) == 2);

    const double sym_tol = 1e-9 * 2.0 * cell.circumradius();
    CHECK(is_centrally_symmetric(cell, sym_tol));

    // convexity: every vertex satisfies every face inequality
    for (const auto& hs : cell.face_planes) {
      CHECK(hs.offset > 0); // origin strictly interior
      for (const Vec3& v : cell.vertices)
        CHECK(hs.normal.dot(v) <= hs.offset + sym_tol);
    }
  }
}

TEST_CASE("cells are independent of the basis presentation", "[voronoi]") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = testutil::random_basis(rng);
    const auto m = testutil::random_unimodular(rng);
    const auto cell_a = compute_voronoi_cell(b);
    const auto cell_b = compute_voronoi_cell(testutil::rebase(b, m));
    CHECK(testutil::same_vertex_set(cell_a.vertices, cell_b.vertices, 1e-6));
  }
}

TEST_CASE("cell vertices are equidistant from the origin and >=3 generators",
          "[voronoi]") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const auto b = testutil::random_basis(rng);
    const auto cell = compute_voronoi_cell(b);
    const auto shell = neighbor_shell(reduce_basis(b), 3);
    const double tol = 1e-7 * std::max(1.0, cell.circumradius());
    for (const Vec3& v : cell.vertices) {
      int equidistant = 0;
      for (const Vec3& q : shell.points)
        if (std::abs((v - q).norm() - v.norm()) <= tol) ++equidistant;
      CHECK(equidistant >= 3);
    }
  }
}

TEST_CASE("polyhedron_volume and inradius on hand-built boxes", "[voronoi]") {
  const auto box = make_box(0.5);
  CHECK_THAT(polyhedron_volume(box), WithinAbs(1.0, 1e-12));
  CHECK_THAT(inradius(box), WithinAbs(0.5, 1e-12));
  CHECK(box.edge_count() == 12);
  CHECK(euler_characteristic(box) == 2);
}
