#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace latdist;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("parse_cif_cell reads the six cell tags", "[io]") {
  SECTION("minimal cubic document") {
    const char* text =
        "data_cubic\n"
        "_cell_length_a 1\n_cell_length_b 1\n_cell_length_c 1\n"
        "_cell_angle_alpha 90\n_cell_angle_beta 90\n_cell_angle_gamma 90\n";
    const auto rec = parse_cif_cell(text);
    CHECK(rec.id == "cubic");
    CHECK(rec.source == LatticeRecord::Source::cif);
    CHECK((rec.basis.u() - Vec3(1, 0, 0)).norm() < 1e-12);
    CHECK((rec.basis.v() - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK((rec.basis.w() - Vec3(0, 0, 1)).norm() < 1e-12);
    REQUIRE(rec.raw_cell.has_value());
    CHECK(rec.raw_cell->a == 1.0);
  }

  SECTION("orthorhombic cell with uncertainties and skipped loops") {
    const char* text =
        "data_t2_41\n"
        "_symmetry_space_group_name_H-M 'P 1'\n"
        "_cell_length_a   53.3(2)\n"
        "_cell_length_b   23.7\n"
        "_cell_length_c   7.3(1)\n"
        "_cell_angle_alpha  90.0\n"
        "_cell_angle_beta   90.0\n"
        "_cell_angle_gamma  90.0\n"
        "loop_\n"
        "_atom_site_label\n"
        "_atom_site_fract_x\n"
        "C1 0.125\n";
    const auto rec = parse_cif_cell(text);
    CHECK(rec.id == "t2_41");
    CHECK_THAT(rec.basis.u().norm(), WithinRel(53.3, 1e-12));
    CHECK_THAT(rec.basis.v().norm(), WithinRel(23.7, 1e-12));
    CHECK_THAT(rec.basis.w().norm(), WithinRel(7.3, 1e-12));
    CHECK_THAT(rec.basis.u().dot(rec.basis.v()), WithinAbs(0.0, 1e-9));
  }

  SECTION("missing tag is reported by name") {
    const char* text =
        "data_x\n"
        "_cell_length_a 1\n_cell_length_b 1\n_cell_length_c 1\n"
        "_cell_angle_alpha 90\n_cell_angle_beta 90\n";
    try {
      parse_cif_cell(text);
      FAIL("expected missing_tag_error");
    } catch (const missing_tag_error& e) {
      CHECK(e.tag() == "_cell_angle_gamma");
    }
  }

  SECTION("malformed numbers carry the line number") {
    const char* text =
        "data_x\n"
        "_cell_length_a 1\n_cell_length_b oops\n_cell_length_c 1\n"
        "_cell_angle_alpha 90\n_cell_angle_beta 90\n_cell_angle_gamma 90\n";
    try {
      parse_cif_cell(text);
      FAIL("expected malformed_number_error");
    } catch (const malformed_number_error& e) {
      CHECK(e.line() == 3);
    }
  }

  SECTION("fallback id when no data_ header") {
    const char* text =
        "_cell_length_a 1\n_cell_length_b 1\n_cell_length_c 1\n"
        "_cell_angle_alpha 90\n_cell_angle_beta 90\n_cell_angle_gamma 90\n";
    CHECK(parse_cif_cell(text, "fromfile").id == "fromfile");
  }

  SECTION("non-positive-definite cell propagates") {
    const char* text =
        "data_x\n"
        "_cell_length_a 1\n_cell_length_b 1\n_cell_length_c 1\n"
        "_cell_angle_alpha 179.9\n_cell_angle_beta 179.9\n"
        "_cell_angle_gamma 179.9\n";
    CHECK_THROWS_AS(parse_cif_cell(text), non_positive_definite_error);
  }
}

TEST_CASE("parse_lattice_json accepts basis and cell records", "[io]") {
  SECTION("one basis record") {
    const auto recs = parse_lattice_json(
        R"([{"id": "c", "basis": [[1,0,0],[0,1,0],[0,0,1]]}])");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].id == "c");
    CHECK(recs[0].source == LatticeRecord::Source::json);
    CHECK_FALSE(recs[0].raw_cell.has_value());
  }
  SECTION("one cell record") {
    const auto recs =
        parse_lattice_json(R"([{"id": "h", "cell": [1,1,1,90,90,120]}])");
    REQUIRE(recs.size() == 1);
    CHECK((recs[0].basis.v() - Vec3(-0.5, std::sqrt(3.0) / 2, 0)).norm() <
          1e-12);
    REQUIRE(recs[0].raw_cell.has_value());
  }
  SECTION("schema violations name the record") {
    CHECK_THROWS_WITH(parse_lattice_json(R"([{"id": "bad", "basis": [[1,0,0]]}])"),
                      ContainsSubstring("bad"));
    CHECK_THROWS_WITH(
        parse_lattice_json(
            R"([{"id": "dup", "cell": [1,1,1,90,90,90]},
                {"id": "dup", "cell": [1,1,1,90,90,90]}])"),
        ContainsSubstring("dup"));
    CHECK_THROWS_WITH(
        parse_lattice_json(R"([{"id": "flat", "cell": [1,1,1,179.9,179.9,179.9]}])"),
        ContainsSubstring("flat"));
    CHECK_THROWS_WITH(
        parse_lattice_json(R"([{"id": "both", "basis": [[1,0,0],[0,1,0],[0,0,1]],
                                "cell": [1,1,1,90,90,90]}])"),
        ContainsSubstring("both"));
    CHECK_THROWS_AS(parse_lattice_json("{}"), parse_error);
    CHECK_THROWS_AS(parse_lattice_json("not json"), parse_error);
  }
}

TEST_CASE("matrix CSV round-trips", "[io]") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> dist(0.0, 10.0);
  DistanceMatrix m;
  m.metric = Metric::scale;
  m.grid_n = 3;
  m.ids = {"a", "b", "c", "d", "e"};
  const std::size_t n = m.ids.size();
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.at(i, j) = m.at(j, i) = dist(rng);

  const std::string csv = write_matrix_csv(m);
  const auto back = read_matrix_csv(csv);
  CHECK(back.metric == m.metric);
  CHECK(back.grid_n == m.grid_n);
  CHECK(back.ids == m.ids);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      CHECK_THAT(back.at(i, j), WithinAbs(m.at(i, j), 1e-9));

  // writers are byte-deterministic
  CHECK(write_matrix_csv(back) == csv);
}

TEST_CASE("matrix CSV rejects malformed input", "[io]") {
  CHECK_THROWS_AS(read_matrix_csv("dH:3,a,b\na,0,1\nb,2,0\n"),
                  symmetry_violation_error);
  CHECK_THROWS_AS(read_matrix_csv("dH:3,a,b\na,1,2\nb,2,1\n"), parse_error);
  CHECK_THROWS_AS(read_matrix_csv("dH:3,a,b\nX,0,1\nb,1,0\n"), parse_error);
  CHECK_THROWS_AS(read_matrix_csv("dH:3,a,b\na,0,oops\nb,1,0\n"),
                  malformed_number_error);
  CHECK_THROWS_AS(read_matrix_csv("xx,a,b\na,0,1\nb,1,0\n"), parse_error);
  CHECK_THROWS_AS(read_matrix_csv("dH:3,a,b\na,0,1\n"), parse_error);
  // empty corner is tolerated for foreign matrices
  const auto m = read_matrix_csv(",a,b\na,0,1\nb,1,0\n");
  CHECK(m.metric == Metric::hausdorff);
  CHECK(m.grid_n == 0);
}

TEST_CASE("scale_to_gray maps linearly onto [0,255]", "[io]") {
  DistanceMatrix m;
  m.ids = {"a", "b", "c"};
  m.values = {0, 5, 10, 5, 0, 5, 10, 5, 0};

  const auto img = scale_to_gray(m);
  REQUIRE(img.pixels.size() == 9);
  CHECK(img.pixels[0] == 0);
  CHECK(img.pixels[1] == 128); // 127.5 rounds half away from zero
  CHECK(img.pixels[2] == 255);

  SECTION("constant matrix maps to zero") {
    DistanceMatrix z;
    z.ids = {"a", "b"};
    z.values = {0, 0, 0, 0};
    const auto zi = scale_to_gray(z);
    CHECK(zi.pixels == std::vector<std::uint8_t>{0, 0, 0, 0});
  }

  SECTION("endpoints and monotonicity") {
    std::mt19937 rng(103);
    std::uniform_real_distribution<double> dist(0.0, 7.0);
    DistanceMatrix r;
    r.ids = {"a", "b", "c", "d"};
    r.values.assign(16, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j)
        r.at(i, j) = r.at(j, i) = dist(rng);
    const auto gi = scale_to_gray(r);
    CHECK(*std::min_element(gi.pixels.begin(), gi.pixels.end()) == 0);
    CHECK(*std::max_element(gi.pixels.begin(), gi.pixels.end()) == 255);
    for (std::size_t i = 0; i < r.values.size(); ++i)
      for (std::size_t j = 0; j < r.values.size(); ++j)
        if (r.values[i] <= r.values[j]) CHECK(gi.pixels[i] <= gi.pixels[j]);
  }
}

TEST_CASE("write_pgm emits the exact P5 byte stream", "[io]") {
  GrayImage one{1, 1, {0}};
  CHECK(write_pgm(one) == std::string("P5\n1 1\n255\n\0", 12));

  GrayImage two{2, 2, {0, 255, 255, 0}};
  const std::string want = std::string("P5\n2 2\n255\n") +
                           '\x00' + '\xff' + '\xff' + '\x00';
  CHECK(write_pgm(two) == want);
}

namespace {

// Minimal OBJ reader used to round-trip exports.
ConvexPolyhedron parse_obj(const std::string& text) {
  ConvexPolyhedron p;
  std::istringstream in(text);
  std::string tag;
  while (in >> tag) {
    if (tag == "v") {
      Vec3 v;
      in >> v.x() >> v.y() >> v.z();
      p.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string rest;
      std::getline(in, rest);
      std::istringstream fs(rest);
      int idx;
      while (fs >> idx) face.push_back(idx - 1);
      p.faces.push_back(face);
    }
  }
  return p;
}

} // namespace

TEST_CASE("export_cell_obj writes v/f lines that round-trip", "[io]") {
  const auto cube = compute_voronoi_cell(testutil::cubic());
  const std::string obj = export_cell_obj(cube);
  const auto back = parse_obj(obj);
  CHECK(back.vertices.size() == 8);
  CHECK(back.faces.size() == 6);
  CHECK_THAT(polyhedron_volume(back), WithinRel(polyhedron_volume(cube), 1e-6));

  const auto bcell = compute_voronoi_cell(testutil::bcc());
  const auto bback = parse_obj(export_cell_obj(bcell));
  CHECK(bback.vertices.size() == 24);
  CHECK(bback.faces.size() == 14);
  CHECK_THAT(polyhedron_volume(bback), WithinRel(0.5, 1e-6));
}
