#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipman/errors.hpp"
#include "ipman/svg.hpp"

using namespace ipman;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("l-shape outline is one loop with 6 vertices") {
  const auto loops = region_outline(l_shape());
  REQUIRE(loops.size() == 1);
  const auto& v = loops[0];
  CHECK(v.size() == 6);
  for (const Vertex& p : std::vector<Vertex>{{-1, 9}, {-1, 17}, {17, 17}, {17, -1}, {9, -1}, {9, 9}})
    CHECK(std::find(v.begin(), v.end(), p) != v.end());
  // Counter-clockwise: positive shoelace area equal to 18*8 + 8*10.
  double area = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vertex& a = v[i];
    const Vertex& b = v[(i + 1) % v.size()];
    area += a[0] * b[1] - b[0] * a[1];
  }
  CHECK(area / 2 == doctest::Approx(224.0));
}

TEST_CASE("overlapping and disjoint boxes") {
  const Region two = Region::union_of_boxes({Box({0, 0}, {1, 1}), Box({3, 3}, {4, 5})});
  const auto loops = region_outline(two);
  CHECK(loops.size() == 2);
  const Region overlap = Region::union_of_boxes({Box({0, 0}, {2, 2}), Box({1, 1}, {3, 3})});
  const auto l2 = region_outline(overlap);
  REQUIRE(l2.size() == 1);
  CHECK(l2[0].size() == 8);
}

TEST_CASE("svg content and determinism") {
  RandomStream rng(1);
  const Matrix2 feas = sample_feasible(l_shape(), SamplerConfig{}, 300, rng);
  const Matrix2 gen = rng.normal_matrix(40, 2);
  const std::string a = render_svg_scatter(feas, gen, l_shape());
  CHECK(a == render_svg_scatter(feas, gen, l_shape()));
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(count(a, "fill=\"#d9c8a0\"") >= 1);
  CHECK(count(a, "<circle") == 300 + 40 + 2);  // two legend markers
  CHECK(a.find("x1") != std::string::npos);
  CHECK(a.find("x2") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "ipman_test_plot.svg";
  emit_svg_scatter(feas, gen, l_shape(), path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == a);
  std::filesystem::remove(path);
}

TEST_CASE("empty generated set") {
  RandomStream rng(2);
  const Matrix2 feas = sample_feasible(l_shape(), SamplerConfig{}, 50, rng);
  const std::string s = render_svg_scatter(feas, Matrix2(0, 2), l_shape());
  CHECK(count(s, "<circle") == 50 + 2);
  CHECK(s.find("</svg>") != std::string::npos);
}

TEST_CASE("non 2-D input is rejected") {
  CHECK_THROWS_AS(render_svg_scatter(Matrix2(3, 3), Matrix2(0, 3), Region::union_of_boxes({Box({0, 0, 0}, {1, 1, 1})})),
                  ShapeError);
  CHECK_THROWS_AS(render_svg_scatter(Matrix2(3, 16), Matrix2(0, 16), Region::toy_dose(ToyDoseSpec{})), ShapeError);
}
