#include "doctest.h"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "ipman/errors.hpp"
#include "ipman/oracle.hpp"

using namespace ipman;

namespace {

bool has_point(const std::vector<std::vector<double>>& pts, std::vector<double> p) {
  return std::find(pts.begin(), pts.end(), p) != pts.end();
}

}  // namespace

TEST_CASE("linear: value -1 along x1 = -1") {
  for (double step : {0.5, 0.25}) {
    const GridResult g = grid_optimize(l_shape(), make_linear(), step);
    CHECK(g.best_value == -1.0);
    CHECK(g.argmin_points.size() == static_cast<std::size_t>(8 / step) + 1);
    for (const auto& p : g.argmin_points) CHECK(p[0] == -1.0);
  }
}

TEST_CASE("bilinear: -81 at both corners") {
  for (double step : {0.5, 0.25}) {
    const GridResult g = grid_optimize(l_shape(), make_bilinear(), step);
    CHECK(g.best_value == -81.0);
    CHECK(g.argmin_points.size() == 2);
    CHECK(has_point(g.argmin_points, {-1, 17}));
    CHECK(has_point(g.argmin_points, {17, -1}));
  }
}

TEST_CASE("quadratic and rosenbrock optima at step 0.25") {
  const GridResult q = grid_optimize(l_shape(), make_quadratic(), 0.25);
  CHECK(q.best_point == std::vector<double>{5, 11});
  CHECK(q.best_value == 0.0);
  const GridResult r = grid_optimize(l_shape(), make_rosenbrock(), 0.25);
  CHECK(r.best_point == std::vector<double>{3.5, 12.25});
  CHECK(r.best_value == 0.0);
  CHECK(r.tau > 0.0);
  CHECK(has_point(r.near_optimal, {3.5, 12.25}));
}

TEST_CASE("omp grid search returns exactly the serial result") {
  const int saved = omp_get_max_threads();
  for (const auto& f : {make_linear(), make_quadratic(), make_bilinear(), make_rosenbrock()}) {
    const GridResult s = serial::grid_optimize(l_shape(), f, 0.25);
    for (int threads : {1, 2, 3}) {
      omp_set_num_threads(threads);
      const GridResult p = grid_optimize(l_shape(), f, 0.25);
      CHECK(p.best_point == s.best_point);
      CHECK(p.best_value == s.best_value);
      CHECK(p.argmin_points == s.argmin_points);
      CHECK(p.near_optimal == s.near_optimal);
      CHECK(p.n_feasible_points == s.n_feasible_points);
    }
  }
  omp_set_num_threads(saved);
}

TEST_CASE("best value never increases as the step halves") {
  for (const auto& f : {make_linear(), make_quadratic(), make_bilinear(), make_rosenbrock()}) {
    double prev = INFINITY;
    for (double step : {2.0, 1.0, 0.5, 0.25, 0.125}) {
      const GridResult g = grid_optimize(l_shape(), f, step);
      CHECK(g.best_value <= prev);
      CHECK(g.best_value >= f.optimal_set()->optimal_value - 1e-9);
      prev = g.best_value;
    }
  }
}

TEST_CASE("grid errors") {
  CHECK_THROWS_AS(grid_optimize(l_shape(), make_linear(), 0.0), ConfigError);
  // Two small boxes at opposite corners; the 0.7 grid from (0, 0) lands in neither.
  const Region gap = Region::union_of_boxes({Box({0.0, 1.0}, {0.1, 1.1}), Box({1.0, 0.0}, {1.1, 0.1})});
  CHECK_THROWS_AS(grid_optimize(gap, make_zero(2), 0.7), ConfigError);
}

TEST_CASE("toy dose local search finds the prescription-like optimum") {
  const ToyDoseSpec spec;
  const Region region = Region::toy_dose(spec);
  const Objective f = make_toy_dose(spec, default_toy_penalties(spec), toy_prescription(spec));
  RandomStream rng(8);
  const LocalSearchResult r = toy_dose_oracle(region, f, 8, 2000, rng);
  CHECK(r.n_starts == 8);
  CHECK(region.contains(r.best_point));
  // x = x_hat is feasible with f = 0 and f >= 0 on non-negative doses.
  CHECK(r.best_value >= 0.0);
  CHECK(r.best_value <= 1e-2);
}
