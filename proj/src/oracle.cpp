#include "ipman/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipman/errors.hpp"

namespace ipman {

namespace {

constexpr std::size_t kMaxGridPoints = 50'000'000;

struct Grid {
  std::vector<double> lower;
  std::vector<std::size_t> counts;
  double step = 0.0;
  std::size_t total = 1;

  Grid(const Box& box, double s) : lower(box.lower), step(s) {
    for (std::size_t i = 0; i < box.dimension(); ++i) {
      const auto n = static_cast<std::size_t>(std::floor((box.upper[i] - box.lower[i]) / s + 1e-9)) + 1;
      counts.push_back(n);
      if (total > kMaxGridPoints / n) throw ConfigError("grid too large; increase the step");
      total *= n;
    }
  }

  void point(std::size_t flat, std::vector<double>& x) const {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const std::size_t k = flat % counts[i];
      flat /= counts[i];
      x[i] = lower[i] + static_cast<double>(k) * step;
    }
  }

  std::vector<std::size_t> digits(std::size_t flat) const {
    std::vector<std::size_t> d(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      d[i] = flat % counts[i];
      flat /= counts[i];
    }
    return d;
  }
};

// Candidate ordering: smaller value first, then smaller grid index.
struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void offer(double v, std::size_t i) {
    if (v < value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
};

void check_inputs(const Region& region, const Objective& f, double step) {
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  if (f.dimension() != region.dimension()) throw ShapeError("objective and region dimensions differ");
}

// Second pass shared by both variants: tau, argmin set and near-optimal set.
GridResult finish(const Region& region, const Objective& f, const Grid& grid, const Best& best,
                  std::size_t n_feasible, std::optional<double> tau) {
  if (n_feasible == 0) throw ConfigError("no grid point lies in the region");
  const std::size_t n = region.dimension();
  GridResult r;
  r.step = grid.step;
  r.n_feasible_points = n_feasible;
  r.best_value = best.value;
  r.best_point.resize(n);
  grid.point(best.index, r.best_point);

  if (tau) {
    r.tau = *tau;
  } else {
    const auto d = grid.digits(best.index);
    double largest = 0.0;
    std::vector<double> x = r.best_point;
    for (std::size_t i = 0; i < n; ++i) {
      for (int dir : {-1, 1}) {
        if ((dir < 0 && d[i] == 0) || (dir > 0 && d[i] + 1 >= grid.counts[i])) continue;
        x = r.best_point;
        x[i] = grid.lower[i] + static_cast<double>(static_cast<long>(d[i]) + dir) * grid.step;
        if (!region.contains(x)) continue;
        largest = std::max(largest, std::abs(f.eval(x) - best.value));
      }
    }
    r.tau = 0.5 * largest;
  }

  std::vector<double> x(n);
  for (std::size_t flat = 0; flat < grid.total; ++flat) {
    grid.point(flat, x);
    if (!region.contains(x)) continue;
    const double v = f.eval(x);
    if (v <= best.value + r.tau + 1e-12) r.near_optimal.push_back(x);
    if (std::abs(v - best.value) <= 1e-9) r.argmin_points.push_back(x);
  }
  return r;
}

}  // namespace

namespace serial {

GridResult grid_optimize(const Region& region, const Objective& f, double step,
                         std::optional<double> tau) {
  check_inputs(region, f, step);
  const Grid grid(region.bounding_box(), step);
  Best best;
  std::size_t n_feasible = 0;
  std::vector<double> x(region.dimension());
  for (std::size_t flat = 0; flat < grid.total; ++flat) {
    grid.point(flat, x);
    if (!region.contains(x)) continue;
    ++n_feasible;
    best.offer(f.eval(x), flat);
  }
  return finish(region, f, grid, best, n_feasible, tau);
}

}  // namespace serial

GridResult grid_optimize(const Region& region, const Objective& f, double step,
                         std::optional<double> tau) {
  check_inputs(region, f, step);
  const Grid grid(region.bounding_box(), step);
  Best best;
  std::size_t n_feasible = 0;
  const auto total = static_cast<std::ptrdiff_t>(grid.total);
#pragma omp parallel
  {
    Best local;
    std::size_t local_count = 0;
    std::vector<double> x(region.dimension());
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t flat = 0; flat < total; ++flat) {
      grid.point(static_cast<std::size_t>(flat), x);
      if (!region.contains(x)) continue;
      ++local_count;
      local.offer(f.eval(x), static_cast<std::size_t>(flat));
    }
#pragma omp critical(ipman_grid_reduce)
    {
      best.offer(local.value, local.index);
      n_feasible += local_count;
    }
  }
  return finish(region, f, grid, best, n_feasible, tau);
}

LocalSearchResult toy_dose_oracle(const Region& region, const Objective& f, std::size_t n_starts,
                                  std::size_t iterations, RandomStream& rng) {
  if (region.kind() != Region::Kind::ToyDose) throw ConfigError("toy-dose oracle needs a toy-dose region");
  if (n_starts == 0 || iterations == 0) throw ConfigError("toy-dose oracle needs starts and iterations");
  const auto bounds = region.toy_spec().voxel_intervals();
  const std::size_t n = region.dimension();
  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], bounds.lo[i], bounds.hi[i]);
  };
  const double scale = region.toy_spec().prescription;

  LocalSearchResult r;
  r.n_starts = n_starts;
  r.best_value = std::numeric_limits<double>::infinity();
  std::vector<double> finals;
  std::vector<double> x(n);
  std::vector<double> g(n);
  for (std::size_t s = 0; s < n_starts; ++s) {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
    double start_best = std::numeric_limits<double>::infinity();
    std::vector<double> start_point = x;
    for (std::size_t k = 0; k < iterations; ++k) {
      const double v = f.eval(x);
      if (v < start_best && region.contains(x)) {
        start_best = v;
        start_point = x;
      }
      f.grad_into(x, g);
      const double eta = 0.1 * scale / std::sqrt(static_cast<double>(k) + 1.0);
      for (std::size_t i = 0; i < n; ++i) x[i] -= eta * g[i];
      project(x);
    }
    finals.push_back(start_best);
    if (start_best < r.best_value) {
      r.best_value = start_best;
      r.best_point = start_point;
    }
  }
  if (!std::isfinite(r.best_value)) throw ConfigError("toy-dose oracle found no feasible point");
  const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
  r.spread = *hi - *lo;
  r.n_agreeing = static_cast<std::size_t>(std::count_if(
      finals.begin(), finals.end(), [&](double v) { return v - r.best_value <= 1e-3; }));
  return r;
}

}  // namespace ipman
