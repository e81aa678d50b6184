#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ipman/objective.hpp"
#include "ipman/random.hpp"
#include "ipman/region.hpp"

// Brute-force ground truth: exhaustive grid search over the feasible part of
// a region's bounding box. The OpenMP variant splits the grid across workers
// and combines by (value, grid index), so it returns exactly what the serial
// reference returns.
namespace ipman {

struct GridResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  // Every grid point whose value equals best_value to 1e-9.
  std::vector<std::vector<double>> argmin_points;
  // Every grid point within tau of best_value.
  std::vector<std::vector<double>> near_optimal;
  double tau = 0.0;
  double step = 0.0;
  std::size_t n_feasible_points = 0;
};

// tau defaults to half the largest change of f between the best grid point
// and its feasible axis neighbours.
GridResult grid_optimize(const Region& region, const Objective& f, double step,
                         std::optional<double> tau = std::nullopt);

namespace serial {
GridResult grid_optimize(const Region& region, const Objective& f, double step,
                         std::optional<double> tau = std::nullopt);
}

// Multistart projected subgradient search over the toy-dose box constraints.
// Used where a full grid is out of reach; agreement across starts is reported
// as a quality indicator.
struct LocalSearchResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  std::size_t n_starts = 0;
  std::size_t n_agreeing = 0;  // starts ending within 1e-3 of best_value
  double spread = 0.0;         // max - min of the per-start results
};

LocalSearchResult toy_dose_oracle(const Region& region, const Objective& f, std::size_t n_starts,
                                  std::size_t iterations, RandomStream& rng);

}  // namespace ipman
