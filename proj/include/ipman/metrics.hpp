#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ipman/matrix.hpp"
#include "ipman/objective.hpp"
#include "ipman/region.hpp"

namespace ipman {

// Generated points with their objective values and feasibility flags.
struct SampleSet {
  Matrix2 points;
  std::vector<double> objective_values;
  std::vector<bool> feasible;

  static SampleSet evaluate(Matrix2 points, const Objective& f, const Region& region);
  std::size_t size() const noexcept { return points.rows(); }
  std::size_t feasible_count() const;
};

struct MetricsReport {
  double delta_f = 0.0;
  double var90 = 0.0;
  double delta_x = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_feasible = 0;
  bool trimmed = false;

  bool operator==(const MetricsReport&) const = default;
};

// Mean of |f(x_i) - optimal_value|.
double delta_f(const SampleSet& samples, double optimal_value);
double delta_f(const Matrix2& points, const Objective& f, double optimal_value);

// Ascending order statistic at rank ceil(alpha * m).
double var_alpha(std::span<const double> values, double alpha);

// Mean Euclidean distance of the points to the optimal set.
double delta_x(const Matrix2& points, const OptimalSet& optimal);

// Keeps the ceil(percentile/100 * N) samples closest to optimal_value in
// objective, in their original order.
SampleSet trim_outliers(const SampleSet& samples, double optimal_value, double percentile = 90.0);

MetricsReport compute_metrics(const SampleSet& samples, double optimal_value,
                              const OptimalSet& optimal, bool trim, double percentile = 90.0);

}  // namespace ipman
