#include "ipman/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ipman/errors.hpp"
#include "ipman/stats.hpp"

namespace ipman {

SampleSet SampleSet::evaluate(Matrix2 points, const Objective& f, const Region& region) {
  SampleSet s;
  s.objective_values.reserve(points.rows());
  s.feasible.reserve(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    s.objective_values.push_back(f.eval(points.row(i)));
    s.feasible.push_back(region.contains(points.row(i)));
  }
  s.points = std::move(points);
  return s;
}

std::size_t SampleSet::feasible_count() const {
  return static_cast<std::size_t>(std::count(feasible.begin(), feasible.end(), true));
}

double delta_f(const SampleSet& samples, double optimal_value) {
  if (samples.size() == 0) throw DomainError("delta_f of an empty sample set");
  double s = 0.0;
  for (double v : samples.objective_values) s += std::abs(v - optimal_value);
  return s / static_cast<double>(samples.size());
}

double delta_f(const Matrix2& points, const Objective& f, double optimal_value) {
  if (points.empty()) throw DomainError("delta_f of an empty sample set");
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) s += std::abs(f.eval(points.row(i)) - optimal_value);
  return s / static_cast<double>(points.rows());
}

double var_alpha(std::span<const double> values, double alpha) {
  return order_statistic(values, alpha);
}

double delta_x(const Matrix2& points, const OptimalSet& optimal) {
  if (points.empty()) throw DomainError("delta_x of an empty sample set");
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) s += optimal.distance(points.row(i));
  return s / static_cast<double>(points.rows());
}

SampleSet trim_outliers(const SampleSet& samples, double optimal_value, double percentile) {
  const std::size_t n = samples.size();
  if (n == 0) throw DomainError("cannot trim an empty sample set");
  if (!(percentile > 0.0 && percentile <= 100.0)) throw DomainError("percentile must lie in (0, 100]");
  const std::size_t keep = quantile_rank(percentile / 100.0, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(samples.objective_values[a] - optimal_value) <
           std::abs(samples.objective_values[b] - optimal_value);
  });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  SampleSet out;
  out.points = samples.points.gather_rows(order);
  for (auto i : order) {
    out.objective_values.push_back(samples.objective_values[i]);
    out.feasible.push_back(samples.feasible[i]);
  }
  return out;
}

MetricsReport compute_metrics(const SampleSet& samples, double optimal_value,
                              const OptimalSet& optimal, bool trim, double percentile) {
  const SampleSet used = trim ? trim_outliers(samples, optimal_value, percentile) : samples;
  std::vector<double> errors;
  errors.reserve(used.size());
  for (double v : used.objective_values) errors.push_back(std::abs(v - optimal_value));
  MetricsReport r;
  r.delta_f = delta_f(used, optimal_value);
  r.var90 = var_alpha(errors, 0.9);
  r.delta_x = delta_x(used.points, optimal);
  r.n_samples = used.size();
  r.n_feasible = used.feasible_count();
  r.trimmed = trim;
  return r;
}

}  // namespace ipman
