#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ipman/errors.hpp"

namespace ipman {

// 1-based rank of the alpha-quantile among m values: ceil(alpha * m), at least 1.
// A tiny slack keeps products like 0.9 * 10 from rounding up to 10.
inline std::size_t quantile_rank(double alpha, std::size_t m) {
  const double raw = alpha * static_cast<double>(m);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(k, 1, m);
}

// Ascending order statistic at rank ceil(alpha * m), no interpolation. All
// VaR evaluations use this rule.
inline double order_statistic(std::span<const double> values, double alpha) {
  if (values.empty()) throw DomainError("order statistic of an empty set");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t k = quantile_rank(alpha, v.size());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

}  // namespace ipman
