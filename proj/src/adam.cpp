#include "ipman/adam.hpp"

#include <cmath>

#include "ipman/errors.hpp"

namespace ipman {

AdamState::AdamState(AdamSettings settings, std::span<const std::span<const double>> shapes)
    : settings_(settings) {
  for (auto s : shapes) {
    m_.emplace_back(s.size(), 0.0);
    v_.emplace_back(s.size(), 0.0);
  }
}

void AdamState::step(std::span<const std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("adam: tensor count does not match the optimizer state");
  }
  for (std::size_t t = 0; t < m_.size(); ++t) {
    if (params[t].size() != m_[t].size() || grads[t].size() != m_[t].size()) {
      throw ShapeError("adam: tensor " + std::to_string(t) + " has the wrong size");
    }
  }
  ++step_;
  const auto& s = settings_;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(step_));
  for (std::size_t t = 0; t < m_.size(); ++t) {
    auto p = params[t];
    auto g = grads[t];
    auto& m = m_[t];
    auto& v = v_[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
      v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon_hat);
    }
  }
}

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  state.step(params, grads);
}

}  // namespace ipman
