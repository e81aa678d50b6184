#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ipman {

struct AdamSettings {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon_hat = 1e-8;

  bool operator==(const AdamSettings&) const = default;
};

// Bias-corrected Adam moments for a list of parameter tensors.
class AdamState {
 public:
  AdamState() = default;
  AdamState(AdamSettings settings, std::span<const std::span<const double>> shapes);

  template <class Tensors>
  static AdamState for_parameters(AdamSettings settings, const Tensors& params) {
    std::vector<std::span<const double>> views(params.begin(), params.end());
    return AdamState(settings, views);
  }

  const AdamSettings& settings() const noexcept { return settings_; }
  std::size_t step_count() const noexcept { return step_; }
  const std::vector<std::vector<double>>& first_moment() const noexcept { return m_; }
  const std::vector<std::vector<double>>& second_moment() const noexcept { return v_; }

  // Applies one update in place and advances the step counter.
  void step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads);

 private:
  AdamSettings settings_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_ = 0;
};

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

}  // namespace ipman
