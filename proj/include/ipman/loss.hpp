#pragma once

#include <span>
#include <vector>

#include "ipman/matrix.hpp"

namespace ipman {

struct LossResult {
  double value = 0.0;
  std::vector<double> grad;  // d value / d prediction
};

// Mean binary cross-entropy. Predictions are clamped to
// [kSigmoidClamp, 1 - kSigmoidClamp] before the logs are taken.
LossResult bce_loss(std::span<const double> predictions, std::span<const double> labels);

// Same loss against a constant label; the gradient comes back as an n x 1
// matrix ready for Mlp::backward.
struct BceBatch {
  double value = 0.0;
  Matrix2 grad;
};
BceBatch bce_against(const Matrix2& predictions, double label);

}  // namespace ipman
