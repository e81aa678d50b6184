#include "ipman/loss.hpp"

#include <algorithm>
#include <cmath>

#include "ipman/errors.hpp"
#include "ipman/mlp.hpp"

namespace ipman {

LossResult bce_loss(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size()) throw ShapeError("bce: length mismatch");
  if (predictions.empty()) throw ShapeError("bce: empty batch");
  const double n = static_cast<double>(predictions.size());
  LossResult r;
  r.grad.resize(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double p = std::clamp(predictions[i], kSigmoidClamp, 1.0 - kSigmoidClamp);
    const double y = labels[i];
    r.value -= y * std::log(p) + (1.0 - y) * std::log1p(-p);
    r.grad[i] = (p - y) / (p * (1.0 - p)) / n;
  }
  r.value /= n;
  return r;
}

BceBatch bce_against(const Matrix2& predictions, double label) {
  if (predictions.cols() != 1) throw ShapeError("bce: predictions must be a column");
  std::vector<double> labels(predictions.rows(), label);
  LossResult r = bce_loss(predictions.values(), labels);
  return {r.value, Matrix2(predictions.rows(), 1, std::move(r.grad))};
}

}  // namespace ipman
