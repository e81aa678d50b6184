#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ipman/matrix.hpp"
#include "ipman/random.hpp"

namespace ipman {

// Sigmoid outputs are clamped to [kSigmoidClamp, 1 - kSigmoidClamp] so that
// log D stays finite.
inline constexpr double kSigmoidClamp = 1e-7;

struct Activation {
  enum class Kind : unsigned char { LeakyRelu = 0, Sigmoid = 1, Identity = 2 };

  Kind kind = Kind::Identity;
  double slope = 0.0;  // LeakyRelu only

  static Activation leaky_relu(double slope) { return {Kind::LeakyRelu, slope}; }
  static Activation sigmoid() { return {Kind::Sigmoid, 0.0}; }
  static Activation identity() { return {Kind::Identity, 0.0}; }

  bool operator==(const Activation&) const = default;
};

// Dense layer y = act(x W^T + b), W stored out x in.
struct DenseLayer {
  Matrix2 weight;
  std::vector<double> bias;
  Activation activation;
  Matrix2 weight_grad;
  std::vector<double> bias_grad;

  DenseLayer() = default;
  DenseLayer(Matrix2 w, std::vector<double> b, Activation act);

  std::size_t in_dim() const noexcept { return weight.cols(); }
  std::size_t out_dim() const noexcept { return weight.rows(); }
};

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  // widths = {in, hidden..., out}. Hidden layers use `hidden`, the last layer
  // `output`. Weights are drawn uniform with a fan-in scaled bound
  // (sqrt(6/fan_in) ahead of rectifiers, sqrt(3/fan_in) otherwise); biases start at 0.
  static Mlp make(std::span<const std::size_t> widths, Activation hidden, Activation output,
                  RandomStream& rng);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t num_layers() const noexcept { return layers_.size(); }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }
  DenseLayer& layer(std::size_t i) { return layers_.at(i); }

  // Evaluates the batch and caches per-layer state for backward().
  Matrix2 forward(const Matrix2& batch);
  // Same values as forward() without touching the cache; safe to call concurrently.
  Matrix2 predict(const Matrix2& batch) const;
  // Back-propagates dLoss/dOutput. Overwrites the parameter gradients and
  // returns dLoss/dInput.
  Matrix2 backward(const Matrix2& upstream);

  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::vector<std::span<const double>> gradients() const;
  std::size_t parameter_count() const;
  void zero_gradients();
  bool has_cache() const noexcept { return cached_; }

  // Parameter-wise bitwise equality; gradients and caches are ignored.
  bool same_parameters(const Mlp& other) const;

 private:
  void check_input(const Matrix2& batch) const;

  std::vector<DenseLayer> layers_;
  std::vector<Matrix2> inputs_;
  std::vector<Matrix2> pre_;
  std::vector<Matrix2> post_;
  bool cached_ = false;
};

// Checkpoint format, little-endian:
//   "IPMANNET" | u32 version (=1) | payload
// payload:
//   u32 n_layers, then per layer:
//   u32 in | u32 out | u8 activation | f64 slope | f64[out*in] weight | f64[out] bias
inline constexpr std::uint32_t kMlpFormatVersion = 1;

void write_mlp_payload(std::ostream& out, const Mlp& net);
Mlp read_mlp_payload(std::istream& in);

void save_mlp(const std::filesystem::path& path, const Mlp& net);
Mlp load_mlp(const std::filesystem::path& path);

namespace binio {
void write_u32(std::ostream& out, std::uint32_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
double read_f64(std::istream& in);
}  // namespace binio

}  // namespace ipman
