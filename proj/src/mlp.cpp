#include "ipman/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ipman/errors.hpp"
#include "ipman/kernels.hpp"

namespace ipman {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void apply_activation(const Activation& act, const Matrix2& pre, Matrix2& post) {
  auto in = pre.values();
  auto out = post.values();
  switch (act.kind) {
    case Activation::Kind::LeakyRelu:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : act.slope * in[i];
      break;
    case Activation::Kind::Sigmoid:
      for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = std::clamp(sigmoid(in[i]), kSigmoidClamp, 1.0 - kSigmoidClamp);
      }
      break;
    case Activation::Kind::Identity:
      std::copy(in.begin(), in.end(), out.begin());
      break;
  }
}

// dLoss/dPre from dLoss/dPost. The sigmoid slope is taken at the clamped
// output, so saturated units still pass a usable gradient.
void activation_backward(const Activation& act, const Matrix2& pre, const Matrix2& post,
                         Matrix2& grad) {
  auto g = grad.values();
  auto z = pre.values();
  auto y = post.values();
  switch (act.kind) {
    case Activation::Kind::LeakyRelu:
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(z[i] > 0.0)) g[i] *= act.slope;
      }
      break;
    case Activation::Kind::Sigmoid:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= y[i] * (1.0 - y[i]);
      break;
    case Activation::Kind::Identity:
      break;
  }
}

Matrix2 affine(const DenseLayer& layer, const Matrix2& x) {
  Matrix2 z = kernels::matmul_abt(x, layer.weight);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto zr = z.row(r);
    for (std::size_t c = 0; c < zr.size(); ++c) zr[c] += layer.bias[c];
  }
  return z;
}

}  // namespace

DenseLayer::DenseLayer(Matrix2 w, std::vector<double> b, Activation act)
    : weight(std::move(w)), bias(std::move(b)), activation(act) {
  if (bias.size() != weight.rows()) throw ShapeError("bias length must equal layer output dim");
  weight_grad = Matrix2(weight.rows(), weight.cols());
  bias_grad.assign(bias.size(), 0.0);
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("network needs at least one layer");
  for (std::size_t k = 0; k + 1 < layers_.size(); ++k) {
    if (layers_[k].out_dim() != layers_[k + 1].in_dim()) {
      throw ShapeError("layer " + std::to_string(k) + " output dim does not chain");
    }
  }
  for (auto& l : layers_) {
    if (l.weight_grad.rows() != l.weight.rows() || l.weight_grad.cols() != l.weight.cols()) {
      l.weight_grad = Matrix2(l.weight.rows(), l.weight.cols());
    }
    if (l.bias_grad.size() != l.bias.size()) l.bias_grad.assign(l.bias.size(), 0.0);
  }
}

Mlp Mlp::make(std::span<const std::size_t> widths, Activation hidden, Activation output,
              RandomStream& rng) {
  if (widths.size() < 2) throw ShapeError("need at least input and output widths");
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const std::size_t in = widths[k];
    const std::size_t out = widths[k + 1];
    const bool last = k + 2 == widths.size();
    const Activation act = last ? output : hidden;
    const double gain = act.kind == Activation::Kind::LeakyRelu ? 6.0 : 3.0;
    const double bound = std::sqrt(gain / static_cast<double>(in));
    Matrix2 w(out, in);
    for (double& v : w.values()) v = rng.uniform(-bound, bound);
    layers.emplace_back(std::move(w), std::vector<double>(out, 0.0), act);
  }
  return Mlp(std::move(layers));
}

std::size_t Mlp::input_dim() const {
  if (layers_.empty()) throw StateError("empty network");
  return layers_.front().in_dim();
}

std::size_t Mlp::output_dim() const {
  if (layers_.empty()) throw StateError("empty network");
  return layers_.back().out_dim();
}

void Mlp::check_input(const Matrix2& batch) const {
  if (layers_.empty()) throw StateError("empty network");
  if (batch.cols() != input_dim()) {
    throw ShapeError("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                     std::to_string(input_dim()));
  }
}

Matrix2 Mlp::forward(const Matrix2& batch) {
  check_input(batch);
  inputs_.resize(layers_.size());
  pre_.resize(layers_.size());
  post_.resize(layers_.size());
  const Matrix2* x = &batch;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    inputs_[k] = *x;
    pre_[k] = affine(layers_[k], *x);
    post_[k] = Matrix2(pre_[k].rows(), pre_[k].cols());
    apply_activation(layers_[k].activation, pre_[k], post_[k]);
    x = &post_[k];
  }
  cached_ = true;
  return post_.back();
}

Matrix2 Mlp::predict(const Matrix2& batch) const {
  check_input(batch);
  Matrix2 x = batch;
  for (const auto& layer : layers_) {
    Matrix2 z = affine(layer, x);
    Matrix2 y(z.rows(), z.cols());
    apply_activation(layer.activation, z, y);
    x = std::move(y);
  }
  return x;
}

Matrix2 Mlp::backward(const Matrix2& upstream) {
  if (!cached_) throw StateError("backward called before forward");
  const Matrix2& out = post_.back();
  if (upstream.rows() != out.rows() || upstream.cols() != out.cols()) {
    throw ShapeError("upstream gradient shape does not match the cached output");
  }
  Matrix2 grad = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    DenseLayer& layer = layers_[k];
    activation_backward(layer.activation, pre_[k], post_[k], grad);
    layer.weight_grad = kernels::matmul_atb(grad, inputs_[k]);
    std::fill(layer.bias_grad.begin(), layer.bias_grad.end(), 0.0);
    for (std::size_t r = 0; r < grad.rows(); ++r) {
      auto gr = grad.row(r);
      for (std::size_t c = 0; c < gr.size(); ++c) layer.bias_grad[c] += gr[c];
    }
    grad = kernels::matmul_ab(grad, layer.weight);
  }
  return grad;
}

std::vector<std::span<double>> Mlp::parameters() {
  std::vector<std::span<double>> out;
  for (auto& l : layers_) {
    out.emplace_back(l.weight.values());
    out.emplace_back(l.bias);
  }
  return out;
}

std::vector<std::span<const double>> Mlp::parameters() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers_) {
    out.emplace_back(l.weight.values());
    out.emplace_back(l.bias);
  }
  return out;
}

std::vector<std::span<const double>> Mlp::gradients() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : layers_) {
    out.emplace_back(l.weight_grad.values());
    out.emplace_back(l.bias_grad);
  }
  return out;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

void Mlp::zero_gradients() {
  for (auto& l : layers_) {
    l.weight_grad.fill(0.0);
    std::fill(l.bias_grad.begin(), l.bias_grad.end(), 0.0);
  }
}

bool Mlp::same_parameters(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& a = layers_[k];
    const auto& b = other.layers_[k];
    if (!(a.activation == b.activation)) return false;
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols()) return false;
    if (std::memcmp(a.weight.values().data(), b.weight.values().data(),
                    a.weight.size() * sizeof(double)) != 0) {
      return false;
    }
    if (std::memcmp(a.bias.data(), b.bias.data(), a.bias.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

// --- checkpoint IO ---------------------------------------------------------

namespace binio {

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("truncated checkpoint");
  return v;
}

double read_f64(std::istream& in) {
  double v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error("truncated checkpoint");
  return v;
}

}  // namespace binio

namespace {
constexpr char kMlpMagic[8] = {'I', 'P', 'M', 'A', 'N', 'N', 'E', 'T'};
}

void write_mlp_payload(std::ostream& out, const Mlp& net) {
  binio::write_u32(out, static_cast<std::uint32_t>(net.num_layers()));
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const DenseLayer& l = net.layer(k);
    binio::write_u32(out, static_cast<std::uint32_t>(l.in_dim()));
    binio::write_u32(out, static_cast<std::uint32_t>(l.out_dim()));
    out.put(static_cast<char>(l.activation.kind));
    binio::write_f64(out, l.activation.slope);
    for (double v : l.weight.values()) binio::write_f64(out, v);
    for (double v : l.bias) binio::write_f64(out, v);
  }
}

Mlp read_mlp_payload(std::istream& in) {
  const std::uint32_t n_layers = binio::read_u32(in);
  if (n_layers == 0 || n_layers > 1024) throw Error("checkpoint has an implausible layer count");
  std::vector<DenseLayer> layers;
  for (std::uint32_t k = 0; k < n_layers; ++k) {
    const std::uint32_t in_dim = binio::read_u32(in);
    const std::uint32_t out_dim = binio::read_u32(in);
    const int kind = in.get();
    if (kind < 0 || kind > 2) throw Error("checkpoint has an unknown activation");
    Activation act{static_cast<Activation::Kind>(kind), binio::read_f64(in)};
    Matrix2 w(out_dim, in_dim);
    for (double& v : w.values()) v = binio::read_f64(in);
    std::vector<double> b(out_dim);
    for (double& v : b) v = binio::read_f64(in);
    layers.emplace_back(std::move(w), std::move(b), act);
  }
  return Mlp(std::move(layers));
}

void save_mlp(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(kMlpMagic, sizeof kMlpMagic);
  binio::write_u32(out, kMlpFormatVersion);
  write_mlp_payload(out, net);
}

Mlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DependencyError("missing checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMlpMagic, sizeof magic) != 0) {
    throw Error(path.string() + " is not a network checkpoint");
  }
  const std::uint32_t version = binio::read_u32(in);
  if (version != kMlpFormatVersion) {
    throw Error("unsupported network checkpoint version " + std::to_string(version));
  }
  return read_mlp_payload(in);
}

}  // namespace ipman
