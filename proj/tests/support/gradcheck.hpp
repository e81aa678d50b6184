#pragma once

// Central-difference oracles shared by the unit tests and the acceptance
// suite. Nothing here calls the library's own gradient checker.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ipman/loss.hpp"
#include "ipman/mlp.hpp"
#include "ipman/objective.hpp"
#include "ipman/random.hpp"

namespace gradcheck {

inline constexpr double kStep = 1e-5;

inline double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

// Random small net: in -> hidden -> out, LeakyReLU hidden layer, output
// activation alternating between sigmoid and identity.
inline ipman::Mlp random_net(ipman::RandomStream& rng, std::size_t trial) {
  const std::size_t in = 1 + rng.index(4);
  const std::size_t hidden = 2 + rng.index(7);
  const std::size_t out = 1 + rng.index(3);
  const std::size_t widths[] = {in, hidden, out};
  const auto output = trial % 2 ? ipman::Activation::sigmoid() : ipman::Activation::identity();
  return ipman::Mlp::make(widths, ipman::Activation::leaky_relu(0.2), output, rng);
}

// L(net, x) = sum(forward(x) .* w) for a fixed random weighting w.
inline double weighted_output(const ipman::Mlp& net, const ipman::Matrix2& x,
                              const ipman::Matrix2& w) {
  const ipman::Matrix2 y = net.predict(x);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y.values()[i] * w.values()[i];
  return s;
}

struct NetTrial {
  double param_error = 0.0;
  double input_error = 0.0;
};

inline NetTrial mlp_trial(ipman::RandomStream& rng, std::size_t trial) {
  ipman::Mlp net = random_net(rng, trial);
  const std::size_t batch = 3;
  const ipman::Matrix2 x = rng.normal_matrix(batch, net.input_dim());
  const ipman::Matrix2 w = rng.normal_matrix(batch, net.output_dim());

  net.forward(x);
  const ipman::Matrix2 dx = net.backward(w);
  std::vector<double> analytic_params;
  for (auto g : net.gradients()) analytic_params.insert(analytic_params.end(), g.begin(), g.end());

  std::vector<double> numeric_params;
  for (auto p : net.parameters()) {
    for (double& v : p) {
      const double keep = v;
      v = keep + kStep;
      const double up = weighted_output(net, x, w);
      v = keep - kStep;
      const double down = weighted_output(net, x, w);
      v = keep;
      numeric_params.push_back((up - down) / (2 * kStep));
    }
  }

  std::vector<double> numeric_input;
  ipman::Matrix2 xp = x;
  for (double& v : xp.values()) {
    const double keep = v;
    v = keep + kStep;
    const double up = weighted_output(net, xp, w);
    v = keep - kStep;
    const double down = weighted_output(net, xp, w);
    v = keep;
    numeric_input.push_back((up - down) / (2 * kStep));
  }
  return {rel_error(analytic_params, numeric_params), rel_error(dx.storage(), numeric_input)};
}

inline double bce_trial(ipman::RandomStream& rng) {
  const std::size_t n = 1 + rng.index(16);
  std::vector<double> p(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = rng.uniform(0.02, 0.98);
    y[i] = rng.index(2) ? 1.0 : 0.0;
  }
  const ipman::LossResult r = ipman::bce_loss(p, y);
  std::vector<double> numeric(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double keep = p[i];
    p[i] = keep + kStep;
    const double up = ipman::bce_loss(p, y).value;
    p[i] = keep - kStep;
    const double down = ipman::bce_loss(p, y).value;
    p[i] = keep;
    numeric[i] = (up - down) / (2 * kStep);
  }
  return rel_error(r.grad, numeric);
}

// x drawn uniformly from [lo, hi]^n.
inline double objective_trial(const ipman::Objective& f, double lo, double hi,
                              ipman::RandomStream& rng) {
  std::vector<double> x(f.dimension());
  for (double& v : x) v = rng.uniform(lo, hi);
  const std::vector<double> analytic = f.grad(x);
  std::vector<double> numeric(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + kStep;
    const double up = f.eval(x);
    x[i] = keep - kStep;
    const double down = f.eval(x);
    x[i] = keep;
    numeric[i] = (up - down) / (2 * kStep);
  }
  return rel_error(analytic, numeric);
}

}  // namespace gradcheck
