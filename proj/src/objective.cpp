#include "ipman/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipman/errors.hpp"

namespace ipman {

// --- OptimalSet ------------------------------------------------------------

OptimalSet OptimalSet::of_points(std::vector<std::vector<double>> pts, double value) {
  if (pts.empty()) throw ConfigError("optimal set needs at least one point");
  return {Kind::Points, std::move(pts), value};
}

OptimalSet OptimalSet::segment(std::vector<double> a, std::vector<double> b, double value) {
  if (a.size() != b.size()) throw ShapeError("segment endpoints differ in dimension");
  return {Kind::Segment, {std::move(a), std::move(b)}, value};
}

double OptimalSet::distance(std::span<const double> x) const {
  auto dist = [&](const std::vector<double>& p) {
    if (p.size() != x.size()) throw ShapeError("point dimension does not match the optimal set");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - p[i]) * (x[i] - p[i]);
    return std::sqrt(s);
  };
  if (kind == Kind::Points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, dist(p));
    return best;
  }
  const auto& a = points[0];
  const auto& b = points[1];
  if (a.size() != x.size()) throw ShapeError("point dimension does not match the optimal set");
  double len2 = 0.0;
  double proj = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    len2 += (b[i] - a[i]) * (b[i] - a[i]);
    proj += (x[i] - a[i]) * (b[i] - a[i]);
  }
  const double t = len2 > 0.0 ? std::clamp(proj / len2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double q = a[i] + t * (b[i] - a[i]);
    s += (x[i] - q) * (x[i] - q);
  }
  return std::sqrt(s);
}

// --- Objective -------------------------------------------------------------

Objective::Objective(std::string name, std::size_t dimension, EvalFn eval, GradFn grad)
    : name_(std::move(name)), dimension_(dimension), eval_(std::move(eval)), grad_(std::move(grad)) {}

double Objective::eval(std::span<const double> x) const {
  if (x.size() != dimension_) throw ShapeError(name_ + ": point has the wrong dimension");
  return eval_(x);
}

std::vector<double> Objective::grad(std::span<const double> x) const {
  std::vector<double> g(dimension_);
  grad_into(x, g);
  return g;
}

void Objective::grad_into(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dimension_ || out.size() != dimension_) {
    throw ShapeError(name_ + ": point has the wrong dimension");
  }
  grad_(x, out);
}

Objective& Objective::with_optimal_set(OptimalSet set, const Region& region) {
  for (const auto& p : set.points) {
    if (!region.contains(p)) throw ConfigError(name_ + ": optimal point outside the region");
    if (std::abs(eval(p) - set.optimal_value) > 1e-9) {
      throw ConfigError(name_ + ": optimal point does not attain the optimal value");
    }
  }
  optimal_ = std::move(set);
  return *this;
}

// --- packaged objectives ---------------------------------------------------

Objective make_linear(std::vector<double> coeffs) {
  const bool packaged = coeffs == std::vector<double>{1.0, 0.0};
  const std::size_t n = coeffs.size();
  Objective f(
      "linear", n,
      [coeffs](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += coeffs[i] * x[i];
        return s;
      },
      [coeffs](std::span<const double>, std::span<double> g) {
        std::copy(coeffs.begin(), coeffs.end(), g.begin());
      });
  if (packaged) f.with_optimal_set(OptimalSet::segment({-1.0, 9.0}, {-1.0, 17.0}, -1.0), l_shape());
  return f;
}

Objective make_quadratic(std::vector<double> center) {
  const bool packaged = center == std::vector<double>{5.0, 11.0};
  const std::size_t n = center.size();
  Objective f(
      "quadratic", n,
      [center](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
        return s;
      },
      [center](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * (x[i] - center[i]);
      });
  if (packaged) f.with_optimal_set(OptimalSet::of_points({{5.0, 11.0}}, 0.0), l_shape());
  return f;
}

Objective make_bilinear() {
  Objective f(
      "bilinear", 2,
      [](std::span<const double> x) { return x[0] * x[1] - 4.0 * x[0] - 4.0 * x[1]; },
      [](std::span<const double> x, std::span<double> g) {
        g[0] = x[1] - 4.0;
        g[1] = x[0] - 4.0;
      });
  f.with_optimal_set(OptimalSet::of_points({{-1.0, 17.0}, {17.0, -1.0}}, -81.0), l_shape());
  return f;
}

Objective make_rosenbrock(double a, double b) {
  Objective f(
      "rosenbrock", 2,
      [a, b](std::span<const double> x) {
        const double r = x[1] - x[0] * x[0];
        return (a - x[0]) * (a - x[0]) + b * r * r;
      },
      [a, b](std::span<const double> x, std::span<double> g) {
        const double r = x[1] - x[0] * x[0];
        g[0] = -2.0 * (a - x[0]) - 4.0 * b * x[0] * r;
        g[1] = 2.0 * b * r;
      });
  if (a == 3.5 && b == 100.0) {
    f.with_optimal_set(OptimalSet::of_points({{3.5, 12.25}}, 0.0), l_shape());
  }
  return f;
}

Objective make_zero(std::size_t dimension) {
  return Objective(
      "zero", dimension, [](std::span<const double>) { return 0.0; },
      [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); });
}

std::vector<double> default_toy_penalties(const ToyDoseSpec& spec, double organ, double healthy) {
  std::vector<double> c(spec.n_voxels, 0.0);
  for (auto i : spec.unlabeled()) c[i] = healthy;
  for (auto i : spec.urethra) c[i] = organ;
  for (auto i : spec.bladder) c[i] = organ;
  return c;
}

std::vector<double> toy_prescription(const ToyDoseSpec& spec) {
  std::vector<double> xhat(spec.n_voxels, 0.0);
  for (auto i : spec.tumor) xhat[i] = spec.prescription;
  return xhat;
}

Objective make_toy_dose(const ToyDoseSpec& spec, std::vector<double> penalties,
                        std::vector<double> prescription) {
  spec.validate();
  if (penalties.size() != spec.n_voxels || prescription.size() != spec.n_voxels) {
    throw ShapeError("toy dose: penalty and prescription vectors must have n_voxels entries");
  }
  for (double c : penalties) {
    if (c < 0.0) throw ConfigError("toy dose: penalties must be non-negative");
  }
  for (auto i : spec.tumor) {
    if (penalties[i] != 0.0) throw ConfigError("toy dose: tumor voxels carry no penalty");
  }
  return Objective(
      "toy_dose", spec.n_voxels,
      [c = penalties, xhat = prescription](std::span<const double> x) {
        double lin = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          lin += c[i] * x[i];
          sq += (x[i] - xhat[i]) * (x[i] - xhat[i]);
        }
        return lin + std::sqrt(sq);
      },
      [c = penalties, xhat = prescription](std::span<const double> x, std::span<double> g) {
        double sq = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) sq += (x[i] - xhat[i]) * (x[i] - xhat[i]);
        const double norm = std::sqrt(sq);
        for (std::size_t i = 0; i < x.size(); ++i) {
          g[i] = c[i] + (norm > 0.0 ? (x[i] - xhat[i]) / norm : 0.0);
        }
      });
}

double grad_check(const Objective& f, const Box& box, std::size_t n_trials, RandomStream& rng,
                  double step) {
  if (n_trials == 0) throw ConfigError("grad_check needs at least one trial");
  const std::size_t n = f.dimension();
  if (box.dimension() != n) throw ShapeError("grad_check: box dimension mismatch");
  double worst = 0.0;
  std::vector<double> x(n);
  std::vector<double> fd(n);
  for (std::size_t t = 0; t < n_trials; ++t) {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
    const std::vector<double> g = f.grad(x);
    for (std::size_t i = 0; i < n; ++i) {
      const double saved = x[i];
      x[i] = saved + step;
      const double up = f.eval(x);
      x[i] = saved - step;
      const double down = f.eval(x);
      x[i] = saved;
      fd[i] = (up - down) / (2.0 * step);
    }
    double diff = 0.0;
    double ga = 0.0;
    double gn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff += (g[i] - fd[i]) * (g[i] - fd[i]);
      ga += g[i] * g[i];
      gn += fd[i] * fd[i];
    }
    const double scale = std::max({std::sqrt(ga), std::sqrt(gn), 1e-12});
    worst = std::max(worst, std::sqrt(diff) / scale);
  }
  return worst;
}

}  // namespace ipman
