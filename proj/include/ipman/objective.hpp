#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipman/random.hpp"
#include "ipman/region.hpp"

namespace ipman {

// Ground-truth minimizers of an objective over its region.
struct OptimalSet {
  enum class Kind { Points, Segment };

  Kind kind = Kind::Points;
  // Points: every minimizer. Segment: the two endpoints.
  std::vector<std::vector<double>> points;
  double optimal_value = 0.0;

  static OptimalSet of_points(std::vector<std::vector<double>> pts, double value);
  static OptimalSet segment(std::vector<double> a, std::vector<double> b, double value);

  // Exact Euclidean distance from x to the set.
  double distance(std::span<const double> x) const;
};

class Objective {
 public:
  using EvalFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

  Objective(std::string name, std::size_t dimension, EvalFn eval, GradFn grad);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }

  double eval(std::span<const double> x) const;
  std::vector<double> grad(std::span<const double> x) const;
  void grad_into(std::span<const double> x, std::span<double> out) const;

  const std::optional<OptimalSet>& optimal_set() const noexcept { return optimal_; }
  // Attaches ground truth after checking that every represented point lies in
  // `region` and attains the optimal value to 1e-9.
  Objective& with_optimal_set(OptimalSet set, const Region& region);

 private:
  std::string name_;
  std::size_t dimension_;
  EvalFn eval_;
  GradFn grad_;
  std::optional<OptimalSet> optimal_;
};

// f(x) = c . x. The default c = (1, 0) carries the L-shape optimal segment.
Objective make_linear(std::vector<double> coeffs = {1.0, 0.0});
// f(x) = |x - center|^2. Default center (5, 11).
Objective make_quadratic(std::vector<double> center = {5.0, 11.0});
// f(x) = x1 x2 - 4 x1 - 4 x2.
Objective make_bilinear();
// f(x) = (a - x1)^2 + b (x2 - x1^2)^2 with a = 3.5, b = 100.
Objective make_rosenbrock(double a = 3.5, double b = 100.0);
// f(x) = 0.
Objective make_zero(std::size_t dimension);

// f(x) = sum_i c_i x_i + ||x - x_hat||_2, subgradient 0 at x = x_hat.
Objective make_toy_dose(const ToyDoseSpec& spec, std::vector<double> penalties,
                        std::vector<double> prescription);
// c = 1 on urethra and bladder, `healthy` on unlabeled voxels, 0 on tumor.
std::vector<double> default_toy_penalties(const ToyDoseSpec& spec, double organ = 1.0,
                                          double healthy = 0.25);
// P on tumor voxels, 0 elsewhere.
std::vector<double> toy_prescription(const ToyDoseSpec& spec);

// Largest norm-wise relative error between the analytic gradient and central
// differences at random points of `box`.
double grad_check(const Objective& f, const Box& box, std::size_t n_trials, RandomStream& rng,
                  double step = 1e-5);

}  // namespace ipman
