#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ipman/adam.hpp"
#include "ipman/gan.hpp"
#include "ipman/objective.hpp"
#include "ipman/region.hpp"

namespace ipman {

// B(x) = -log D(x) over a frozen copy of a trained discriminator.
class Barrier {
 public:
  explicit Barrier(const GanModel& model, double clamp_floor = kSigmoidClamp);

  // -log of the score clamped to [floor, 1 - floor].
  static double from_score(double d, double clamp_floor = kSigmoidClamp);

  double value(std::span<const double> x) const;
  std::vector<double> values(const Matrix2& points) const;
  double log_d(std::span<const double> x) const { return -value(x); }
  double clamp_floor() const noexcept { return floor_; }

 private:
  Scaling scaling_;
  Mlp discriminator_;
  double floor_;
};

double barrier_value(const Barrier& b, std::span<const double> x);

// f(x) + lambda * (delta + B(x)).
double modified_objective(const Objective& f, const Barrier& b, double lambda, double delta,
                          std::span<const double> x);

struct BarrierConfig {
  double lambda0 = 0.05;
  double mu = 1.01;
  std::size_t outer_iterations = 100;
  std::size_t inner_steps = 200;
  std::size_t batch_size = 256;
  // Stop once the mean objective over the last `window` outer iterations
  // differs from the previous window by less than `tolerance` (relative).
  std::size_t window = 5;
  double tolerance = 1e-3;
  // Fixed latent batch used for the per-outer-iteration log.
  std::size_t eval_samples = 1024;
  AdamSettings gen_adam{};

  // Algorithm-level checks: lambda0 > 0, mu >= 1.
  void validate() const;
  // Configuration-file checks: additionally mu > 1.
  void validate_strict() const;
  bool operator==(const BarrierConfig&) const = default;
};

struct Stage2LogRow {
  std::size_t outer_iter = 0;
  double lambda = 0.0;
  double mean_f = 0.0;
  double mean_barrier = 0.0;
  double coverage = 0.0;
};

struct Stage2Result {
  std::vector<Stage2LogRow> log;
  bool converged = false;
  // Barrier weight used in the last executed outer iteration.
  double final_lambda = 0.0;
  std::vector<std::string> warnings;
};

// Retrains the generator on mean f(G(z)) + lambda * B(G(z)) with the
// discriminator frozen; lambda grows by `mu` after every outer iteration.
Stage2Result train_stage2(GanModel& model, const Objective& f, const Region& region,
                          const BarrierConfig& cfg, RandomStream& rng);

// --- epsilon certificate ---------------------------------------------------

struct CertificateRequest {
  enum class Mode { FromLambda, FromEpsilon };
  Mode mode = Mode::FromLambda;
  double lambda = 0.0;   // FromLambda: the barrier weight reached in training
  double epsilon = 0.0;  // FromEpsilon: the target optimality gap
  // delta_tilde = min(log D(x_tilde), margin_m) - delta_gap
  double margin_m = -20.0;
  double delta_gap = 1.0;
};

struct Certificate {
  std::vector<double> x_tilde;
  double f_tilde = 0.0;
  double log_d = 0.0;
  double lambda_tilde = 0.0;
  double delta_tilde = 0.0;
  double epsilon = 0.0;
  bool feasible_flag = false;
  // False when the candidate was infeasible and no certificate was issued.
  bool accepted = false;
};

// lambda = -epsilon / (delta - log_d)
double certificate_multiplier(double epsilon, double log_d, double delta);
// epsilon = lambda * (log_d - delta)
double certificate_epsilon(double lambda, double log_d, double delta);

// Certifies a single candidate. Infeasible candidates are refused (accepted = false).
Certificate certify_point(std::vector<double> x, double f_x, double log_d, bool feasible,
                          const CertificateRequest& request);

// Picks the feasible generated sample with the smallest f and certifies it.
// Throws CertificateError when none of the n_samples draws is feasible.
Certificate compute_certificate(const GanModel& model, const Objective& f, const Region& region,
                                std::size_t n_samples, RandomStream& rng,
                                const CertificateRequest& request);

// f(x_tilde) - epsilon <= f_star <= f(x_tilde), with a small absolute slack.
bool certificate_bound_holds(const Certificate& c, double f_star, double slack = 1e-9);

}  // namespace ipman
