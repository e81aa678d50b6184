#include "ipman/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipman/errors.hpp"

namespace ipman {

// --- Barrier ---------------------------------------------------------------

Barrier::Barrier(const GanModel& model, double clamp_floor)
    : scaling_(model.scaling), discriminator_(model.discriminator), floor_(clamp_floor) {
  if (!(clamp_floor > 0.0 && clamp_floor < 0.5)) throw ConfigError("barrier clamp floor out of range");
}

double Barrier::from_score(double d, double clamp_floor) {
  return -std::log(std::clamp(d, clamp_floor, 1.0 - clamp_floor));
}

std::vector<double> Barrier::values(const Matrix2& points) const {
  const Matrix2 d = discriminator_.predict(scaling_.to_unit(points));
  std::vector<double> out(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) out[i] = from_score(d(i, 0), floor_);
  return out;
}

double Barrier::value(std::span<const double> x) const {
  Matrix2 m(1, x.size(), std::vector<double>(x.begin(), x.end()));
  return values(m).front();
}

double barrier_value(const Barrier& b, std::span<const double> x) { return b.value(x); }

double modified_objective(const Objective& f, const Barrier& b, double lambda, double delta,
                          std::span<const double> x) {
  if (lambda < 0.0) throw DomainError("lambda must be non-negative");
  const double fx = f.eval(x);
  if (lambda == 0.0) return fx;
  return fx + lambda * (delta + b.value(x));
}

// --- config ----------------------------------------------------------------

void BarrierConfig::validate() const {
  if (!(lambda0 > 0.0)) throw ConfigError("barrier: lambda0 must be > 0");
  if (!(mu >= 1.0)) throw ConfigError("barrier: mu must be >= 1");
  if (batch_size == 0) throw ConfigError("barrier: batch_size must be positive");
  if (window == 0) throw ConfigError("barrier: convergence window must be positive");
  if (eval_samples == 0) throw ConfigError("barrier: eval_samples must be positive");
  if (!(gen_adam.learning_rate > 0.0)) throw ConfigError("barrier: learning rate must be positive");
}

void BarrierConfig::validate_strict() const {
  validate();
  if (!(mu > 1.0)) throw ConfigError("barrier: growth rate mu must be > 1");
}

// --- stage 2 ---------------------------------------------------------------

namespace {

struct Snapshot {
  double mean_f = 0.0;
  double mean_barrier = 0.0;
  double coverage = 0.0;
};

Snapshot evaluate(const GanModel& model, const Mlp& frozen, const Objective& f,
                  const Region& region, const Matrix2& latent) {
  const Matrix2 unit = model.generator.predict(latent);
  const Matrix2 x = model.scaling.from_unit(unit);
  const Matrix2 d = frozen.predict(unit);
  Snapshot s;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    s.mean_f += f.eval(x.row(i));
    s.mean_barrier += Barrier::from_score(d(i, 0));
    inside += region.contains(x.row(i)) ? 1 : 0;
  }
  const double n = static_cast<double>(x.rows());
  s.mean_f /= n;
  s.mean_barrier /= n;
  s.coverage = static_cast<double>(inside) / n;
  return s;
}

double window_mean(const std::vector<Stage2LogRow>& log, std::size_t end, std::size_t window) {
  double s = 0.0;
  for (std::size_t i = end - window; i < end; ++i) s += log[i].mean_f;
  return s / static_cast<double>(window);
}

}  // namespace

Stage2Result train_stage2(GanModel& model, const Objective& f, const Region& region,
                          const BarrierConfig& cfg, RandomStream& rng) {
  cfg.validate();
  if (f.dimension() != model.point_dim() || region.dimension() != model.point_dim()) {
    throw ShapeError("stage 2: objective, region and generator dimensions differ");
  }
  // Private copy: the model's discriminator is never touched.
  Mlp frozen = model.discriminator;
  AdamState opt = AdamState::for_parameters(cfg.gen_adam, model.generator.parameters());
  const Matrix2 eval_latent = rng.normal_matrix(cfg.eval_samples, model.latent_dim());

  const std::size_t batch = cfg.batch_size;
  const std::size_t dim = model.point_dim();
  const auto& half = model.scaling.half_width;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  std::vector<double> g(dim);

  Stage2Result result;
  for (std::size_t outer = 0; outer < cfg.outer_iterations; ++outer) {
    const double lambda = cfg.lambda0 * std::pow(cfg.mu, static_cast<double>(outer));
    for (std::size_t step = 0; step < cfg.inner_steps; ++step) {
      const Matrix2 z = rng.normal_matrix(batch, model.latent_dim());
      const Matrix2 unit = model.generator.forward(z);
      const Matrix2 x = model.scaling.from_unit(unit);
      const Matrix2 d = frozen.forward(unit);

      // d loss / d D for the lambda * -log D term, already averaged.
      Matrix2 d_grad(batch, 1);
      double loss = 0.0;
      for (std::size_t i = 0; i < batch; ++i) {
        const double p = d(i, 0);
        loss += f.eval(x.row(i)) + lambda * Barrier::from_score(p);
        d_grad(i, 0) = -lambda / p * inv_batch;
      }
      if (!std::isfinite(loss)) {
        throw TrainingError("stage 2 loss diverged", outer * cfg.inner_steps + step);
      }
      Matrix2 du = frozen.backward(d_grad);
      for (std::size_t i = 0; i < batch; ++i) {
        f.grad_into(x.row(i), g);
        auto row = du.row(i);
        for (std::size_t c = 0; c < dim; ++c) row[c] += g[c] * half[c] * inv_batch;
      }
      model.generator.backward(du);
      opt.step(model.generator.parameters(), model.generator.gradients());
    }

    const Snapshot snap = evaluate(model, frozen, f, region, eval_latent);
    if (!std::isfinite(snap.mean_f) || !std::isfinite(snap.mean_barrier)) {
      throw TrainingError("stage 2 produced non-finite objective values", outer * cfg.inner_steps);
    }
    result.log.push_back({outer, lambda, snap.mean_f, snap.mean_barrier, snap.coverage});
    result.final_lambda = lambda;
    if (snap.coverage < 0.1) {
      result.warnings.push_back("outer iteration " + std::to_string(outer) +
                                ": generator coverage below 10%");
    }

    const std::size_t done = result.log.size();
    if (done >= 2 * cfg.window) {
      const double cur = window_mean(result.log, done, cfg.window);
      const double prev = window_mean(result.log, done - cfg.window, cfg.window);
      // Stationary, not merely non-improving: while lambda grows the barrier may
      // push f up for a while before the generator settles.
      const double change = std::abs(prev - cur) / std::max(std::abs(prev), 1e-12);
      if (change < cfg.tolerance) {
        result.converged = true;
        break;
      }
    }
  }
  return result;
}

// --- certificate -----------------------------------------------------------

double certificate_multiplier(double epsilon, double log_d, double delta) {
  if (!(delta < log_d)) throw CertificateError("delta must lie strictly below log D(x)");
  return -epsilon / (delta - log_d);
}

double certificate_epsilon(double lambda, double log_d, double delta) {
  if (!(delta < log_d)) throw CertificateError("delta must lie strictly below log D(x)");
  return lambda * (log_d - delta);
}

Certificate certify_point(std::vector<double> x, double f_x, double log_d, bool feasible,
                          const CertificateRequest& request) {
  Certificate c;
  c.x_tilde = std::move(x);
  c.f_tilde = f_x;
  c.log_d = log_d;
  c.feasible_flag = feasible;
  c.delta_tilde = std::min(log_d, request.margin_m) - request.delta_gap;
  if (!feasible) return c;
  if (!(request.delta_gap > 0.0)) throw CertificateError("delta gap must be positive");
  if (request.mode == CertificateRequest::Mode::FromEpsilon) {
    if (!(request.epsilon > 0.0)) throw CertificateError("target epsilon must be positive");
    c.epsilon = request.epsilon;
    c.lambda_tilde = certificate_multiplier(request.epsilon, log_d, c.delta_tilde);
  } else {
    if (!(request.lambda > 0.0)) throw CertificateError("lambda must be positive");
    c.lambda_tilde = request.lambda;
    c.epsilon = certificate_epsilon(request.lambda, log_d, c.delta_tilde);
  }
  if (!(c.lambda_tilde > 0.0) || !(c.epsilon > 0.0)) {
    throw CertificateError("certificate multiplier or epsilon is not positive");
  }
  c.accepted = true;
  return c;
}

Certificate compute_certificate(const GanModel& model, const Objective& f, const Region& region,
                                std::size_t n_samples, RandomStream& rng,
                                const CertificateRequest& request) {
  if (n_samples == 0) throw CertificateError("certificate needs at least one sample");
  const Matrix2 x = model.sample(n_samples, rng);
  std::size_t best = n_samples;
  double best_f = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!region.contains(x.row(i))) continue;
    const double fx = f.eval(x.row(i));
    if (fx < best_f) {
      best_f = fx;
      best = i;
    }
  }
  if (best == n_samples) {
    throw CertificateError("no feasible sample among " + std::to_string(n_samples) + " draws");
  }
  const auto row = x.row(best);
  const Barrier barrier(model);
  return certify_point(std::vector<double>(row.begin(), row.end()), best_f,
                       barrier.log_d(row), true, request);
}

bool certificate_bound_holds(const Certificate& c, double f_star, double slack) {
  return c.accepted && c.f_tilde - c.epsilon <= f_star + slack && f_star <= c.f_tilde + slack;
}

}  // namespace ipman
