#include "ipman/gan.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "ipman/errors.hpp"
#include "ipman/loss.hpp"

namespace ipman {

// --- Scaling ---------------------------------------------------------------

Scaling Scaling::identity(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

Scaling Scaling::fit(const Matrix2& data) {
  if (data.empty()) throw ShapeError("cannot fit a scaling to an empty dataset");
  Scaling s;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    double lo = data(0, c);
    double hi = lo;
    for (std::size_t r = 1; r < data.rows(); ++r) {
      lo = std::min(lo, data(r, c));
      hi = std::max(hi, data(r, c));
    }
    s.center.push_back(0.5 * (lo + hi));
    s.half_width.push_back(hi > lo ? 0.5 * (hi - lo) : 1.0);
  }
  return s;
}

Matrix2 Scaling::to_unit(const Matrix2& x) const {
  if (x.cols() != dimension()) throw ShapeError("scaling dimension mismatch");
  Matrix2 u(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) u(r, c) = (x(r, c) - center[c]) / half_width[c];
  }
  return u;
}

Matrix2 Scaling::from_unit(const Matrix2& u) const {
  if (u.cols() != dimension()) throw ShapeError("scaling dimension mismatch");
  Matrix2 x(u.rows(), u.cols());
  for (std::size_t r = 0; r < u.rows(); ++r) {
    for (std::size_t c = 0; c < u.cols(); ++c) x(r, c) = center[c] + half_width[c] * u(r, c);
  }
  return x;
}

// --- config / model --------------------------------------------------------

void GanConfig::validate() const {
  if (latent_dim == 0 || hidden_width == 0) throw ConfigError("gan: widths must be positive");
  if (batch_size == 0) throw ConfigError("gan: batch_size must be positive");
  if (disc_updates_per_gen_update < 1) {
    throw ConfigError("gan: disc_updates_per_gen_update must be >= 1");
  }
  if (!(injection_replace_fraction >= 0.0 && injection_replace_fraction <= 1.0)) {
    throw ConfigError("gan: injection replace_fraction must lie in [0, 1]");
  }
  if (!(injection_start_fraction >= 0.0 && injection_start_fraction <= 1.0)) {
    throw ConfigError("gan: injection start_fraction must lie in [0, 1]");
  }
  for (const auto* a : {&disc_adam, &gen_adam}) {
    if (!(a->learning_rate > 0.0)) throw ConfigError("gan: learning rates must be positive");
    if (!(a->beta1 >= 0.0 && a->beta1 < 1.0 && a->beta2 >= 0.0 && a->beta2 < 1.0)) {
      throw ConfigError("gan: Adam betas must lie in [0, 1)");
    }
  }
}

GanModel make_gan_model(std::size_t point_dim, Scaling scaling, const GanConfig& cfg,
                        RandomStream& rng) {
  const Activation hidden = Activation::leaky_relu(cfg.leaky_slope);
  const std::size_t g_widths[] = {cfg.latent_dim, cfg.hidden_width, point_dim};
  const std::size_t d_widths[] = {point_dim, cfg.hidden_width, 1};
  GanModel m;
  m.scaling = std::move(scaling);
  m.generator = Mlp::make(g_widths, hidden, Activation::identity(), rng);
  m.discriminator = Mlp::make(d_widths, hidden, Activation::sigmoid(), rng);
  return m;
}

Matrix2 GanModel::sample(std::size_t n, RandomStream& rng) const {
  return generate(rng.normal_matrix(n, latent_dim()));
}

Matrix2 GanModel::generate(const Matrix2& latent) const {
  return scaling.from_unit(generator.predict(latent));
}

std::vector<double> GanModel::score(const Matrix2& points) const {
  const Matrix2 d = discriminator.predict(scaling.to_unit(points));
  return d.storage();
}

// --- training --------------------------------------------------------------

Stage1Result train_stage1(const Matrix2& feasible, const Matrix2& infeasible,
                          const GanConfig& cfg, RandomStream& rng) {
  cfg.validate();
  if (feasible.empty()) throw ConfigError("stage 1 needs feasible samples");
  const bool inject_enabled = cfg.injection_replace_fraction > 0.0;
  if (inject_enabled && infeasible.empty()) {
    throw ConfigError("stage 1 injection needs infeasible samples");
  }
  if (!infeasible.empty() && infeasible.cols() != feasible.cols()) {
    throw ShapeError("feasible and infeasible samples differ in dimension");
  }

  const std::size_t dim = feasible.cols();
  const std::size_t batch = cfg.batch_size;
  Stage1Result result{make_gan_model(dim, Scaling::fit(feasible), cfg, rng), {}};
  GanModel& model = result.model;
  const Matrix2 real_all = model.scaling.to_unit(feasible);
  const Matrix2 infeasible_all =
      infeasible.empty() ? Matrix2{} : model.scaling.to_unit(infeasible);

  // Fixed probe sets for AUC snapshots.
  const Matrix2 probe_pos = feasible.head(512);
  const Matrix2 probe_neg = infeasible.head(512);

  AdamState d_opt = AdamState::for_parameters(cfg.disc_adam, model.discriminator.parameters());
  AdamState g_opt = AdamState::for_parameters(cfg.gen_adam, model.generator.parameters());

  const auto inject_from = static_cast<std::size_t>(
      std::ceil(cfg.injection_start_fraction * static_cast<double>(cfg.total_iterations)));
  const auto n_inject = static_cast<std::size_t>(
      std::floor(cfg.injection_replace_fraction * static_cast<double>(batch)));

  // Label column for a stacked [real; fake] discriminator batch.
  std::vector<double> labels(2 * batch, 0.0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(batch), 1.0);

  result.log.reserve(cfg.total_iterations);
  for (std::size_t it = 0; it < cfg.total_iterations; ++it) {
    const bool injecting = inject_enabled && it >= inject_from;
    Stage1LogRow row;
    row.iteration = it;
    row.auc_snapshot = std::numeric_limits<double>::quiet_NaN();

    double d_loss = 0.0;
    for (std::size_t k = 0; k < cfg.disc_updates_per_gen_update; ++k) {
      const auto real_idx = rng.indices(batch, real_all.rows());
      Matrix2 real = real_all.gather_rows(real_idx);
      Matrix2 fake = model.generator.predict(rng.normal_matrix(batch, cfg.latent_dim));
      if (injecting && n_inject > 0) {
        for (std::size_t r = 0; r < n_inject; ++r) {
          auto src = infeasible_all.row(rng.index(infeasible_all.rows()));
          std::copy(src.begin(), src.end(), fake.row(r).begin());
        }
        row.injected += n_inject;
      }
      const Matrix2 stacked = real.vstack(fake);
      const Matrix2 scores = model.discriminator.forward(stacked);
      LossResult loss = bce_loss(scores.values(), labels);
      // Mean over the stacked batch is half of loss_real + loss_fake.
      d_loss = 2.0 * loss.value;
      model.discriminator.backward(Matrix2(2 * batch, 1, std::move(loss.grad)));
      d_opt.step(model.discriminator.parameters(), model.discriminator.gradients());

      if (k + 1 == cfg.disc_updates_per_gen_update) {
        double sr = 0.0;
        double sf = 0.0;
        for (std::size_t r = 0; r < batch; ++r) {
          sr += scores(r, 0);
          sf += scores(batch + r, 0);
        }
        row.mean_d_real = sr / static_cast<double>(batch);
        row.mean_d_fake = sf / static_cast<double>(batch);
      }
    }

    // Generator step: -log D(G(z)); discriminator parameters are left untouched.
    const Matrix2 z = rng.normal_matrix(batch, cfg.latent_dim);
    const Matrix2 generated = model.generator.forward(z);
    const Matrix2 g_scores = model.discriminator.forward(generated);
    BceBatch g_loss = bce_against(g_scores, 1.0);
    const Matrix2 dx = model.discriminator.backward(g_loss.grad);
    model.generator.backward(dx);
    g_opt.step(model.generator.parameters(), model.generator.gradients());

    row.disc_loss = d_loss;
    row.gen_loss = g_loss.value;
    if (!std::isfinite(row.disc_loss) || !std::isfinite(row.gen_loss)) {
      throw TrainingError("stage 1 loss diverged", it);
    }
    const bool last = it + 1 == cfg.total_iterations;
    if (cfg.snapshot_every > 0 && !probe_neg.empty() && (it % cfg.snapshot_every == 0 || last)) {
      row.auc_snapshot = discriminator_auc(model, probe_pos, probe_neg);
    }
    result.log.push_back(row);
  }
  return result;
}

// --- evaluation ------------------------------------------------------------

double auc_from_scores(std::span<const double> positive, std::span<const double> negative) {
  if (positive.empty() || negative.empty()) throw DomainError("AUC needs both classes");
  struct Entry {
    double score;
    bool pos;
  };
  std::vector<Entry> all;
  all.reserve(positive.size() + negative.size());
  for (double s : positive) all.push_back({s, true});
  for (double s : negative) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.score < b.score; });
  // Mann-Whitney U with mid-ranks for ties.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].pos) rank_sum += mid_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(positive.size());
  const double nn = static_cast<double>(negative.size());
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double discriminator_auc(const GanModel& model, const Matrix2& held_out_feasible,
                         const Matrix2& held_out_infeasible) {
  const auto pos = model.score(held_out_feasible);
  const auto neg = model.score(held_out_infeasible);
  return auc_from_scores(pos, neg);
}

CoverageReport coverage_of_points(const Matrix2& points, const Region& region) {
  if (points.cols() != region.dimension()) throw ShapeError("coverage: dimension mismatch");
  CoverageReport r;
  r.n_samples = points.rows();
  r.component_hits.assign(region.component_count(), 0);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const int c = region.component_of(points.row(i));
    if (c >= 0) {
      ++inside;
      ++r.component_hits[static_cast<std::size_t>(c)];
    }
  }
  r.fraction_feasible = r.n_samples ? static_cast<double>(inside) / static_cast<double>(r.n_samples) : 0.0;
  r.all_components_hit = std::all_of(r.component_hits.begin(), r.component_hits.end(),
                                     [](std::size_t h) { return h > 0; });
  return r;
}

CoverageReport coverage_report(const GanModel& model, const Region& region, std::size_t n_samples,
                               RandomStream& rng) {
  if (n_samples == 0) throw ConfigError("coverage needs at least one sample");
  return coverage_of_points(model.sample(n_samples, rng), region);
}

// --- checkpoint ------------------------------------------------------------

namespace {
constexpr char kGanMagic[8] = {'I', 'P', 'M', 'A', 'N', 'G', 'A', 'N'};
}

void save_gan(const std::filesystem::path& path, const GanModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(kGanMagic, sizeof kGanMagic);
  binio::write_u32(out, kGanFormatVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(model.scaling.dimension()));
  for (double v : model.scaling.center) binio::write_f64(out, v);
  for (double v : model.scaling.half_width) binio::write_f64(out, v);
  write_mlp_payload(out, model.generator);
  write_mlp_payload(out, model.discriminator);
}

GanModel load_gan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DependencyError("missing checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kGanMagic, sizeof magic) != 0) {
    throw Error(path.string() + " is not a GAN checkpoint");
  }
  const std::uint32_t version = binio::read_u32(in);
  if (version != kGanFormatVersion) {
    throw Error("unsupported GAN checkpoint version " + std::to_string(version));
  }
  const std::uint32_t dim = binio::read_u32(in);
  GanModel m;
  m.scaling.center.resize(dim);
  m.scaling.half_width.resize(dim);
  for (double& v : m.scaling.center) v = binio::read_f64(in);
  for (double& v : m.scaling.half_width) v = binio::read_f64(in);
  m.generator = read_mlp_payload(in);
  m.discriminator = read_mlp_payload(in);
  if (m.generator.output_dim() != dim || m.discriminator.input_dim() != dim) {
    throw Error("GAN checkpoint networks do not match the stored dimension");
  }
  return m;
}

}  // namespace ipman
