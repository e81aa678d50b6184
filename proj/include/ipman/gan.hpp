#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "ipman/adam.hpp"
#include "ipman/matrix.hpp"
#include "ipman/mlp.hpp"
#include "ipman/random.hpp"
#include "ipman/region.hpp"

namespace ipman {

// Fixed affine map between problem coordinates and the unit cube the networks
// see: unit = (x - center) / half_width.
struct Scaling {
  std::vector<double> center;
  std::vector<double> half_width;

  static Scaling identity(std::size_t dim);
  // Centre and half-range of the data, per column.
  static Scaling fit(const Matrix2& data);

  std::size_t dimension() const noexcept { return center.size(); }
  Matrix2 to_unit(const Matrix2& x) const;
  Matrix2 from_unit(const Matrix2& u) const;

  bool operator==(const Scaling&) const = default;
};

struct GanConfig {
  std::size_t latent_dim = 8;
  std::size_t hidden_width = 64;
  double leaky_slope = 0.2;
  std::size_t batch_size = 128;
  std::size_t total_iterations = 4000;
  std::size_t disc_updates_per_gen_update = 10;
  // Injection starts once this fraction of the iterations has elapsed ...
  double injection_start_fraction = 0.5;
  // ... and replaces this fraction of each fake minibatch with infeasible samples.
  double injection_replace_fraction = 0.5;
  AdamSettings disc_adam{};
  AdamSettings gen_adam{};
  // AUC snapshot cadence in iterations; 0 disables snapshots.
  std::size_t snapshot_every = 500;

  void validate() const;
  bool operator==(const GanConfig&) const = default;
};

struct GanModel {
  Scaling scaling;
  Mlp generator;      // latent -> unit coordinates, identity output
  Mlp discriminator;  // unit coordinates -> (0, 1), sigmoid output

  std::size_t latent_dim() const { return generator.input_dim(); }
  std::size_t point_dim() const { return generator.output_dim(); }

  // Generator draws in problem coordinates.
  Matrix2 sample(std::size_t n, RandomStream& rng) const;
  Matrix2 generate(const Matrix2& latent) const;
  // Discriminator scores of problem-coordinate points.
  std::vector<double> score(const Matrix2& points) const;
};

GanModel make_gan_model(std::size_t point_dim, Scaling scaling, const GanConfig& cfg,
                        RandomStream& rng);

struct Stage1LogRow {
  std::size_t iteration = 0;
  double disc_loss = 0.0;
  double gen_loss = 0.0;
  std::size_t injected = 0;  // infeasible rows placed in fake minibatches this iteration
  double mean_d_real = 0.0;
  double mean_d_fake = 0.0;
  double auc_snapshot = 0.0;  // NaN when no snapshot was taken
};

struct Stage1Result {
  GanModel model;
  std::vector<Stage1LogRow> log;
};

// Alternates `disc_updates_per_gen_update` discriminator steps with one
// non-saturating generator step.
Stage1Result train_stage1(const Matrix2& feasible, const Matrix2& infeasible,
                          const GanConfig& cfg, RandomStream& rng);

// Area under the ROC curve with `positive` labelled 1; ties count one half.
double auc_from_scores(std::span<const double> positive, std::span<const double> negative);
double discriminator_auc(const GanModel& model, const Matrix2& held_out_feasible,
                         const Matrix2& held_out_infeasible);

struct CoverageReport {
  std::size_t n_samples = 0;
  double fraction_feasible = 0.0;
  std::vector<std::size_t> component_hits;  // per box, for box unions
  bool all_components_hit = false;
};

CoverageReport coverage_of_points(const Matrix2& points, const Region& region);
CoverageReport coverage_report(const GanModel& model, const Region& region, std::size_t n_samples,
                               RandomStream& rng);

// Checkpoint: "IPMANGAN" | u32 version | u32 dim | f64 center[dim] |
// f64 half_width[dim] | generator payload | discriminator payload.
inline constexpr std::uint32_t kGanFormatVersion = 1;
void save_gan(const std::filesystem::path& path, const GanModel& model);
GanModel load_gan(const std::filesystem::path& path);

}  // namespace ipman
