#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "ipman/errors.hpp"
#include "ipman/gan.hpp"
#include "ipman/loss.hpp"

using namespace ipman;

namespace {

GanConfig small_config() {
  GanConfig cfg;
  cfg.latent_dim = 4;
  cfg.hidden_width = 32;
  cfg.batch_size = 64;
  cfg.total_iterations = 40;
  cfg.snapshot_every = 0;
  cfg.disc_adam.learning_rate = 1e-3;
  cfg.gen_adam.learning_rate = 1e-3;
  return cfg;
}

Matrix2 uniform_column(std::size_t n, double lo, double hi, RandomStream& rng) {
  Matrix2 m(n, 1);
  for (std::size_t i = 0; i < n; ++i) m(i, 0) = rng.uniform(lo, hi);
  return m;
}

Matrix2 outside_unit_interval(std::size_t n, RandomStream& rng) {
  Matrix2 m(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform(0, 4);
    m(i, 0) = u < 2 ? u - 2 : u - 1;  // [-2, 0) or [1, 3)
  }
  return m;
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Generator whose output is the constant `point` regardless of the latent draw.
GanModel constant_generator(std::vector<double> point) {
  RandomStream rng(1);
  GanModel m = make_gan_model(point.size(), Scaling::identity(point.size()), small_config(), rng);
  DenseLayer& last = m.generator.layer(m.generator.num_layers() - 1);
  for (double& w : last.weight.values()) w = 0.0;
  last.bias = point;
  return m;
}

}  // namespace

TEST_CASE("discriminator fit to fixed histograms approaches p_f / (p_f + p_g)") {
  // Five atoms with known probabilities under p_f and p_g; the expected BCE
  // is minimized exactly, so the optimum is the closed form ratio.
  const std::vector<double> pf = {0.10, 0.20, 0.40, 0.20, 0.10};
  const std::vector<double> pg = {0.30, 0.30, 0.10, 0.10, 0.20};
  Matrix2 atoms(5, 1);
  for (std::size_t k = 0; k < 5; ++k) atoms(k, 0) = -1.0 + 0.5 * static_cast<double>(k);

  RandomStream rng(17);
  const std::size_t widths[] = {1, 32, 1};
  Mlp d = Mlp::make(widths, Activation::leaky_relu(0.2), Activation::sigmoid(), rng);
  AdamSettings s;
  s.learning_rate = 3e-3;
  s.beta1 = 0.9;
  AdamState opt = AdamState::for_parameters(s, d.parameters());
  for (int it = 0; it < 4000; ++it) {
    const Matrix2 p = d.forward(atoms);
    Matrix2 up(5, 1);
    for (std::size_t k = 0; k < 5; ++k) up(k, 0) = -pf[k] / p(k, 0) + pg[k] / (1.0 - p(k, 0));
    d.backward(up);
    opt.step(d.parameters(), d.gradients());
  }
  const Matrix2 p = d.predict(atoms);
  double worst = 0.0;
  for (std::size_t k = 0; k < 5; ++k) worst = std::max(worst, std::abs(p(k, 0) - pf[k] / (pf[k] + pg[k])));
  CHECK(worst <= 0.05);
}

TEST_CASE("1-D sanity: feasible points score above far infeasible ones") {
  RandomStream data(3);
  const Matrix2 feasible = uniform_column(2000, 0, 1, data);
  const Matrix2 infeasible = outside_unit_interval(2000, data);
  GanConfig cfg = small_config();
  cfg.total_iterations = 600;
  cfg.injection_start_fraction = 0.2;
  RandomStream rng(4);
  const Stage1Result r = train_stage1(feasible, infeasible, cfg, rng);

  RandomStream held(5);
  const auto in = r.model.score(uniform_column(500, 0, 1, held));
  const auto far = r.model.score(uniform_column(500, 2, 3, held));
  CHECK(mean(in) - mean(far) >= 0.3);

  for (const auto& row : r.log) {
    REQUIRE(row.mean_d_real > 0.0);
    REQUIRE(row.mean_d_real < 1.0);
    REQUIRE(row.mean_d_fake > 0.0);
    REQUIRE(row.mean_d_fake < 1.0);
  }
  CHECK(r.log.size() == cfg.total_iterations);
}

TEST_CASE("injection schedule and the vanilla loop") {
  RandomStream data(6);
  const Matrix2 feasible = uniform_column(500, 0, 1, data);
  const Matrix2 infeasible = outside_unit_interval(500, data);

  GanConfig cfg = small_config();
  cfg.injection_start_fraction = 0.5;
  cfg.injection_replace_fraction = 0.5;
  RandomStream r1(7);
  const auto with = train_stage1(feasible, infeasible, cfg, r1);
  for (const auto& row : with.log) {
    if (row.iteration < cfg.total_iterations / 2) CHECK(row.injected == 0);
    else CHECK(row.injected > 0);
  }

  cfg.injection_replace_fraction = 0.0;
  RandomStream r2(7);
  const auto vanilla = train_stage1(feasible, infeasible, cfg, r2);
  for (const auto& row : vanilla.log) CHECK(row.injected == 0);

  // The infeasible set is unused, so its order cannot matter.
  Matrix2 reversed(infeasible.rows(), 1);
  for (std::size_t i = 0; i < infeasible.rows(); ++i) reversed(i, 0) = infeasible(infeasible.rows() - 1 - i, 0);
  RandomStream r3(7);
  const auto vanilla2 = train_stage1(feasible, reversed, cfg, r3);
  CHECK(vanilla2.model.generator.same_parameters(vanilla.model.generator));
  CHECK(vanilla2.model.discriminator.same_parameters(vanilla.model.discriminator));

  // Without injection no infeasible data is needed at all.
  RandomStream r4(7);
  CHECK_NOTHROW(train_stage1(feasible, Matrix2(0, 1), cfg, r4));
  cfg.injection_replace_fraction = 0.5;
  RandomStream r5(7);
  CHECK_THROWS_AS(train_stage1(feasible, Matrix2(0, 1), cfg, r5), ConfigError);
}

TEST_CASE("same seed, same parameters") {
  const Region region = l_shape();
  SamplerConfig sc;
  RandomStream d1(8);
  const Matrix2 f = sample_feasible(region, sc, 1000, d1);
  const Matrix2 inf = sample_infeasible(region, sc, 1000, d1);
  RandomStream a(9), b(9);
  const auto ra = train_stage1(f, inf, small_config(), a);
  const auto rb = train_stage1(f, inf, small_config(), b);
  CHECK(ra.model.generator.same_parameters(rb.model.generator));
  CHECK(ra.model.discriminator.same_parameters(rb.model.discriminator));
  RandomStream c(10);
  const auto rc = train_stage1(f, inf, small_config(), c);
  CHECK_FALSE(rc.model.generator.same_parameters(ra.model.generator));
}

TEST_CASE("config validation") {
  GanConfig cfg;
  cfg.disc_updates_per_gen_update = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = GanConfig{};
  cfg.injection_replace_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("auc") {
  const std::vector<double> c(20, 0.5);
  CHECK(auc_from_scores(c, c) == 0.5);
  const std::vector<double> ones(10, 1.0), zeros(15, 0.0);
  CHECK(auc_from_scores(ones, zeros) == 1.0);
  CHECK(auc_from_scores(zeros, ones) == 0.0);
  CHECK(auc_from_scores(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<double>{0.2, 0.3, 0.6, 0.05}) ==
        doctest::Approx(11.0 / 16.0));

  // A discriminator with zeroed output layer scores 0.5 everywhere.
  GanModel m = constant_generator({5, 11});
  DenseLayer& last = m.discriminator.layer(m.discriminator.num_layers() - 1);
  for (double& w : last.weight.values()) w = 0.0;
  last.bias.assign(last.bias.size(), 0.0);
  RandomStream rng(11);
  CHECK(discriminator_auc(m, rng.normal_matrix(50, 2), rng.normal_matrix(60, 2)) == 0.5);
}

TEST_CASE("coverage report") {
  const Region region = l_shape();
  RandomStream rng(12);
  const auto c = coverage_report(constant_generator({5, 11}), region, 200, rng);
  CHECK(c.n_samples == 200);
  CHECK(c.fraction_feasible == 1.0);
  CHECK(c.component_hits == std::vector<std::size_t>{200, 0});
  CHECK_FALSE(c.all_components_hit);

  const auto m = coverage_of_points(Matrix2::from_rows({{0, 12}, {12, 0}, {0, 0}, {-5, -5}}), region);
  CHECK(m.fraction_feasible == 0.5);
  CHECK(m.all_components_hit);

  RandomStream init(13);
  const GanModel fresh = make_gan_model(2, Scaling::fit(sample_feasible(region, SamplerConfig{}, 500, init)),
                                        small_config(), init);
  const auto u = coverage_report(fresh, region, 300, rng);
  CHECK(u.fraction_feasible >= 0.0);
  CHECK(u.fraction_feasible <= 1.0);
}

TEST_CASE("scaling and checkpoint round trip") {
  const Matrix2 data = Matrix2::from_rows({{-1, 3}, {17, 5}, {4, 9}});
  const Scaling s = Scaling::fit(data);
  CHECK(s.center == std::vector<double>{8, 6});
  CHECK(s.half_width == std::vector<double>{9, 3});
  CHECK(s.from_unit(s.to_unit(data)) == data);

  RandomStream rng(14);
  const GanModel m = make_gan_model(2, s, small_config(), rng);
  const auto path = std::filesystem::temp_directory_path() / "ipman_test_gan.ckpt";
  save_gan(path, m);
  const GanModel back = load_gan(path);
  std::filesystem::remove(path);
  CHECK(back.scaling == m.scaling);
  CHECK(back.generator.same_parameters(m.generator));
  CHECK(back.discriminator.same_parameters(m.discriminator));
  const Matrix2 z = rng.normal_matrix(7, m.latent_dim());
  CHECK(back.generate(z) == m.generate(z));
  CHECK_THROWS_AS(load_gan(path), DependencyError);
}
