#include "ipman/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "ipman/barrier.hpp"
#include "ipman/csv.hpp"
#include "ipman/errors.hpp"
#include "ipman/gan.hpp"
#include "ipman/metrics.hpp"
#include "ipman/oracle.hpp"
#include "ipman/svg.hpp"

namespace ipman {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kPlotFeasiblePoints = 1000;
constexpr std::size_t kLogTail = 5;
constexpr double kModeRadius = 3.0;

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DependencyError("missing file " + path.string());
  return json::parse(in);
}

void require(const fs::path& path) {
  if (!fs::exists(path)) throw DependencyError("missing file " + path.string());
}

RandomStream stage_rng(const ExperimentConfig& cfg, const char* stage) {
  return RandomStream(cfg.seed).fork(stage);
}

json metrics_json(const MetricsReport& m) {
  return {{"delta_f", m.delta_f},      {"var90", m.var90},
          {"delta_x", m.delta_x},      {"n_samples", m.n_samples},
          {"n_feasible", m.n_feasible}, {"trimmed", m.trimmed}};
}

json coverage_json(const CoverageReport& c) {
  return {{"n_samples", c.n_samples},
          {"fraction_feasible", c.fraction_feasible},
          {"component_hits", c.component_hits},
          {"all_components_hit", c.all_components_hit}};
}

double mean_objective(const Matrix2& points, const Objective& f) {
  if (points.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (std::size_t r = 0; r < points.rows(); ++r) s += f.eval(points.row(r));
  return s / static_cast<double>(points.rows());
}

// Ground truth for delta_x: the analytic set when the packaged problem
// carries one, else the oracle's minimizers.
OptimalSet optimal_set_for(const ExperimentConfig& cfg, const Objective& f, const json& oracle) {
  if (cfg.region.kind == RegionSpec::Kind::LShape && f.optimal_set()) return *f.optimal_set();
  std::vector<std::vector<double>> pts;
  if (oracle.contains("argmin_points")) {
    pts = oracle.at("argmin_points").get<std::vector<std::vector<double>>>();
  } else {
    pts.push_back(oracle.at("best_point").get<std::vector<double>>());
  }
  return OptimalSet::of_points(std::move(pts), oracle.at("best_value").get<double>());
}

}  // namespace

RunPaths::RunPaths(const ExperimentConfig& cfg)
    : dir(cfg.output_dir / fmt::format("{}_seed{}", config_hash(cfg), cfg.seed)) {
  config = dir / "config.json";
  feasible = dir / "feasible.csv";
  infeasible = dir / "infeasible.csv";
  stage1_checkpoint = dir / "stage1.ckpt";
  stage1_log = dir / "stage1_log.csv";
  stage1_summary = dir / "stage1.json";
  stage2_checkpoint = dir / "stage2.ckpt";
  stage2_log = dir / "stage2_log.csv";
  stage2_summary = dir / "stage2.json";
  oracle = dir / "oracle.json";
  generated = dir / "generated.csv";
  summary = dir / "summary.json";
  plot = dir / "plot.svg";
}

void run_sample(const ExperimentConfig& cfg) {
  const RunPaths paths(cfg);
  fs::create_directories(paths.dir);
  write_json(paths.config, canonical_json(cfg));
  const Region region = cfg.region.build();
  RandomStream rng = stage_rng(cfg, "sample");
  const Matrix2 feasible = sample_feasible(region, cfg.sampler, rng);
  const Matrix2 infeasible = sample_infeasible(region, cfg.sampler, rng);
  write_csv(paths.feasible, region.coordinate_names(), feasible);
  write_csv(paths.infeasible, region.coordinate_names(), infeasible);
}

json run_stage1(const ExperimentConfig& cfg) {
  const RunPaths paths(cfg);
  const Matrix2 feasible = read_csv(paths.feasible).values;
  const Matrix2 infeasible = read_csv(paths.infeasible).values;
  const Region region = cfg.region.build();

  RandomStream rng = stage_rng(cfg, "stage1");
  const Stage1Result result = train_stage1(feasible, infeasible, cfg.gan, rng);
  save_gan(paths.stage1_checkpoint, result.model);

  Matrix2 log(result.log.size(), 7);
  for (std::size_t i = 0; i < result.log.size(); ++i) {
    const auto& row = result.log[i];
    log(i, 0) = static_cast<double>(row.iteration);
    log(i, 1) = row.disc_loss;
    log(i, 2) = row.gen_loss;
    log(i, 3) = static_cast<double>(row.injected);
    log(i, 4) = row.mean_d_real;
    log(i, 5) = row.mean_d_fake;
    log(i, 6) = row.auc_snapshot;
  }
  write_csv(paths.stage1_log,
            {"iteration", "disc_loss", "gen_loss", "injected", "mean_d_real", "mean_d_fake",
             "auc_snapshot"},
            log);

  RandomStream eval_rng = stage_rng(cfg, "stage1_eval");
  const Matrix2 held_feasible =
      sample_feasible(region, cfg.sampler, cfg.held_out_per_class, eval_rng);
  const Matrix2 held_infeasible =
      sample_infeasible(region, cfg.sampler, cfg.held_out_per_class, eval_rng);
  const double auc = discriminator_auc(result.model, held_feasible, held_infeasible);
  const CoverageReport cov = coverage_report(result.model, region, cfg.n_eval_samples, eval_rng);

  json out = {{"auc", auc},
              {"held_out_per_class", cfg.held_out_per_class},
              {"coverage", coverage_json(cov)},
              {"iterations", result.log.size()}};
  if (!result.log.empty()) {
    out["final_disc_loss"] = result.log.back().disc_loss;
    out["final_gen_loss"] = result.log.back().gen_loss;
  }
  write_json(paths.stage1_summary, out);
  return out;
}

json run_stage2(const ExperimentConfig& cfg) {
  const RunPaths paths(cfg);
  require(paths.stage1_checkpoint);
  GanModel model = load_gan(paths.stage1_checkpoint);
  const Region region = cfg.region.build();
  const Objective f = cfg.objective.build(cfg.region);

  RandomStream rng = stage_rng(cfg, "stage2");
  const Stage2Result result = train_stage2(model, f, region, cfg.barrier, rng);
  save_gan(paths.stage2_checkpoint, model);

  Matrix2 log(result.log.size(), 5);
  for (std::size_t i = 0; i < result.log.size(); ++i) {
    const auto& row = result.log[i];
    log(i, 0) = static_cast<double>(row.outer_iter);
    log(i, 1) = row.lambda;
    log(i, 2) = row.mean_f;
    log(i, 3) = row.mean_barrier;
    log(i, 4) = row.coverage;
  }
  write_csv(paths.stage2_log, {"outer_iter", "lambda", "mean_f", "mean_B", "coverage"}, log);

  json tail = json::array();
  const std::size_t from = result.log.size() > kLogTail ? result.log.size() - kLogTail : 0;
  for (std::size_t i = from; i < result.log.size(); ++i) {
    const auto& row = result.log[i];
    tail.push_back({{"outer_iter", row.outer_iter},
                    {"lambda", row.lambda},
                    {"mean_f", row.mean_f},
                    {"mean_B", row.mean_barrier},
                    {"coverage", row.coverage}});
  }
  json out = {{"converged", result.converged},
              {"final_lambda", result.final_lambda},
              {"outer_iterations_run", result.log.size()},
              {"trajectory_tail", tail},
              {"warnings", result.warnings}};
  write_json(paths.stage2_summary, out);
  return out;
}

json run_oracle(const ExperimentConfig& cfg) {
  const RunPaths paths(cfg);
  fs::create_directories(paths.dir);
  const json canon = canonical_json(cfg);
  const json key_doc = {{"region", canon.at("region")},
                        {"objective", canon.at("objective")},
                        {"oracle", canon.at("oracle")}};
  const fs::path cache = cfg.output_dir / "oracle_cache" / (fingerprint(key_doc) + ".json");

  json out;
  if (fs::exists(cache)) {
    out = read_json(cache);
  } else {
    const Region region = cfg.region.build();
    const Objective f = cfg.objective.build(cfg.region);
    if (region.kind() == Region::Kind::ToyDose) {
      RandomStream rng = stage_rng(cfg, "oracle");
      const LocalSearchResult r =
          toy_dose_oracle(region, f, cfg.oracle.toy_starts, cfg.oracle.toy_iterations, rng);
      out = {{"kind", "local_search"},
             {"best_value", r.best_value},
             {"best_point", r.best_point},
             {"n_starts", r.n_starts},
             {"n_agreeing", r.n_agreeing},
             {"spread", r.spread}};
    } else {
      const GridResult r = grid_optimize(region, f, cfg.oracle.grid_step);
      out = {{"kind", "grid"},
             {"best_value", r.best_value},
             {"best_point", r.best_point},
             {"argmin_points", r.argmin_points},
             {"n_near_optimal", r.near_optimal.size()},
             {"tau", r.tau},
             {"step", r.step},
             {"n_feasible_points", r.n_feasible_points}};
    }
    out["key"] = key_doc;
    fs::create_directories(cache.parent_path());
    write_json(cache, out);
  }
  write_json(paths.oracle, out);
  return out;
}

json run_evaluate(const ExperimentConfig& cfg) {
  const RunPaths paths(cfg);
  require(paths.stage2_checkpoint);
  const GanModel model = load_gan(paths.stage2_checkpoint);
  const json oracle = read_json(paths.oracle);
  const json stage1 = read_json(paths.stage1_summary);
  const json stage2 = read_json(paths.stage2_summary);
  const Matrix2 training = read_csv(paths.feasible).values;
  const Region region = cfg.region.build();
  const Objective f = cfg.objective.build(cfg.region);
  const double f_star = oracle.at("best_value").get<double>();
  const OptimalSet optimal = optimal_set_for(cfg, f, oracle);

  RandomStream rng = stage_rng(cfg, "evaluate");
  const SampleSet samples = SampleSet::evaluate(model.sample(cfg.n_eval_samples, rng), f, region);
  write_csv(paths.generated, region.coordinate_names(), samples.points);

  const MetricsReport untrimmed = compute_metrics(samples, f_star, optimal, false, cfg.trim_percentile);
  const MetricsReport trimmed = compute_metrics(samples, f_star, optimal, true, cfg.trim_percentile);

  json summary;
  summary["name"] = cfg.name;
  summary["config_hash"] = config_hash(cfg);
  summary["seed"] = cfg.seed;
  summary["stage1"] = stage1;
  summary["stage2"] = stage2;
  summary["oracle"] = {{"kind", oracle.at("kind")},
                       {"best_value", f_star},
                       {"best_point", oracle.at("best_point")}};
  summary["metrics"] = {
      {"convention", cfg.convention == MetricConvention::Trimmed ? "trimmed" : "untrimmed"},
      {"headline", metrics_json(cfg.convention == MetricConvention::Trimmed ? trimmed : untrimmed)},
      {"untrimmed", metrics_json(untrimmed)},
      {"trimmed", metrics_json(trimmed)}};

  const double n = static_cast<double>(samples.size());
  summary["generated"] = {{"fraction_feasible", static_cast<double>(samples.feasible_count()) / n},
                          {"mean_objective", mean_objective(samples.points, f)},
                          {"training_mean_objective", mean_objective(training, f)}};

  // Share of samples near each isolated minimizer.
  if (optimal.kind == OptimalSet::Kind::Points) {
    json modes = json::array();
    for (const auto& p : optimal.points) {
      std::size_t near = 0;
      for (std::size_t r = 0; r < samples.size(); ++r) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
          const double d = samples.points(r, i) - p[i];
          d2 += d * d;
        }
        if (std::sqrt(d2) <= kModeRadius) ++near;
      }
      modes.push_back({{"point", p}, {"radius", kModeRadius}, {"fraction", near / n}});
    }
    summary["mode_fractions"] = modes;
  }

  // Certificate on the best feasible generated sample, at the final barrier weight.
  const Barrier barrier(model);
  std::size_t best = samples.size();
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (!samples.feasible[r]) continue;
    if (best == samples.size() || samples.objective_values[r] < samples.objective_values[best]) best = r;
  }
  if (best == samples.size()) {
    summary["certificate"] = nullptr;
    summary["certificate_bound_holds"] = false;
  } else {
    CertificateRequest req;
    req.mode = CertificateRequest::Mode::FromLambda;
    req.lambda = stage2.at("final_lambda").get<double>();
    req.margin_m = cfg.certificate_margin;
    req.delta_gap = cfg.certificate_gap;
    const auto x = samples.points.row(best);
    const Certificate c = certify_point(std::vector<double>(x.begin(), x.end()),
                                        samples.objective_values[best], barrier.log_d(x), true, req);
    summary["certificate"] = {{"x_tilde", c.x_tilde},         {"f_tilde", c.f_tilde},
                              {"log_d", c.log_d},             {"lambda_tilde", c.lambda_tilde},
                              {"delta_tilde", c.delta_tilde}, {"epsilon", c.epsilon},
                              {"feasible", c.feasible_flag},  {"accepted", c.accepted}};
    summary["certificate_bound_holds"] = c.accepted && certificate_bound_holds(c, f_star);
  }

  json artifacts = json::array();
  for (const fs::path& p : {paths.config, paths.feasible, paths.infeasible, paths.stage1_checkpoint,
                            paths.stage1_log, paths.stage1_summary, paths.stage2_checkpoint,
                            paths.stage2_log, paths.stage2_summary, paths.oracle, paths.generated,
                            paths.summary}) {
    artifacts.push_back(p.string());
  }
  summary["artifacts"] = artifacts;
  write_json(paths.summary, summary);
  return summary;
}

void run_plot(const ExperimentConfig& cfg) {
  const RunPaths paths(cfg);
  const Region region = cfg.region.build();
  const Objective f = cfg.objective.build(cfg.region);
  const Matrix2 feasible = read_csv(paths.feasible).values;
  const Matrix2 generated = read_csv(paths.generated).values;
  const json oracle = read_json(paths.oracle);
  const double f_star = oracle.at("best_value").get<double>();
  const SampleSet shown =
      trim_outliers(SampleSet::evaluate(generated, f, region), f_star, cfg.trim_percentile);
  emit_svg_scatter(feasible.head(std::min(feasible.rows(), kPlotFeasiblePoints)), shown.points,
                   region, paths.plot);
}

json run_full(const ExperimentConfig& cfg) {
  cfg.validate();
  const RunPaths paths(cfg);
  json timings = json::object();
  auto timed = [&](const char* stage, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
    timings[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  timed("sample", [&] { run_sample(cfg); });
  timed("stage1", [&] { run_stage1(cfg); });
  timed("stage2", [&] { run_stage2(cfg); });
  timed("oracle", [&] { run_oracle(cfg); });
  json summary;
  timed("evaluate", [&] { summary = run_evaluate(cfg); });
  if (cfg.region.build().dimension() == 2) {
    timed("plot", [&] { run_plot(cfg); });
    summary["artifacts"].push_back(paths.plot.string());
  }
  summary["timings_seconds"] = timings;
  write_json(paths.summary, summary);
  return summary;
}

json numeric_summary(json summary) {
  summary.erase("timings_seconds");
  return summary;
}

}  // namespace ipman
