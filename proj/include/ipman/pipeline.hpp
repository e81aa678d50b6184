#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ipman/config.hpp"

// Stage runners. Each reads its inputs from and writes its outputs to the run
// directory <output>/<config hash>_seed<seed>, so stages can be rerun one at a
// time. A missing upstream file raises DependencyError naming it.
namespace ipman {

struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path config;
  std::filesystem::path feasible;
  std::filesystem::path infeasible;
  std::filesystem::path stage1_checkpoint;
  std::filesystem::path stage1_log;
  std::filesystem::path stage1_summary;
  std::filesystem::path stage2_checkpoint;
  std::filesystem::path stage2_log;
  std::filesystem::path stage2_summary;
  std::filesystem::path oracle;
  std::filesystem::path generated;
  std::filesystem::path summary;
  std::filesystem::path plot;

  explicit RunPaths(const ExperimentConfig& cfg);
};

// feasible.csv, infeasible.csv and the resolved config.json.
void run_sample(const ExperimentConfig& cfg);
// stage1.ckpt, stage1_log.csv, stage1.json (held-out AUC, coverage).
nlohmann::json run_stage1(const ExperimentConfig& cfg);
// stage2.ckpt, stage2_log.csv, stage2.json.
nlohmann::json run_stage2(const ExperimentConfig& cfg);
// oracle.json; cached under <output>/oracle_cache by region, objective and
// oracle settings.
nlohmann::json run_oracle(const ExperimentConfig& cfg);
// generated.csv and summary.json: both metric conventions, certificate.
nlohmann::json run_evaluate(const ExperimentConfig& cfg);
// plot.svg for 2-D regions, generated points trimmed at trim_percentile.
void run_plot(const ExperimentConfig& cfg);

// Every stage in order. Errors are rethrown as StageError tagged with the
// stage name; files written so far are left in place. The returned summary
// adds wall-clock timings under "timings_seconds" and is also written to
// summary.json.
nlohmann::json run_full(const ExperimentConfig& cfg);

// Summary without the wall-clock fields, for run-to-run comparison.
nlohmann::json numeric_summary(nlohmann::json summary);

}  // namespace ipman
