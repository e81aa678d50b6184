#include <fmt/format.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ipman/config.hpp"
#include "ipman/errors.hpp"
#include "ipman/kernels.hpp"
#include "ipman/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Interior-point style constrained optimization with a GAN barrier"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  const char* names[][2] = {
      {"sample", "Draw feasible and infeasible training samples"},
      {"stage1", "Train the GAN on the feasible samples"},
      {"stage2", "Retrain the generator against objective plus barrier"},
      {"oracle", "Compute ground truth by grid or multistart search"},
      {"evaluate", "Sample the generator, compute metrics and the certificate"},
      {"plot", "Write the scatter plot (2-D problems)"},
      {"run", "Run every stage in order"},
  };
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out_dir, "Override the output directory");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    ipman::kernels::configure_workers_from_env();
    ipman::ExperimentConfig cfg = ipman::load_config(config_path, seed);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const ipman::RunPaths paths(cfg);

    if (cmd == "sample") {
      ipman::run_sample(cfg);
    } else if (cmd == "stage1") {
      std::cout << ipman::run_stage1(cfg).dump(2) << '\n';
    } else if (cmd == "stage2") {
      std::cout << ipman::run_stage2(cfg).dump(2) << '\n';
    } else if (cmd == "oracle") {
      std::cout << ipman::run_oracle(cfg).dump(2) << '\n';
    } else if (cmd == "evaluate") {
      std::cout << ipman::run_evaluate(cfg).dump(2) << '\n';
    } else if (cmd == "plot") {
      ipman::run_plot(cfg);
    } else {
      const auto summary = ipman::run_full(cfg);
      const auto& m = summary.at("metrics").at("headline");
      fmt::print("{}: delta_f {:.4f}  var90 {:.4f}  delta_x {:.4f}  feasible {}/{}\n", cfg.name,
                 m.at("delta_f").get<double>(), m.at("var90").get<double>(),
                 m.at("delta_x").get<double>(), m.at("n_feasible").get<std::size_t>(),
                 m.at("n_samples").get<std::size_t>());
    }
    fmt::print("run directory: {}\n", paths.dir.string());
  } catch (const ipman::Error& e) {
    fmt::print(stderr, "ipman {}: {}\n", cmd, e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "ipman {}: unexpected error: {}\n", cmd, e.what());
    return 2;
  }
  return 0;
}
