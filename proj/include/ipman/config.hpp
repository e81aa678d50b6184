#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ipman/barrier.hpp"
#include "ipman/gan.hpp"
#include "ipman/objective.hpp"
#include "ipman/region.hpp"

namespace ipman {

struct RegionSpec {
  enum class Kind { LShape, Boxes, ToyDose };
  Kind kind = Kind::LShape;
  std::vector<Box> boxes;  // Kind::Boxes
  ToyDoseSpec toy;         // Kind::ToyDose

  Region build() const;
  bool operator==(const RegionSpec&) const = default;
};

struct ObjectiveSpec {
  // linear | quadratic | bilinear | rosenbrock | toy_dose
  std::string name = "quadratic";
  std::vector<double> coeffs = {1.0, 0.0};    // linear
  std::vector<double> center = {5.0, 11.0};   // quadratic
  double a = 3.5;                             // rosenbrock
  double b = 100.0;                           // rosenbrock
  double organ_penalty = 1.0;                 // toy_dose
  double healthy_penalty = 0.25;              // toy_dose

  Objective build(const RegionSpec& region) const;
  bool operator==(const ObjectiveSpec&) const = default;
};

struct OracleConfig {
  double grid_step = 0.25;
  std::size_t toy_starts = 32;
  std::size_t toy_iterations = 3000;

  bool operator==(const OracleConfig&) const = default;
};

enum class MetricConvention { Untrimmed, Trimmed };

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "runs";

  RegionSpec region;
  ObjectiveSpec objective;
  SamplerConfig sampler;
  GanConfig gan;
  BarrierConfig barrier;
  std::size_t n_eval_samples = 1000;
  // Held-out points per class for the stage-1 AUC.
  std::size_t held_out_per_class = 2000;
  OracleConfig oracle;
  // Convention of the headline metrics; both are always written.
  MetricConvention convention = MetricConvention::Untrimmed;
  double trim_percentile = 90.0;
  double certificate_margin = -20.0;
  double certificate_gap = 1.0;

  // Full validation, including mu > 1.
  void validate() const;
};

// Accepted layout: {"name", "seed", "output", "paper": {...}, "chosen": {...}}.
// The two groups are merged; a key present in both, or a key the schema does
// not know, is an error. `seed_override` replaces the file's seed; without
// either, loading fails.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

// Fully resolved config, defaults filled in, keys sorted.
nlohmann::json canonical_json(const ExperimentConfig& cfg);
// 16 hex digits over the canonical form without name, seed and output.
std::string config_hash(const ExperimentConfig& cfg);
// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string fingerprint(const nlohmann::json& j);

}  // namespace ipman
