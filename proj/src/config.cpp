#include "ipman/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

#include "ipman/errors.hpp"

namespace ipman {

using nlohmann::json;

namespace {

// Strict view of a JSON object: every key must be consumed before finish().
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}.{}: {}", path_, key, e.what()));
    }
  }

  Section child(const std::string& key) {
    used_.insert(key);
    return Section(j_.contains(key) ? j_.at(key) : empty(), path_ + "." + key);
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(fmt::format("unknown key {}.{}", path_, key));
    }
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  std::string where() const { return path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void merge_into(json& dst, const json& src, const std::string& path) {
  for (const auto& [key, value] : src.items()) {
    const std::string p = path + "." + key;
    if (!dst.contains(key)) {
      dst[key] = value;
    } else if (dst[key].is_object() && value.is_object()) {
      merge_into(dst[key], value, p);
    } else {
      throw ConfigError(fmt::format("{} is set in both the paper and chosen groups", p));
    }
  }
}

void read_adam(Section s, AdamSettings& a) {
  s.read("learning_rate", a.learning_rate);
  s.read("beta1", a.beta1);
  s.read("beta2", a.beta2);
  s.read("epsilon", a.epsilon_hat);
  s.finish();
}

json adam_json(const AdamSettings& a) {
  return {{"learning_rate", a.learning_rate},
          {"beta1", a.beta1},
          {"beta2", a.beta2},
          {"epsilon", a.epsilon_hat}};
}

void read_region(Section s, RegionSpec& r) {
  std::string kind = "l_shape";
  s.read("kind", kind);
  if (kind == "l_shape") {
    r.kind = RegionSpec::Kind::LShape;
  } else if (kind == "boxes") {
    r.kind = RegionSpec::Kind::Boxes;
    if (!s.has("boxes")) throw ConfigError("region.boxes is required for kind \"boxes\"");
    const json& arr = s.raw("boxes");
    if (!arr.is_array()) throw ConfigError("region.boxes must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section b(arr[i], fmt::format("region.boxes[{}]", i));
      std::vector<double> lo, hi;
      b.read("lower", lo);
      b.read("upper", hi);
      b.finish();
      r.boxes.emplace_back(lo, hi);
    }
  } else if (kind == "toy_dose") {
    r.kind = RegionSpec::Kind::ToyDose;
    Section t = s.child("toy");
    ToyDoseSpec& d = r.toy;
    t.read("n_voxels", d.n_voxels);
    t.read("tumor", d.tumor);
    t.read("urethra", d.urethra);
    t.read("bladder", d.bladder);
    t.read("prescription", d.prescription);
    t.read("coverage_alpha", d.coverage_alpha);
    t.read("coverage_factor", d.coverage_factor);
    t.read("hotspot_alpha", d.hotspot_alpha);
    t.read("hotspot_factor", d.hotspot_factor);
    t.read("urethra_factor", d.urethra_factor);
    t.read("bladder_factor", d.bladder_factor);
    t.read("ceiling_factor", d.ceiling_factor);
    t.finish();
  } else {
    throw ConfigError(fmt::format("unknown region kind \"{}\"", kind));
  }
  s.finish();
}

json region_json(const RegionSpec& r) {
  switch (r.kind) {
    case RegionSpec::Kind::LShape:
      return {{"kind", "l_shape"}};
    case RegionSpec::Kind::Boxes: {
      json boxes = json::array();
      for (const auto& b : r.boxes) boxes.push_back({{"lower", b.lower}, {"upper", b.upper}});
      return {{"kind", "boxes"}, {"boxes", boxes}};
    }
    case RegionSpec::Kind::ToyDose: {
      const ToyDoseSpec& d = r.toy;
      return {{"kind", "toy_dose"},
              {"toy",
               {{"n_voxels", d.n_voxels},
                {"tumor", d.tumor},
                {"urethra", d.urethra},
                {"bladder", d.bladder},
                {"prescription", d.prescription},
                {"coverage_alpha", d.coverage_alpha},
                {"coverage_factor", d.coverage_factor},
                {"hotspot_alpha", d.hotspot_alpha},
                {"hotspot_factor", d.hotspot_factor},
                {"urethra_factor", d.urethra_factor},
                {"bladder_factor", d.bladder_factor},
                {"ceiling_factor", d.ceiling_factor}}}};
    }
  }
  return {};
}

// Only the parameters the named objective uses are serialized, so unused
// defaults never perturb the hash.
json objective_json(const ObjectiveSpec& o) {
  json j = {{"name", o.name}};
  if (o.name == "linear") j["coeffs"] = o.coeffs;
  if (o.name == "quadratic") j["center"] = o.center;
  if (o.name == "rosenbrock") {
    j["a"] = o.a;
    j["b"] = o.b;
  }
  if (o.name == "toy_dose") {
    j["organ_penalty"] = o.organ_penalty;
    j["healthy_penalty"] = o.healthy_penalty;
  }
  return j;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Region RegionSpec::build() const {
  switch (kind) {
    case Kind::LShape:
      return l_shape();
    case Kind::Boxes:
      return Region::union_of_boxes(boxes);
    case Kind::ToyDose:
      return Region::toy_dose(toy);
  }
  throw ConfigError("unknown region kind");
}

Objective ObjectiveSpec::build(const RegionSpec& region) const {
  const bool toy = region.kind == RegionSpec::Kind::ToyDose;
  if (name == "toy_dose") {
    if (!toy) throw ConfigError("objective toy_dose needs a toy_dose region");
    return make_toy_dose(region.toy, default_toy_penalties(region.toy, organ_penalty, healthy_penalty),
                         toy_prescription(region.toy));
  }
  if (toy) throw ConfigError(fmt::format("objective {} does not fit a toy_dose region", name));
  if (name == "linear") return make_linear(coeffs);
  if (name == "quadratic") return make_quadratic(center);
  if (name == "bilinear") return make_bilinear();
  if (name == "rosenbrock") return make_rosenbrock(a, b);
  throw ConfigError(fmt::format("unknown objective \"{}\"", name));
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name must not be empty");
  const Region r = region.build();
  const Objective f = objective.build(region);
  if (f.dimension() != r.dimension()) throw ConfigError("objective and region dimensions differ");
  sampler.validate();
  gan.validate();
  barrier.validate_strict();
  if (n_eval_samples == 0) throw ConfigError("n_eval_samples must be positive");
  if (held_out_per_class == 0) throw ConfigError("held_out_per_class must be positive");
  if (!(oracle.grid_step > 0.0)) throw ConfigError("oracle.grid_step must be positive");
  if (oracle.toy_starts == 0 || oracle.toy_iterations == 0) {
    throw ConfigError("oracle.toy_starts and oracle.toy_iterations must be positive");
  }
  if (!(trim_percentile > 0.0 && trim_percentile <= 100.0)) {
    throw ConfigError("trim_percentile must lie in (0, 100]");
  }
  if (!(certificate_gap > 0.0)) throw ConfigError("certificate.gap must be positive");
}

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  Section top(doc, "config");
  ExperimentConfig cfg;
  top.read("name", cfg.name);
  std::optional<std::uint64_t> seed;
  if (top.has("seed")) {
    std::uint64_t s = 0;
    top.read("seed", s);
    seed = s;
  }
  if (seed_override) seed = seed_override;
  if (!seed) throw ConfigError("seed is required (in the file or via --seed)");
  cfg.seed = *seed;
  std::string out = cfg.output_dir.string();
  top.read("output", out);
  cfg.output_dir = out;

  json merged = json::object();
  if (top.has("paper")) merge_into(merged, top.raw("paper"), "");
  if (top.has("chosen")) merge_into(merged, top.raw("chosen"), "");
  top.finish();

  Section m(merged, "config");
  read_region(m.child("region"), cfg.region);
  {
    Section o = m.child("objective");
    o.read("name", cfg.objective.name);
    o.read("coeffs", cfg.objective.coeffs);
    o.read("center", cfg.objective.center);
    o.read("a", cfg.objective.a);
    o.read("b", cfg.objective.b);
    o.read("organ_penalty", cfg.objective.organ_penalty);
    o.read("healthy_penalty", cfg.objective.healthy_penalty);
    o.finish();
  }
  {
    Section s = m.child("sampler");
    s.read("shrink_margin", cfg.sampler.shrink_margin);
    s.read("noise_std", cfg.sampler.noise_std);
    s.read("n_feasible", cfg.sampler.n_feasible);
    s.read("n_infeasible", cfg.sampler.n_infeasible);
    s.read("infeasible_pad", cfg.sampler.infeasible_pad);
    s.finish();
  }
  {
    Section g = m.child("gan");
    GanConfig& c = cfg.gan;
    g.read("latent_dim", c.latent_dim);
    g.read("hidden_width", c.hidden_width);
    g.read("leaky_slope", c.leaky_slope);
    g.read("batch_size", c.batch_size);
    g.read("total_iterations", c.total_iterations);
    g.read("disc_updates_per_gen_update", c.disc_updates_per_gen_update);
    g.read("injection_start_fraction", c.injection_start_fraction);
    g.read("injection_replace_fraction", c.injection_replace_fraction);
    g.read("snapshot_every", c.snapshot_every);
    read_adam(g.child("disc_adam"), c.disc_adam);
    read_adam(g.child("gen_adam"), c.gen_adam);
    g.finish();
  }
  {
    Section b = m.child("barrier");
    BarrierConfig& c = cfg.barrier;
    b.read("lambda0", c.lambda0);
    b.read("mu", c.mu);
    b.read("outer_iterations", c.outer_iterations);
    b.read("inner_steps", c.inner_steps);
    b.read("batch_size", c.batch_size);
    b.read("window", c.window);
    b.read("tolerance", c.tolerance);
    b.read("eval_samples", c.eval_samples);
    read_adam(b.child("gen_adam"), c.gen_adam);
    b.finish();
  }
  {
    Section e = m.child("evaluation");
    e.read("n_eval_samples", cfg.n_eval_samples);
    e.read("held_out_per_class", cfg.held_out_per_class);
    e.read("trim_percentile", cfg.trim_percentile);
    std::string convention = "untrimmed";
    e.read("metric_convention", convention);
    if (convention == "untrimmed") {
      cfg.convention = MetricConvention::Untrimmed;
    } else if (convention == "trimmed") {
      cfg.convention = MetricConvention::Trimmed;
    } else {
      throw ConfigError(fmt::format("unknown metric_convention \"{}\"", convention));
    }
    e.finish();
  }
  {
    Section o = m.child("oracle");
    o.read("grid_step", cfg.oracle.grid_step);
    o.read("toy_starts", cfg.oracle.toy_starts);
    o.read("toy_iterations", cfg.oracle.toy_iterations);
    o.finish();
  }
  {
    Section c = m.child("certificate");
    c.read("margin", cfg.certificate_margin);
    c.read("gap", cfg.certificate_gap);
    c.finish();
  }
  m.finish();

  if (cfg.name.empty()) cfg.name = cfg.objective.name;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw DependencyError("missing config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc, seed_override);
}

json canonical_json(const ExperimentConfig& cfg) {
  const GanConfig& g = cfg.gan;
  const BarrierConfig& b = cfg.barrier;
  const SamplerConfig& s = cfg.sampler;
  return {
      {"name", cfg.name},
      {"seed", cfg.seed},
      {"output", cfg.output_dir.string()},
      {"region", region_json(cfg.region)},
      {"objective", objective_json(cfg.objective)},
      {"sampler",
       {{"shrink_margin", s.shrink_margin},
        {"noise_std", s.noise_std},
        {"n_feasible", s.n_feasible},
        {"n_infeasible", s.n_infeasible},
        {"infeasible_pad", s.infeasible_pad}}},
      {"gan",
       {{"latent_dim", g.latent_dim},
        {"hidden_width", g.hidden_width},
        {"leaky_slope", g.leaky_slope},
        {"batch_size", g.batch_size},
        {"total_iterations", g.total_iterations},
        {"disc_updates_per_gen_update", g.disc_updates_per_gen_update},
        {"injection_start_fraction", g.injection_start_fraction},
        {"injection_replace_fraction", g.injection_replace_fraction},
        {"snapshot_every", g.snapshot_every},
        {"disc_adam", adam_json(g.disc_adam)},
        {"gen_adam", adam_json(g.gen_adam)}}},
      {"barrier",
       {{"lambda0", b.lambda0},
        {"mu", b.mu},
        {"outer_iterations", b.outer_iterations},
        {"inner_steps", b.inner_steps},
        {"batch_size", b.batch_size},
        {"window", b.window},
        {"tolerance", b.tolerance},
        {"eval_samples", b.eval_samples},
        {"gen_adam", adam_json(b.gen_adam)}}},
      {"evaluation",
       {{"n_eval_samples", cfg.n_eval_samples},
        {"held_out_per_class", cfg.held_out_per_class},
        {"trim_percentile", cfg.trim_percentile},
        {"metric_convention",
         cfg.convention == MetricConvention::Trimmed ? "trimmed" : "untrimmed"}}},
      {"oracle",
       {{"grid_step", cfg.oracle.grid_step},
        {"toy_starts", cfg.oracle.toy_starts},
        {"toy_iterations", cfg.oracle.toy_iterations}}},
      {"certificate", {{"margin", cfg.certificate_margin}, {"gap", cfg.certificate_gap}}},
  };
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = canonical_json(cfg);
  j.erase("name");
  j.erase("seed");
  j.erase("output");
  return fingerprint(j);
}

std::string fingerprint(const json& j) { return fmt::format("{:016x}", fnv1a(j.dump())); }

}  // namespace ipman
