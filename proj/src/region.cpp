#include "ipman/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ipman/errors.hpp"
#include "ipman/stats.hpp"

namespace ipman {

namespace {

constexpr std::size_t kMaxProposals = 100000;
constexpr double kMinAcceptance = 0.01;
constexpr std::size_t kMaxStencilDim = 10;

void check_dim(std::size_t expected, std::span<const double> x) {
  if (x.size() != expected) {
    throw ShapeError("point has dimension " + std::to_string(x.size()) + ", region has " +
                     std::to_string(expected));
  }
}

}  // namespace

// --- Box -------------------------------------------------------------------

Box::Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw ShapeError("box bounds have different lengths");
  if (lower.empty()) throw ShapeError("box must have at least one dimension");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw ConfigError("box lower bound exceeds upper bound");
  }
}

bool Box::contains(std::span<const double> x) const {
  check_dim(dimension(), x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

Box Box::inflated(double pad) const {
  Box b = *this;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    b.lower[i] -= pad;
    b.upper[i] += pad;
  }
  return b;
}

// --- toy dose --------------------------------------------------------------

void ToyDoseSpec::validate() const {
  if (n_voxels == 0) throw ConfigError("toy dose: n_voxels must be positive");
  if (!(prescription > 0.0)) throw ConfigError("toy dose: prescription must be positive");
  if (tumor.empty()) throw ConfigError("toy dose: tumor index set is empty");
  std::set<std::size_t> seen;
  for (const auto* set : {&tumor, &urethra, &bladder}) {
    for (auto i : *set) {
      if (i >= n_voxels) throw ConfigError("toy dose: voxel index out of range");
      if (!seen.insert(i).second) throw ConfigError("toy dose: index sets overlap");
    }
  }
  for (double a : {coverage_alpha, hotspot_alpha}) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("toy dose: quantile level outside (0, 1]");
  }
  if (!(coverage_factor <= hotspot_factor)) {
    throw ConfigError("toy dose: coverage threshold above hotspot threshold");
  }
  if (!(ceiling_factor >= hotspot_factor)) {
    throw ConfigError("toy dose: dose ceiling below the hotspot threshold");
  }
}

ToyDoseSpec::Intervals ToyDoseSpec::voxel_intervals() const {
  Intervals b;
  const double p = prescription;
  b.lo.assign(n_voxels, 0.0);
  b.hi.assign(n_voxels, hotspot_factor * p);
  for (auto i : tumor) {
    b.lo[i] = coverage_factor * p;
    b.hi[i] = hotspot_factor * p;
  }
  for (auto i : urethra) b.hi[i] = urethra_factor * p;
  for (auto i : bladder) b.hi[i] = bladder_factor * p;
  return b;
}

std::vector<std::size_t> ToyDoseSpec::unlabeled() const {
  std::vector<bool> used(n_voxels, false);
  for (const auto* set : {&tumor, &urethra, &bladder}) {
    for (auto i : *set) used[i] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_voxels; ++i) {
    if (!used[i]) out.push_back(i);
  }
  return out;
}

ToyDoseReport toy_dose_feasible(const ToyDoseSpec& spec, std::span<const double> x) {
  check_dim(spec.n_voxels, x);
  for (double v : x) {
    if (v < 0.0) throw DomainError("toy dose: negative dose entry");
  }
  auto gather = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> v;
    v.reserve(idx.size());
    for (auto i : idx) v.push_back(x[i]);
    return v;
  };
  auto max_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  const double p = spec.prescription;
  const auto tumor = gather(spec.tumor);
  ToyDoseReport r;
  r.tumor_coverage = order_statistic(tumor, spec.coverage_alpha) >= spec.coverage_factor * p;
  r.tumor_hotspot = order_statistic(tumor, spec.hotspot_alpha) <= spec.hotspot_factor * p;
  r.urethra_max = max_of(gather(spec.urethra)) <= spec.urethra_factor * p;
  r.bladder_max = max_of(gather(spec.bladder)) <= spec.bladder_factor * p;
  return r;
}

// --- sampler config --------------------------------------------------------

void SamplerConfig::validate() const {
  if (!(shrink_margin >= 0.0)) throw ConfigError("shrink_margin must be >= 0");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
  if (!(infeasible_pad > 0.0)) throw ConfigError("infeasible_pad must be > 0");
}

// --- Region ----------------------------------------------------------------

Region Region::union_of_boxes(std::vector<Box> boxes) {
  if (boxes.empty()) throw ConfigError("region needs at least one box");
  const std::size_t n = boxes.front().dimension();
  Box bbox = boxes.front();
  for (const auto& b : boxes) {
    if (b.dimension() != n) throw ShapeError("boxes have inconsistent dimensions");
    for (std::size_t i = 0; i < n; ++i) {
      bbox.lower[i] = std::min(bbox.lower[i], b.lower[i]);
      bbox.upper[i] = std::max(bbox.upper[i], b.upper[i]);
    }
  }
  Region r;
  r.dimension_ = n;
  r.bbox_ = std::move(bbox);
  r.shape_ = std::move(boxes);
  return r;
}

Region Region::toy_dose(ToyDoseSpec spec) {
  spec.validate();
  Region r;
  r.dimension_ = spec.n_voxels;
  r.bbox_ = Box(std::vector<double>(spec.n_voxels, 0.0),
                std::vector<double>(spec.n_voxels, spec.ceiling_factor * spec.prescription));
  r.shape_ = std::move(spec);
  return r;
}

Region::Kind Region::kind() const noexcept {
  return std::holds_alternative<ToyDoseSpec>(shape_) ? Kind::ToyDose : Kind::UnionOfBoxes;
}

const std::vector<Box>& Region::boxes() const {
  if (const auto* b = std::get_if<std::vector<Box>>(&shape_)) return *b;
  throw StateError("region is not a union of boxes");
}

const ToyDoseSpec& Region::toy_spec() const {
  if (const auto* s = std::get_if<ToyDoseSpec>(&shape_)) return *s;
  throw StateError("region is not a toy-dose region");
}

bool Region::contains(std::span<const double> x) const {
  return component_of(x) >= 0;
}

int Region::component_of(std::span<const double> x) const {
  check_dim(dimension_, x);
  if (const auto* boxes = std::get_if<std::vector<Box>>(&shape_)) {
    for (std::size_t k = 0; k < boxes->size(); ++k) {
      if ((*boxes)[k].contains(x)) return static_cast<int>(k);
    }
    return -1;
  }
  if (!bbox_.contains(x)) return -1;
  return toy_dose_feasible(std::get<ToyDoseSpec>(shape_), x).all() ? 0 : -1;
}

std::size_t Region::component_count() const {
  if (const auto* boxes = std::get_if<std::vector<Box>>(&shape_)) return boxes->size();
  return 1;
}

bool Region::contains_shrunk(std::span<const double> x, double margin) const {
  check_dim(dimension_, x);
  if (const auto* spec = std::get_if<ToyDoseSpec>(&shape_)) {
    const auto b = spec->voxel_intervals();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] >= b.lo[i] + margin && x[i] <= b.hi[i] - margin)) return false;
    }
    return contains(x);
  }
  if (margin == 0.0) return contains(x);
  if (dimension_ > kMaxStencilDim) {
    throw ConfigError("shrunk membership supports at most 10 dimensions for box unions");
  }
  std::vector<double> probe(dimension_);
  std::vector<int> digit(dimension_, -1);
  while (true) {
    for (std::size_t i = 0; i < dimension_; ++i) probe[i] = x[i] + margin * digit[i];
    if (!contains(probe)) return false;
    std::size_t i = 0;
    while (i < dimension_ && digit[i] == 1) digit[i++] = -1;
    if (i == dimension_) return true;
    ++digit[i];
  }
}

std::vector<std::string> Region::coordinate_names() const {
  std::vector<std::string> names;
  const bool toy = kind() == Kind::ToyDose;
  for (std::size_t i = 0; i < dimension_; ++i) {
    names.push_back(toy ? "voxel" + std::to_string(i) : "x" + std::to_string(i + 1));
  }
  return names;
}

Region l_shape() {
  return Region::union_of_boxes({Box({-1.0, 9.0}, {17.0, 17.0}), Box({9.0, -1.0}, {17.0, 9.0})});
}

// --- samplers --------------------------------------------------------------

namespace {

// Uniform point in the union of boxes: pick a box by volume, then accept with
// probability 1 / (number of boxes covering the point).
std::vector<double> uniform_in_union(const std::vector<Box>& boxes,
                                     const std::vector<double>& cumulative, RandomStream& rng) {
  const std::size_t n = boxes.front().dimension();
  std::vector<double> x(n);
  while (true) {
    const double u = rng.uniform(0.0, cumulative.back());
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    k = std::min(k, boxes.size() - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(boxes[k].lower[i], boxes[k].upper[i]);
    if (boxes.size() == 1) return x;
    std::size_t cover = 0;
    for (const auto& b : boxes) cover += b.contains(x) ? 1 : 0;
    if (cover <= 1 || rng.uniform(0.0, 1.0) < 1.0 / static_cast<double>(cover)) return x;
  }
}

std::vector<double> toy_proposal(const ToyDoseSpec& spec, double margin, RandomStream& rng) {
  const auto b = spec.voxel_intervals();
  std::vector<double> x(spec.n_voxels);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = b.lo[i] + margin;
    const double hi = b.hi[i] - margin;
    if (lo > hi) throw ConfigError("shrink margin empties the toy-dose sampling interval");
    x[i] = rng.uniform(lo, hi);
  }
  return x;
}

}  // namespace

Matrix2 sample_feasible(const Region& region, const SamplerConfig& cfg, RandomStream& rng) {
  return sample_feasible(region, cfg, cfg.n_feasible, rng);
}

Matrix2 sample_feasible(const Region& region, const SamplerConfig& cfg, std::size_t count,
                        RandomStream& rng) {
  cfg.validate();
  const std::size_t n = region.dimension();
  Matrix2 out(count, n);
  std::vector<double> cumulative;
  if (region.kind() == Region::Kind::UnionOfBoxes) {
    double acc = 0.0;
    for (const auto& b : region.boxes()) cumulative.push_back(acc += b.volume());
    if (!(acc > 0.0)) throw ConfigError("region has zero volume");
  }
  std::size_t accepted = 0;
  std::size_t proposals = 0;
  while (accepted < count) {
    std::vector<double> x = region.kind() == Region::Kind::ToyDose
                                ? toy_proposal(region.toy_spec(), cfg.shrink_margin, rng)
                                : uniform_in_union(region.boxes(), cumulative, rng);
    ++proposals;
    if (region.contains_shrunk(x, cfg.shrink_margin)) {
      auto row = out.row(accepted++);
      for (std::size_t i = 0; i < n; ++i) row[i] = x[i] + (cfg.noise_std > 0.0 ? rng.normal(0.0, cfg.noise_std) : 0.0);
    } else if (proposals >= kMaxProposals &&
               static_cast<double>(accepted) < kMinAcceptance * static_cast<double>(proposals)) {
      throw ConfigError("shrink margin leaves (almost) nothing of the region to sample");
    }
  }
  return out;
}

Matrix2 sample_infeasible(const Region& region, const SamplerConfig& cfg, RandomStream& rng) {
  return sample_infeasible(region, cfg, cfg.n_infeasible, rng);
}

Matrix2 sample_infeasible(const Region& region, const SamplerConfig& cfg, std::size_t count,
                          RandomStream& rng) {
  cfg.validate();
  const Box proposal = region.bounding_box().inflated(cfg.infeasible_pad);
  const bool toy = region.kind() == Region::Kind::ToyDose;
  ToyDoseSpec::Intervals voxel;
  if (toy) voxel = region.toy_spec().voxel_intervals();
  const std::size_t n = region.dimension();
  Matrix2 out(count, n);
  std::vector<double> x(n);
  std::size_t accepted = 0;
  std::size_t proposals = 0;
  while (accepted < count) {
    if (toy) {
      // Start inside the per-voxel intervals and push one voxel into its padded
      // interval, so each rejected point violates a single bound near the boundary.
      for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(voxel.lo[i], voxel.hi[i]);
      const std::size_t j = rng.index(n);
      x[j] = rng.uniform(voxel.lo[j] - cfg.infeasible_pad, voxel.hi[j] + cfg.infeasible_pad);
    } else {
      for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(proposal.lower[i], proposal.upper[i]);
    }
    ++proposals;
    if (!region.contains(x)) {
      std::copy(x.begin(), x.end(), out.row(accepted++).begin());
    } else if (proposals >= kMaxProposals &&
               static_cast<double>(accepted) < kMinAcceptance * static_cast<double>(proposals)) {
      throw ConfigError("infeasible acceptance rate below 1% over 1e5 proposals");
    }
  }
  return out;
}

}  // namespace ipman
