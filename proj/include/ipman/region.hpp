#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ipman/matrix.hpp"
#include "ipman/random.hpp"

namespace ipman {

// Axis-aligned box with closed bounds.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);

  std::size_t dimension() const noexcept { return lower.size(); }
  bool contains(std::span<const double> x) const;
  double volume() const;
  Box inflated(double pad) const;

  bool operator==(const Box&) const = default;
};

// Low-dimensional analogue of a prostate dose plan: a vector of voxel doses
// with tumor / urethra / bladder index sets.
struct ToyDoseSpec {
  std::size_t n_voxels = 16;
  std::vector<std::size_t> tumor = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<std::size_t> urethra = {8, 9};
  std::vector<std::size_t> bladder = {10, 11, 12};
  double prescription = 1.0;

  // (1) quantile_{coverage_alpha}(tumor) >= coverage_factor * P
  double coverage_alpha = 0.05;
  double coverage_factor = 0.9;
  // (2) quantile_{hotspot_alpha}(tumor) <= hotspot_factor * P
  double hotspot_alpha = 0.99;
  double hotspot_factor = 1.2;
  // (3) max(urethra) <= urethra_factor * P
  double urethra_factor = 0.9;
  // (4) max(bladder) <= bladder_factor * P
  double bladder_factor = 1.1;
  // Per-voxel dose ceiling of the bounding box, as a multiple of P.
  double ceiling_factor = 1.5;

  void validate() const;
  // Per-voxel dose intervals whose product lies inside the region: tumor in
  // [coverage, hotspot] * P, urethra / bladder in [0, their max], others in
  // [0, hotspot * P].
  struct Intervals {
    std::vector<double> lo, hi;
  };
  Intervals voxel_intervals() const;
  // Voxels outside every labelled set.
  std::vector<std::size_t> unlabeled() const;

  bool operator==(const ToyDoseSpec&) const = default;
};

struct ToyDoseReport {
  bool tumor_coverage = false;  // (1)
  bool tumor_hotspot = false;   // (2)
  bool urethra_max = false;     // (3)
  bool bladder_max = false;     // (4)

  bool all() const noexcept { return tumor_coverage && tumor_hotspot && urethra_max && bladder_max; }
};

// Evaluates constraints (1)-(4). Negative doses raise DomainError.
ToyDoseReport toy_dose_feasible(const ToyDoseSpec& spec, std::span<const double> x);

struct SamplerConfig {
  double shrink_margin = 0.5;
  double noise_std = 0.25;
  std::size_t n_feasible = 5000;
  std::size_t n_infeasible = 5000;
  // Padding added on every side of the bounding box for infeasible proposals.
  double infeasible_pad = 2.0;

  void validate() const;
  bool operator==(const SamplerConfig&) const = default;
};

class Region {
 public:
  enum class Kind { UnionOfBoxes, ToyDose };

  static Region union_of_boxes(std::vector<Box> boxes);
  static Region toy_dose(ToyDoseSpec spec);

  Kind kind() const noexcept;
  std::size_t dimension() const noexcept { return dimension_; }
  const Box& bounding_box() const noexcept { return bbox_; }
  const std::vector<Box>& boxes() const;
  const ToyDoseSpec& toy_spec() const;

  // Exact membership, closed inequalities.
  bool contains(std::span<const double> x) const;
  // Index of the first box containing x, or -1. Toy-dose regions report 0 for members.
  int component_of(std::span<const double> x) const;
  std::size_t component_count() const;
  // Membership in the region eroded by `margin`: every point x + margin*d with
  // d in {-1,0,1}^n must lie in the region. For toy-dose regions the margin
  // tightens each per-voxel interval instead.
  bool contains_shrunk(std::span<const double> x, double margin) const;

  std::vector<std::string> coordinate_names() const;

  bool operator==(const Region&) const = default;

 private:
  Region() = default;

  std::size_t dimension_ = 0;
  Box bbox_;
  std::variant<std::vector<Box>, ToyDoseSpec> shape_;
};

// The non-convex L-shaped set {-1<=x1<=17, 9<=x2<=17} u {9<=x1<=17, -1<=x2<=9}.
Region l_shape();

// Uniform points in the shrunk region plus isotropic Gaussian noise.
Matrix2 sample_feasible(const Region& region, const SamplerConfig& cfg, RandomStream& rng);
Matrix2 sample_feasible(const Region& region, const SamplerConfig& cfg, std::size_t count,
                        RandomStream& rng);

// Rejection samples of the padded bounding box that fall outside the region.
// Toy-dose proposals start inside the per-voxel sampling intervals and move one
// voxel into its padded interval.
Matrix2 sample_infeasible(const Region& region, const SamplerConfig& cfg, RandomStream& rng);
Matrix2 sample_infeasible(const Region& region, const SamplerConfig& cfg, std::size_t count,
                          RandomStream& rng);

}  // namespace ipman
