#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ipman/matrix.hpp"

namespace ipman {

// Seeded pseudo-random stream. Identical seeds give identical draw sequences.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  Matrix2 normal_matrix(std::size_t rows, std::size_t cols);
  std::vector<std::size_t> indices(std::size_t count, std::size_t n);

  // Independent child stream derived from this stream's seed and a label;
  // does not advance this stream.
  RandomStream fork(std::string_view label) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ipman
