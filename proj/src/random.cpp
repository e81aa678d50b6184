#include "ipman/random.hpp"

namespace ipman {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double RandomStream::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine_);
}

double RandomStream::normal(double mean, double stddev) {
  return mean + stddev * normal_(engine_);
}

std::size_t RandomStream::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Matrix2 RandomStream::normal_matrix(std::size_t rows, std::size_t cols) {
  Matrix2 m(rows, cols);
  for (double& v : m.values()) v = normal_(engine_);
  return m;
}

std::vector<std::size_t> RandomStream::indices(std::size_t count, std::size_t n) {
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = index(n);
  return out;
}

RandomStream RandomStream::fork(std::string_view label) const {
  // FNV-1a over the label, mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return RandomStream(splitmix64(seed_ ^ h));
}

}  // namespace ipman
