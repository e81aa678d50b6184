#include "ipman/kernels.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

#include "ipman/errors.hpp"

namespace ipman::kernels {

namespace {

// Below this many multiply-adds the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1u << 15;

void check_abt(const Matrix2& a, const Matrix2& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_abt: inner dimensions differ");
}
void check_ab(const Matrix2& a, const Matrix2& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul_ab: inner dimensions differ");
}
void check_atb(const Matrix2& a, const Matrix2& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_atb: inner dimensions differ");
}

inline void abt_row(const Matrix2& a, const Matrix2& b, Matrix2& c, std::size_t i) {
  const std::size_t k = a.cols();
  const double* ar = a.row(i).data();
  double* cr = c.row(i).data();
  for (std::size_t j = 0; j < b.rows(); ++j) {
    const double* br = b.row(j).data();
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += ar[p] * br[p];
    cr[j] = acc;
  }
}

inline void ab_row(const Matrix2& a, const Matrix2& b, Matrix2& c, std::size_t i) {
  const std::size_t m = b.cols();
  double* cr = c.row(i).data();
  for (std::size_t p = 0; p < a.cols(); ++p) {
    const double av = a(i, p);
    const double* br = b.row(p).data();
    for (std::size_t j = 0; j < m; ++j) cr[j] += av * br[j];
  }
}

inline void atb_row(const Matrix2& a, const Matrix2& b, Matrix2& c, std::size_t i) {
  const std::size_t m = b.cols();
  double* cr = c.row(i).data();
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const double av = a(p, i);
    const double* br = b.row(p).data();
    for (std::size_t j = 0; j < m; ++j) cr[j] += av * br[j];
  }
}

}  // namespace

namespace serial {

Matrix2 matmul_abt(const Matrix2& a, const Matrix2& b) {
  check_abt(a, b);
  Matrix2 c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) abt_row(a, b, c, i);
  return c;
}

Matrix2 matmul_ab(const Matrix2& a, const Matrix2& b) {
  check_ab(a, b);
  Matrix2 c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) ab_row(a, b, c, i);
  return c;
}

Matrix2 matmul_atb(const Matrix2& a, const Matrix2& b) {
  check_atb(a, b);
  Matrix2 c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) atb_row(a, b, c, i);
  return c;
}

}  // namespace serial

namespace omp {

Matrix2 matmul_abt(const Matrix2& a, const Matrix2& b) {
  check_abt(a, b);
  Matrix2 c(a.rows(), b.rows());
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
  const bool par = a.rows() * b.rows() * a.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < n; ++i) abt_row(a, b, c, static_cast<std::size_t>(i));
  return c;
}

Matrix2 matmul_ab(const Matrix2& a, const Matrix2& b) {
  check_ab(a, b);
  Matrix2 c(a.rows(), b.cols());
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
  const bool par = a.rows() * b.cols() * a.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < n; ++i) ab_row(a, b, c, static_cast<std::size_t>(i));
  return c;
}

Matrix2 matmul_atb(const Matrix2& a, const Matrix2& b) {
  check_atb(a, b);
  Matrix2 c(a.cols(), b.cols());
  const auto n = static_cast<std::ptrdiff_t>(a.cols());
  const bool par = a.rows() * b.cols() * a.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < n; ++i) atb_row(a, b, c, static_cast<std::size_t>(i));
  return c;
}

}  // namespace omp

void configure_workers_from_env() {
  if (const char* env = std::getenv("IPMAN_NUM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) omp_set_num_threads(n);
    } catch (const std::exception&) {
      throw ConfigError(std::string("IPMAN_NUM_THREADS is not an integer: ") + env);
    }
  }
}

}  // namespace ipman::kernels
