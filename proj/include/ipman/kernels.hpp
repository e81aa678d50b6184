#pragma once

#include "ipman/matrix.hpp"

// Dense products used by the network engine. Every kernel exists twice: a
// serial reference and an OpenMP variant. Both accumulate each output entry
// in the same order, so their results are bitwise identical regardless of the
// worker count.
namespace ipman::kernels {

namespace serial {
// C = A * B^T   (A: n x k, B: m x k)
Matrix2 matmul_abt(const Matrix2& a, const Matrix2& b);
// C = A * B     (A: n x k, B: k x m)
Matrix2 matmul_ab(const Matrix2& a, const Matrix2& b);
// C = A^T * B   (A: k x n, B: k x m)
Matrix2 matmul_atb(const Matrix2& a, const Matrix2& b);
}  // namespace serial

namespace omp {
Matrix2 matmul_abt(const Matrix2& a, const Matrix2& b);
Matrix2 matmul_ab(const Matrix2& a, const Matrix2& b);
Matrix2 matmul_atb(const Matrix2& a, const Matrix2& b);
}  // namespace omp

using omp::matmul_ab;
using omp::matmul_abt;
using omp::matmul_atb;

// Applies the IPMAN_NUM_THREADS environment variable, if set, as the worker cap.
void configure_workers_from_env();

}  // namespace ipman::kernels
