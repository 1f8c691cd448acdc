#pragma once

// Flat arithmetic kernels behind the dense containers. Every operation has a
// scalar reference implementation; on x86 an AVX2 variant and on aarch64 a
// NEON variant are selected at startup through a function table. The active
// backend can be overridden with the TR_KERNELS environment variable
// ("scalar", "avx2", "neon") or forced from code, which the equivalence tests
// use to compare backends on identical inputs.
//
// Reproducibility note: elementwise kernels (axpy, scal, gemm_acc) perform
// the same per-element operation in every backend and are bit-exact across
// them. Reductions (dot, sumsq) reassociate across lanes, so backends agree
// only to rounding; within one process the backend is fixed, so repeated
// runs are bit-identical.

#include <cstddef>

namespace tr::kernels {

enum class Backend { scalar, avx2, neon };

// Backend chosen at startup (best supported, or TR_KERNELS override).
Backend active();

// Force a backend; returns false (and leaves the table unchanged) if the
// backend is not supported on this machine.
bool force(Backend b);

const char* name(Backend b);

// x . y over n entries
double dot(const double* x, const double* y, std::size_t n);

// sum of squares of x over n entries
double sumsq(const double* x, std::size_t n);

// y += a * x over n entries
void axpy(double a, const double* x, double* y, std::size_t n);

// x *= a over n entries
void scal(double a, double* x, std::size_t n);

// C += A * B with column-major operands: A is m x k (leading dim lda),
// B is k x n (ldb), C is m x n (ldc).
void gemm_acc(std::size_t m, std::size_t n, std::size_t k,
              const double* a, std::size_t lda,
              const double* b, std::size_t ldb,
              double* c, std::size_t ldc);

}  // namespace tr::kernels
