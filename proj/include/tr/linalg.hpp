#pragma once

// Deterministic dense factorizations used by the pipeline. Determinism
// matters more than speed here: fixed algorithms, no threading, documented
// tie-breaks, and a fixed sign convention, so identical inputs give identical
// outputs on every run.

#include <cstddef>
#include <vector>

#include "tr/matrix.hpp"

namespace tr {

// M ~ u * diag(sigma) * v^T with orthonormal columns in u and v.
struct Svd {
  Matrix u;                   // m x k
  std::vector<double> sigma;  // k, nonincreasing, all > 0
  Matrix v;                   // n x k
};

// Best rank-r approximation factors. Retains k = min(r, numerical rank)
// columns, where the numerical rank counts singular values above
// rank_tol * sigma_1 (a zero matrix retains none). Sign convention: the
// largest-magnitude entry of each left singular vector is positive, ties
// broken by lowest row index, so the factors are unique for simple spectra.
Svd truncated_svd(const Matrix& m, std::size_t r, double rank_tol = 1e-14);

// Greedy column selection by pivoted Householder QR: repeatedly pick the
// column with the largest residual norm after orthogonalization against the
// picks so far. Returns min(s, #cols) distinct 1-based column indices in
// pivot order. Within a relative tolerance `tie_tol`, tied residual norms go
// to the lowest column index, making selection deterministic.
std::vector<int> rrqr_select(const Matrix& m, std::size_t s,
                             double tie_tol = 1e-12);

// Ridge least squares: minimizes |A h - b|^2 + lambda * sigma * |h|^2 per
// right-hand-side column, where sigma is the largest singular value of A^T A
// (the squared spectral norm of A). Solves the shifted normal equations for
// lambda > 0; lambda == 0 returns the minimum-norm least-squares solution.
Matrix ridge_ls(const Matrix& a, const Matrix& b, double lambda);

// Moore-Penrose pseudo-inverse; singular values below tol * sigma_1 are
// treated as zero.
Matrix pinv(const Matrix& m, double tol = 1e-12);

}  // namespace tr
