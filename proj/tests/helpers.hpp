#pragma once

// Test-side reference implementations, deliberately independent of the
// library's linear algebra: brute-force ring contraction, naive dense
// products and solves, and small statistics shared by several suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tr/matrix.hpp"
#include "tr/rng.hpp"
#include "tr/tensor.hpp"
#include "tr/tensor_ring.hpp"
#include "tr/warn.hpp"

namespace trtest {

// |a - b| <= tol * max(1, |a|, |b|)
inline bool near(double a, double b, double tol) {
  const double scale = std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) <= tol * scale;
}

// Ring value by explicit summation over all bond-index tuples; exponential
// in d, so callers keep r^d small.
inline double brute_eval(const tr::TensorRing& ring, const tr::MultiIndex& x) {
  const std::size_t d = ring.d(), r = ring.rank();
  std::vector<std::size_t> bond(d, 0);
  double total = 0.0;
  while (true) {
    double term = 1.0;
    for (std::size_t k = 1; k <= d; ++k) {
      const std::size_t a = bond[k - 1];
      const std::size_t b = bond[k % d];
      term *= ring.core(k).at(a, x[k - 1], b);
    }
    total += term;
    std::size_t p = 0;
    while (p < d && ++bond[p] == r) bond[p++] = 0;
    if (p == d) break;
  }
  return total;
}

// All points of [n]^d, dimension 1 fastest.
inline std::vector<tr::MultiIndex> grid_points(std::size_t d, std::size_t n) {
  std::vector<tr::MultiIndex> pts;
  tr::MultiIndex x(d, 1);
  while (true) {
    pts.push_back(x);
    std::size_t p = 0;
    while (p < d && ++x[p] > static_cast<int>(n)) x[p++] = 1;
    if (p == d) break;
  }
  return pts;
}

inline tr::Matrix naive_matmul(const tr::Matrix& a, const tr::Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("naive_matmul shape");
  tr::Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < a.cols(); ++l) acc += a(i, l) * b(l, j);
      c(i, j) = acc;
    }
  return c;
}

// Gaussian elimination with partial pivoting; square well-conditioned input.
inline std::vector<double> gauss_solve(tr::Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("gauss shape");
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::fabs(a(i, c)) > std::fabs(a(piv, c))) piv = i;
    if (a(piv, c) == 0.0) throw std::runtime_error("gauss: singular");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
      std::swap(b[c], b[piv]);
    }
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
      b[i] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= a(ii, j) * x[j];
    x[ii] = acc / a(ii, ii);
  }
  return x;
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
inline double power_eig(const tr::Matrix& m, int iters = 200) {
  const std::size_t n = m.rows();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) w[i] += m(i, j) * v[j];
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    lambda = norm;
  }
  return lambda;
}

// Lower-middle order statistic, matching the CLI's median convention.
inline double median_low(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

// Spearman rank correlation with tie-averaged ranks.
inline std::vector<double> ranks_of(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = avg;
    i = j + 1;
  }
  return rank;
}

inline double spearman(const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("spearman: bad input");
  const auto rx = ranks_of(xs), ry = ranks_of(ys);
  const std::size_t n = xs.size();
  double mean = 0.5 * (static_cast<double>(n) + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Collects warnings for the current scope and restores the old sink.
struct WarnCapture {
  std::vector<std::string> messages;
  tr::WarnHandler old;
  WarnCapture() {
    old = tr::set_warn_handler(
        [this](const std::string& m) { messages.push_back(m); });
  }
  ~WarnCapture() { tr::set_warn_handler(old); }
  bool mentions(const std::string& needle) const {
    for (const auto& m : messages)
      if (m.find(needle) != std::string::npos) return true;
    return false;
  }
};

inline tr::Matrix random_matrix(std::size_t rows, std::size_t cols,
                                std::uint64_t seed) {
  tr::Rng rng(seed);
  tr::Matrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

}  // namespace trtest
