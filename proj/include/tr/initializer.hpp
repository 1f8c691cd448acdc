#pragma once

// Ring initialization from local data. For every dimension k a 3D block of f
// over (k-1, k, k+1) with all other dimensions frozen at a point z is
// factored by a two-step truncated SVD into a left / center / right triple;
// a per-bond gauge matrix, fit on a 4D block over (k-1 .. k+2), then stitches
// the center factors into a consistent ring.

#include <cstdint>
#include <vector>

#include "tr/matrix.hpp"
#include "tr/rng.hpp"
#include "tr/tensor.hpp"
#include "tr/tensor_ring.hpp"

namespace tr {

class BlackBox;

// Factors of the local block T = f(., ., ., z) over (k-1, k, k+1):
// T(a, y, u) ~ sum_{i,j} tl(a,i) * tc(i, y, j) * tr(j, u). The square roots
// of the two singular spectra are split between the outer factors and the
// center so that tl * tc * tr reproduces the block while tc alone carries
// the core candidate. If a spectrum truncates below r, the factors are
// zero-padded to keep shapes at r (pseudo-inverted square roots) and a
// rank-deficiency warning is emitted.
struct LocalTriple {
  int k = 0;
  Matrix tl;                    // n x r
  TRCore tc;                    // r x n x r
  Matrix tr_m;                  // r x n
  std::vector<double> sigma_l;  // length r, zero-padded past the rank
  std::vector<double> sigma_r;
  bool deficient = false;
};

// z: single-element skeleton over the complement of {k-1, k, k+1}.
LocalTriple local_tt_svd(BlackBox& oracle, int k, std::size_t r,
                         const SkeletonSet& z);

// Bond gauge between core k and core k+1, fit by least squares on a 4D block
// S = f(., ., ., ., z') over (k-1 .. k+2): with L = tl_k (.) tc_k and
// R = tc_{k+1} (.) tr_{k+1}, solves min_G | L G R - S | over the r^2
// unknowns (minimum-norm when rank-deficient).
struct Gauge {
  Matrix g;                  // r x r
  double rel_residual = 0.0; // |L G R - S|_F / |S|_F
};

Gauge solve_gauge(BlackBox& oracle, const LocalTriple& left,
                  const LocalTriple& right, const SkeletonSet& z);

// Applies solve_gauge around the ring and absorbs each gauge into the core
// on its left: H^k[v] = tc_k[v] * G^k. Every bond's frozen point is the
// restriction of one shared base point (`base`, drawn uniformly from rng
// when null) so the local sections stay mutually consistent. The d local
// solves cannot pin the product of all gauges around the cycle, so the one
// leftover global scalar is fit on a few probe points and absorbed into the
// first core. Optionally reports per-bond relative residuals.
TensorRing gauge_fix(BlackBox& oracle, const std::vector<LocalTriple>& triples,
                     Rng& rng, std::vector<double>* residuals = nullptr,
                     const MultiIndex* base = nullptr);

struct InitOptions {
  std::size_t r = 1;
  std::uint64_t seed = 0;
  // When set, the frozen points z are drawn from these per-dimension env
  // sets (dims must match the complement of each triple); otherwise z is
  // uniform on the complement grid.
  const std::vector<SkeletonSet>* env_sets = nullptr;
};

// Full initialization: one local SVD triple per dimension, then gauge
// fixing. Without env sets all frozen points are restrictions of a single
// uniformly drawn base point, which keeps the per-block sections consistent
// with the gauge blocks; with env sets each z is drawn from the matching
// per-dimension set. Requires d >= 4.
TensorRing initialize_ring(BlackBox& oracle, const InitOptions& opt,
                           std::vector<double>* residuals = nullptr);

}  // namespace tr
