#pragma once

// Alternating least squares on the skeleton sample sets. Each core update is
// a ridge least-squares fit of one core against all samples in its set; the
// coefficient matrices are assembled with the env bond-products cached so a
// core update costs O(|env| * (d + n^2)) small matrix products. run() is the
// end-to-end pipeline: sampling, initialization, sweeps, held-out error.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tr/matrix.hpp"
#include "tr/skeleton.hpp"
#include "tr/tensor_ring.hpp"

namespace tr {

class BlackBox;

struct AlsConfig {
  std::size_t r = 1;
  std::size_t s = 4;
  double lambda = 1e-9;
  int max_sweeps = 30;
  double rel_tol = 1e-3;  // stop when relative E_skeleton improvement drops below
  int passes = 1;         // upward/downward rounds in the skeleton build
  std::uint64_t seed = 0;
  std::size_t eval_count = 100000;  // held-out eval set size cap
  bool proposed_init = true;        // false: i.i.d. standard normal cores
  bool init_z_from_env = false;     // draw initializer base points from env sets
  bool rank_increase_enabled = false;
  std::size_t rank_increase_target_r = 0;
  double rank_increase_variance = 1e-8;
};

// The coefficient matrices C for core k over the product sample set:
// C(x_{k-1}, x_{k+1}, z) = H^{k+1}[x_{k+1}] * P(z) * H^{k-1}[x_{k-1}], with
// the env chain product P(z) = H^{k+2}[z_{k+2}] ... H^{k-2}[z_{k-2}] computed
// once per env element and the partial product H^{k+1}[u] * P(z) shared
// across the n values of x_{k-1}. Matrices are indexed like SampleSet
// columns. mults() counts the r x r matrix products spent.
class CoefficientBatch {
 public:
  CoefficientBatch(const TensorRing& ring, int k, const SampleSet& set);

  std::size_t count() const { return c_.size(); }
  const Matrix& c(std::size_t idx) const { return c_[idx]; }
  std::uint64_t mults() const { return mults_; }

 private:
  std::vector<Matrix> c_;
  std::uint64_t mults_ = 0;
};

struct CoreUpdateStats {
  std::uint64_t mults = 0;       // r x r products in coefficient assembly
  double residual_before = 0.0;  // restricted l2 residual over the set
  double residual_after = 0.0;
};

// Refits core k in place over its sample set: per grid value v the slice
// H^k[v] solves min |A vec(H) - f|^2 + lambda * sigma * |H|^2 with the shared
// design matrix A of rows vec(C^T)^T. With lambda == 0 the restricted
// residual cannot increase; a violation is reported through the warning
// handler.
CoreUpdateStats solve_core(TensorRing& ring, int k, const SampleSet& set,
                           double lambda);

// Relative l2 error of the ring over the union of the sample sets
// (duplicate grid points deduplicated).
double skeleton_error(const TensorRing& ring,
                      const std::vector<SampleSet>& sets);

struct SweepStats {
  double e_skeleton = 0.0;  // after the sweep
  std::uint64_t mults = 0;
};

// One sweep: solve_core for k = 1..d in order.
SweepStats als_sweep(TensorRing& ring, const std::vector<SampleSet>& sets,
                     double lambda);

// Grows every bond dimension by one: each slice H becomes
// [[H, e1], [e2, 1]] with e entries i.i.d. Gaussian(0, variance). In the
// variance -> 0 limit the new ring evaluates to the old value plus exactly 1
// (the appended unit diagonal forms a parallel all-ones loop).
TensorRing rank_increase(const TensorRing& ring, double variance,
                         std::uint64_t seed);

// Ring with i.i.d. standard normal core entries.
TensorRing random_ring(std::size_t d, std::size_t n, std::size_t r,
                       std::uint64_t seed);

struct RunReport {
  double e = 0.0;                // held-out relative error
  double e_skeleton = 0.0;       // final skeleton-set error
  double e_skeleton_init = 0.0;  // before the first sweep
  std::vector<double> history;   // E_skeleton after each sweep
  int sweeps = 0;
  std::uint64_t calls = 0;           // oracle calls used for training
  std::uint64_t calls_sampling = 0;  // after skeleton build + assembly
  std::uint64_t calls_init = 0;      // after initialization
  double fraction = 0.0;             // calls / n^d
  std::uint64_t mults = 0;           // coefficient-assembly matrix products
  std::uint64_t core_updates = 0;
  double t_sampling = 0.0;  // phase wall times, seconds
  double t_init = 0.0;
  double t_sweeps = 0.0;
  double t_eval = 0.0;
  std::vector<double> init_residuals;  // per-bond gauge residuals (proposed init)
};

struct RunResult {
  TensorRing ring;
  RunReport report;
  std::vector<SkeletonSet> envs;  // the per-dimension env sets used
};

// Full pipeline. Training oracle calls are snapshotted before the held-out
// evaluation, so report.calls and report.fraction exclude it.
RunResult run(BlackBox& oracle, const AlsConfig& cfg);

}  // namespace tr
