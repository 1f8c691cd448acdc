#pragma once

// Black-box access to a function on [n]^d with memoization and a
// distinct-evaluation counter, plus the benchmark function families.
//
// The counter increments on every cache miss. With the cache unbounded (the
// default) it equals the number of distinct grid points ever evaluated; with
// an LRU bound, a point recomputed after eviction counts again.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "tr/tensor.hpp"
#include "tr/tensor_ring.hpp"

namespace tr {

class BlackBox {
 public:
  using Fn = std::function<double(const MultiIndex&)>;

  // max_cache_entries == 0 keeps every computed value (no eviction).
  BlackBox(std::size_t d, std::size_t n, Fn fn,
           std::size_t max_cache_entries = 0);
  ~BlackBox();
  BlackBox(BlackBox&&) noexcept;
  BlackBox& operator=(BlackBox&&) noexcept;

  // Cached evaluation. Concurrent calls are safe: readers share the cache
  // lock, writers take it exclusively, and the counter is atomic.
  double operator()(const MultiIndex& x);

  std::size_t dim() const;
  std::size_t grid() const;

  // distinct evaluations so far (cache hits do not count)
  std::uint64_t calls() const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

// f(x) = 1 / sqrt(1 + sum_k t_k^2) on the uniform grid t_k = (i_k-1)/(n-1)
// over [0,1] (n == 1 pins t = 0).
BlackBox toy_oracle(std::size_t d, std::size_t n);

// Free energy -log(Tr prod_k M(J_{i_k})) / beta of a periodic spin chain
// whose transfer matrix at coupling J is [[e^{bJ}, e^{-bJ}], [e^{-bJ},
// e^{bJ}]]. The product is accumulated with per-step rescaling (factor out
// the largest entry, accumulate its log), so large beta*|J|*d cannot
// overflow. Grid value i selects coupling levels[i-1]; n = levels.size().
BlackBox ising_oracle(std::size_t d, double beta = 10.0,
                      std::vector<double> levels = {-2.5, -1.5, 1.0, 2.0});

// Effective coefficient of a 1D two-scale diffusion problem: the harmonic
// mean d / sum_k a_{i_k} with cell values a drawn from `levels`.
BlackBox pde_oracle(std::size_t d, std::vector<double> levels = {1.0, 2.0, 3.0});

// Wraps an explicit ring as a black box (exact low-rank ground truth).
BlackBox synthetic_tr_oracle(TensorRing ring);

// Random positive ring with rank-one slices H^k[v] = p_k(v) q_k(v)^T
// (log-normal entries): the function is a cyclic chain of pairwise positive
// potentials, every contiguous slice product has rank one, and the minimal
// ring rank is r generically. `mix` blends in a positive full-rank
// perturbation per slice to degrade the rank-one structure continuously.
TensorRing gibbs_chain_ring(std::size_t d, std::size_t n, std::size_t r,
                            std::uint64_t seed, double mix = 0.0);

}  // namespace tr
