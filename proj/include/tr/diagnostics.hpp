#pragma once

// Structure measurements on rings and oracles: slice-product spectra,
// near-rank-1 ratios of frozen unfoldings, and segment condition numbers.
// These quantify how close a function is to a Markov-factorizable chain and
// how well-conditioned the ring's segments are, which together bound the
// quality of skeleton selection.

#include <cstddef>
#include <vector>

#include "tr/matrix.hpp"
#include "tr/tensor_ring.hpp"

namespace tr {

class BlackBox;

// Ordered product of slices over a cyclically contiguous run of dimensions:
// region = (j, j+1, ..., j+m-1) with cyclic wrap, x_region the grid values
// for those dimensions in the same order. Throws on a non-contiguous region.
Matrix segment_product(const TensorRing& ring, const std::vector<int>& region,
                       const std::vector<int>& x_region);

// sigma_1(B)^2 / |B|_F^2, in (0, 1]; equals 1 exactly when B is an outer
// product. Throws on a zero matrix.
double rank1_ratio(const Matrix& b);

// Four disjoint dimension groups covering [d]. For the chain arguments the
// ring order is a, c1, b, c2 (two sampled regions separated by two
// connecting segments), but alpha_ratio itself accepts any exact cover.
struct Partition {
  std::vector<int> a, b, c1, c2;
};

// Empirical near-rank-1 ratio of the c1-vs-c2 unfolding of f with a and b
// frozen at z (z lists values for a, then for b). Refuses when the unfolding
// exceeds `budget` entries.
double alpha_ratio(BlackBox& oracle, const Partition& part,
                   const std::vector<int>& z,
                   std::size_t budget = 10'000'000);

// Condition number of the segment's unfolding with the two bond legs grouped
// as rows (r^2 of them) and the segment grid as columns: sigma_1 / sigma_{r^2},
// +inf when the unfolding is rank-deficient. Requires n^{|segment|} >= r^2.
double condition_kappa(const TensorRing& ring,
                       const std::vector<int>& segment);

}  // namespace tr
