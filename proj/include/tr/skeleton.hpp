#pragma once

// Hierarchical skeleton sampling. Dimensions are grouped into d/3 cyclic
// triples (three staggered groupings cover all centers), triples are merged
// pairwise into a binary hierarchy of L = log2(d/3) levels, and alternating
// upward / downward passes pick, for every group, a small set of in-group
// assignments (in-skeletons) and complementary environment assignments
// (env-skeletons) by greedy column selection on sampled evaluation blocks.
// The final per-dimension environment sets drive the ALS sample sets.

#include <cstdint>
#include <optional>
#include <vector>

#include "tr/matrix.hpp"
#include "tr/rng.hpp"
#include "tr/tensor.hpp"

namespace tr {

class BlackBox;

// Cyclic grouping hierarchy for d = 3 * 2^L, L >= 1. `offset` in {-1, 0, +1}
// shifts the triple boundaries so that the three offsets together give every
// dimension a turn as a triple center.
class GroupTree {
 public:
  GroupTree(std::size_t d, int offset);

  std::size_t d() const { return d_; }
  int levels() const { return levels_; }
  int offset() const { return offset_; }
  std::size_t groups_at(int level) const { return std::size_t{1} << level; }

  // Dimensions of group k (1-based) at `level`, as a cyclic run.
  std::vector<int> group_dims(int level, std::size_t k) const;

  // Complement of group (level, k), as a cyclic run starting right after the
  // group's last dimension.
  std::vector<int> env_dims(int level, std::size_t k) const;

  // Center dimension of level-L triple k; the env set computed for that
  // triple becomes the per-dimension env set of its center.
  int center_dim(std::size_t k) const;

 private:
  std::size_t d_;
  int levels_;
  int offset_;
};

// Skeleton sets indexed by (level, group): sets(level)[k-1].
class LevelSets {
 public:
  LevelSets() = default;
  explicit LevelSets(int levels) : at_(static_cast<std::size_t>(levels)) {
    for (int l = 1; l <= levels; ++l)
      at_[static_cast<std::size_t>(l - 1)].resize(std::size_t{1} << l);
  }
  std::vector<SkeletonSet>& level(int l) {
    return at_[static_cast<std::size_t>(l - 1)];
  }
  const std::vector<SkeletonSet>& level(int l) const {
    return at_[static_cast<std::size_t>(l - 1)];
  }
  SkeletonSet& at(int l, std::size_t k) { return level(l)[k - 1]; }
  const SkeletonSet& at(int l, std::size_t k) const { return level(l)[k - 1]; }
  bool empty() const { return at_.empty(); }

 private:
  std::vector<std::vector<SkeletonSet>> at_;
};

// Upward pass: selects in-skeletons for every group from level L down to
// level 1. Environments come from `prior_envs` when given (a previous
// downward pass); otherwise level-L environments are s distinct uniform
// draws over the complement and coarser environments are s distinct draws
// from the product of the other groups' in-skeletons.
LevelSets upward_pass(BlackBox& oracle, const GroupTree& tree, std::size_t s,
                      const LevelSets* prior_envs, Rng& rng);

// Downward pass: level-1 environments are the swapped level-1 in-skeletons;
// each finer environment is selected from (sibling in-skeleton) x (parent
// environment). Deterministic given the in-skeletons.
LevelSets downward_pass(BlackBox& oracle, const GroupTree& tree,
                        const LevelSets& thetas_in, std::size_t s);

// Runs `passes` rounds of upward+downward for each of the three groupings
// and returns one env set per dimension k (over the complement of
// {k-1, k, k+1}), each holding s selected skeleton elements plus 5s distinct
// uniform extras (capped at the complement grid size, with a warning).
std::vector<SkeletonSet> build_all_envs(BlackBox& oracle, std::size_t d,
                                        std::size_t s, int passes,
                                        std::uint64_t seed);

// Evaluations of f on [n]^3 x env around center dimension k: row v is grid
// value x_k = v, and column (x_{k-1}-1) + n*(x_{k+1}-1) + n^2*(env index)
// spans the fully enumerated neighbor pair and the env elements.
struct SampleSet {
  int k = 0;
  std::size_t n = 0;
  SkeletonSet env;
  Matrix values;  // n  x  (n^2 * env.size())

  std::size_t col(int x_km1, int x_kp1, std::size_t env_index) const {
    return static_cast<std::size_t>(x_km1 - 1) +
           n * static_cast<std::size_t>(x_kp1 - 1) + n * n * env_index;
  }
  // Full grid point for (x_k = v, column c).
  MultiIndex point(std::size_t d, int v, std::size_t c) const;
};

SampleSet assemble_sample_set(BlackBox& oracle, int k, const SkeletonSet& env);

// Writes every env set as a readable sidecar (dimension labels, then one
// element per line).
void dump_skeletons(const std::vector<SkeletonSet>& envs,
                    const std::string& path);

}  // namespace tr
