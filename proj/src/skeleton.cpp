#include "tr/skeleton.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "tr/linalg.hpp"
#include "tr/oracle.hpp"
#include "tr/warn.hpp"

namespace tr {

namespace {

int wrap_dim(long long raw, std::size_t d) {
  const long long dd = static_cast<long long>(d);
  long long m = (raw - 1) % dd;
  if (m < 0) m += dd;
  return static_cast<int>(m) + 1;
}

// grid size of the complement of a group with `env_count` dimensions,
// saturating at `cap`
std::size_t env_space(std::size_t n, std::size_t env_count, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < env_count; ++i) {
    if (total >= cap / n + 1) return cap;
    total *= n;
  }
  return std::min(total, cap);
}

// All assignments over `dims`, first dimension fastest.
SkeletonSet enumerate_all(const std::vector<int>& dims, std::size_t n) {
  SkeletonSet out;
  out.dims = dims;
  std::size_t total = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) total *= n;
  out.elements.reserve(total);
  std::vector<int> elem(dims.size(), 1);
  for (std::size_t flat = 0; flat < total; ++flat) {
    out.elements.push_back(elem);
    for (std::size_t j = 0; j < dims.size(); ++j) {
      if (++elem[j] <= static_cast<int>(n)) break;
      elem[j] = 1;
    }
  }
  return out;
}

// `count` distinct uniform assignments over `dims` (all of them if the grid
// is no larger than count).
SkeletonSet random_distinct(const std::vector<int>& dims, std::size_t n,
                            std::size_t count, Rng& rng) {
  const std::size_t space = env_space(n, dims.size(), count + 1);
  if (space <= count) return enumerate_all(dims, n);
  SkeletonSet out;
  out.dims = dims;
  std::set<std::vector<int>> seen;
  while (out.elements.size() < count) {
    std::vector<int> elem(dims.size());
    for (auto& v : elem) v = rng.uniform_index(static_cast<int>(n));
    if (seen.insert(elem).second) out.elements.push_back(std::move(elem));
  }
  return out;
}

// Product set A x B: dims concatenated, first factor fastest.
SkeletonSet product_set(const SkeletonSet& a, const SkeletonSet& b) {
  SkeletonSet out;
  out.dims = a.dims;
  out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
  out.elements.reserve(a.size() * b.size());
  for (std::size_t ib = 0; ib < b.size(); ++ib)
    for (std::size_t ia = 0; ia < a.size(); ++ia) {
      std::vector<int> e = a.elements[ia];
      e.insert(e.end(), b.elements[ib].begin(), b.elements[ib].end());
      out.elements.push_back(std::move(e));
    }
  return out;
}

SkeletonSet take_columns(const SkeletonSet& cands, const std::vector<int>& piv) {
  SkeletonSet out;
  out.dims = cands.dims;
  out.elements.reserve(piv.size());
  for (int p : piv)
    out.elements.push_back(cands.elements[static_cast<std::size_t>(p - 1)]);
  return out;
}

}  // namespace

GroupTree::GroupTree(std::size_t d, int offset) : d_(d), offset_(offset) {
  if (offset < -1 || offset > 1)
    throw std::invalid_argument("GroupTree: offset must be -1, 0, or +1");
  std::size_t t = d / 3;
  if (d < 6 || d % 3 != 0 || (t & (t - 1)) != 0)
    throw std::invalid_argument("GroupTree: d must be 3*2^L with L >= 1");
  levels_ = 0;
  while (t > 1) {
    t >>= 1;
    ++levels_;
  }
}

std::vector<int> GroupTree::group_dims(int level, std::size_t k) const {
  if (level < 1 || level > levels_ || k < 1 || k > groups_at(level))
    throw std::out_of_range("GroupTree: bad level/group");
  const std::size_t span = d_ >> level;  // 3 * 2^(L - level)
  const long long start =
      static_cast<long long>((k - 1) * span) + 1 + offset_;
  std::vector<int> dims(span);
  for (std::size_t j = 0; j < span; ++j)
    dims[j] = wrap_dim(start + static_cast<long long>(j), d_);
  return dims;
}

std::vector<int> GroupTree::env_dims(int level, std::size_t k) const {
  const std::size_t span = d_ >> level;
  const long long start =
      static_cast<long long>((k - 1) * span) + 1 + offset_ +
      static_cast<long long>(span);
  std::vector<int> dims(d_ - span);
  for (std::size_t j = 0; j < dims.size(); ++j)
    dims[j] = wrap_dim(start + static_cast<long long>(j), d_);
  return dims;
}

int GroupTree::center_dim(std::size_t k) const {
  if (k < 1 || k > d_ / 3) throw std::out_of_range("GroupTree: bad triple");
  return wrap_dim(static_cast<long long>(3 * (k - 1)) + 2 + offset_, d_);
}

LevelSets upward_pass(BlackBox& oracle, const GroupTree& tree, std::size_t s,
                      const LevelSets* prior_envs, Rng& rng) {
  const int L = tree.levels();
  const std::size_t n = oracle.grid();
  LevelSets in(L);
  LevelSets fresh_envs(L);  // environments sampled on the way down the levels

  // level-L candidate sets: every triple assignment
  std::vector<SkeletonSet> cands(tree.groups_at(L));
  for (std::size_t k = 1; k <= tree.groups_at(L); ++k)
    cands[k - 1] = enumerate_all(tree.group_dims(L, k), n);

  for (int l = L; l >= 1; --l) {
    const std::size_t groups = tree.groups_at(l);
    for (std::size_t k = 1; k <= groups; ++k) {
      const SkeletonSet* env;
      if (prior_envs) {
        env = &prior_envs->at(l, k);
      } else if (l == L) {
        fresh_envs.at(l, k) = random_distinct(tree.env_dims(l, k), n, s, rng);
        env = &fresh_envs.at(l, k);
      } else {
        env = &fresh_envs.at(l, k);  // filled when level l+1 finished
      }
      Matrix block = subsample(oracle, *env, cands[k - 1]);
      in.at(l, k) = take_columns(cands[k - 1], rrqr_select(block, s));
    }

    if (l == 1) break;

    // prepare level l-1: merged candidates and, when no prior environments
    // exist, environments drawn from the other groups' in-skeletons
    std::vector<SkeletonSet> parents(tree.groups_at(l - 1));
    for (std::size_t j = 1; j <= tree.groups_at(l - 1); ++j) {
      parents[j - 1] = product_set(in.at(l, 2 * j - 1), in.at(l, 2 * j));
      if (!prior_envs) {
        // product over groups m != 2j-1, 2j of their in-skeletons
        std::vector<const SkeletonSet*> others;
        for (std::size_t m = 1; m <= groups; ++m)
          if (m != 2 * j - 1 && m != 2 * j) others.push_back(&in.at(l, m));
        std::size_t space = 1;
        const std::size_t cap = s + 1;
        for (auto* o : others) space = std::min(space * o->size(), cap);

        SkeletonSet env;
        for (auto* o : others)
          env.dims.insert(env.dims.end(), o->dims.begin(), o->dims.end());
        std::set<std::vector<std::size_t>> seen;
        const std::size_t want = std::min(s, space);
        while (env.elements.size() < want) {
          std::vector<std::size_t> choice(others.size());
          if (space <= s) {  // enumerate instead of rejection-sampling
            std::size_t flat = env.elements.size();
            for (std::size_t t = 0; t < others.size(); ++t) {
              choice[t] = flat % others[t]->size();
              flat /= others[t]->size();
            }
          } else {
            for (std::size_t t = 0; t < others.size(); ++t)
              choice[t] = rng.uniform_below(others[t]->size());
            if (!seen.insert(choice).second) continue;
          }
          std::vector<int> elem;
          for (std::size_t t = 0; t < others.size(); ++t) {
            const auto& src = others[t]->elements[choice[t]];
            elem.insert(elem.end(), src.begin(), src.end());
          }
          env.elements.push_back(std::move(elem));
        }
        fresh_envs.at(l - 1, j) = std::move(env);
      }
    }
    cands = std::move(parents);
  }
  return in;
}

LevelSets downward_pass(BlackBox& oracle, const GroupTree& tree,
                        const LevelSets& thetas_in, std::size_t s) {
  const int L = tree.levels();
  LevelSets envs(L);
  envs.at(1, 1) = thetas_in.at(1, 2);
  envs.at(1, 2) = thetas_in.at(1, 1);
  for (int l = 2; l <= L; ++l) {
    for (std::size_t k = 1; k <= tree.groups_at(l); ++k) {
      const std::size_t sibling = (k % 2 == 1) ? k + 1 : k - 1;
      const std::size_t parent = (k + 1) / 2;
      SkeletonSet cols =
          product_set(thetas_in.at(l, sibling), envs.at(l - 1, parent));
      Matrix block = subsample(oracle, thetas_in.at(l, k), cols);
      envs.at(l, k) = take_columns(cols, rrqr_select(block, s));
    }
  }
  return envs;
}

std::vector<SkeletonSet> build_all_envs(BlackBox& oracle, std::size_t d,
                                        std::size_t s, int passes,
                                        std::uint64_t seed) {
  if (passes < 1) throw std::invalid_argument("build_all_envs: passes < 1");
  const std::size_t n = oracle.grid();
  Rng rng(seed);
  std::vector<SkeletonSet> result(d + 1);  // 1-based by center dimension

  for (int offset : {0, 1, -1}) {
    GroupTree tree(d, offset);
    const int L = tree.levels();
    LevelSets envs;
    for (int pass = 0; pass < passes; ++pass) {
      LevelSets in =
          upward_pass(oracle, tree, s, envs.empty() ? nullptr : &envs, rng);
      envs = downward_pass(oracle, tree, in, s);
    }
    for (std::size_t k = 1; k <= tree.groups_at(L); ++k) {
      SkeletonSet env = envs.at(L, k);
      const std::size_t space = env_space(n, env.dims.size(), 7 * s);
      const std::size_t target = std::min(6 * s, space);
      if (target < 6 * s)
        warn("build_all_envs: env grid smaller than 6s, set truncated");
      std::set<std::vector<int>> seen(env.elements.begin(),
                                      env.elements.end());
      if (space <= target) {
        SkeletonSet all = enumerate_all(env.dims, n);
        for (auto& e : all.elements)
          if (env.elements.size() < target && seen.insert(e).second)
            env.elements.push_back(std::move(e));
      }
      while (env.elements.size() < target) {
        std::vector<int> elem(env.dims.size());
        for (auto& v : elem) v = rng.uniform_index(static_cast<int>(n));
        if (seen.insert(elem).second) env.elements.push_back(std::move(elem));
      }
      result[static_cast<std::size_t>(tree.center_dim(k))] = std::move(env);
    }
  }
  result.erase(result.begin());  // drop the unused slot 0
  return result;
}

MultiIndex SampleSet::point(std::size_t d, int v, std::size_t c) const {
  MultiIndex x(d, 0);
  const std::size_t nn = n;
  const int x_km1 = static_cast<int>(c % nn) + 1;
  const int x_kp1 = static_cast<int>((c / nn) % nn) + 1;
  const std::size_t ei = c / (nn * nn);
  x[static_cast<std::size_t>(wrap_dim(k - 1, d) - 1)] = x_km1;
  x[static_cast<std::size_t>(wrap_dim(k, d) - 1)] = v;
  x[static_cast<std::size_t>(wrap_dim(k + 1, d) - 1)] = x_kp1;
  const auto& elem = env.elements[ei];
  for (std::size_t j = 0; j < env.dims.size(); ++j)
    x[static_cast<std::size_t>(env.dims[j] - 1)] = elem[j];
  return x;
}

SampleSet assemble_sample_set(BlackBox& oracle, int k, const SkeletonSet& env) {
  const std::size_t d = oracle.dim(), n = oracle.grid();
  SampleSet set;
  set.k = k;
  set.n = n;
  set.env = env;
  set.values = Matrix(n, n * n * env.size());
  for (std::size_t c = 0; c < set.values.cols(); ++c)
    for (std::size_t v = 1; v <= n; ++v)
      set.values(v - 1, c) =
          oracle(set.point(d, static_cast<int>(v), c));
  return set;
}

void dump_skeletons(const std::vector<SkeletonSet>& envs,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_skeletons: cannot open " + path);
  for (std::size_t k = 0; k < envs.size(); ++k) {
    out << "env " << k + 1 << " dims";
    for (int dlabel : envs[k].dims) out << " " << dlabel;
    out << "\n";
    for (const auto& e : envs[k].elements) {
      for (std::size_t j = 0; j < e.size(); ++j)
        out << (j ? " " : "") << e[j];
      out << "\n";
    }
  }
}

}  // namespace tr
