#include "tr/als.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

#include "tr/initializer.hpp"
#include "tr/kernels.hpp"
#include "tr/linalg.hpp"
#include "tr/oracle.hpp"
#include "tr/warn.hpp"

namespace tr {

namespace {

std::size_t wrap_core(long long k, std::size_t d) {
  const long long dd = static_cast<long long>(d);
  long long m = (k - 1) % dd;
  if (m < 0) m += dd;
  return static_cast<std::size_t>(m) + 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// sqrt of the summed squared residuals |A vec(H^k[v]) - b_v|^2 over all v
double restricted_residual(const Matrix& a, const Matrix& b,
                           const TRCore& core) {
  const std::size_t rows = a.rows(), unknowns = a.cols(), n = core.grid();
  double total = 0.0;
  Matrix fit(rows, 1);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < rows; ++i) fit(i, 0) = 0.0;
    kernels::gemm_acc(rows, 1, unknowns, a.data(), rows,
                      core.slice_data(static_cast<int>(v + 1)), unknowns,
                      fit.data(), rows);
    for (std::size_t i = 0; i < rows; ++i) {
      const double diff = fit(i, 0) - b(i, v);
      total += diff * diff;
    }
  }
  return std::sqrt(total);
}

}  // namespace

CoefficientBatch::CoefficientBatch(const TensorRing& ring, int k,
                                   const SampleSet& set) {
  const std::size_t d = ring.d(), n = ring.n(), r = ring.rank();
  if (set.k != k)
    throw std::invalid_argument(
        "coefficient_batch: sample set belongs to a different core");
  if (set.n != n)
    throw std::invalid_argument("coefficient_batch: grid size mismatch");
  const std::vector<int>& env_dims = set.env.dims;
  if (env_dims.size() + 3 != d)
    throw std::invalid_argument("coefficient_batch: env order mismatch");
  // position of each complement dimension (ring order k+2 .. k-2) within the
  // env set's own storage order
  std::vector<std::size_t> pos(env_dims.size());
  for (std::size_t j = 0; j < env_dims.size(); ++j) {
    const std::size_t want = wrap_core(k + 2 + static_cast<long long>(j), d);
    std::size_t found = env_dims.size();
    for (std::size_t p = 0; p < env_dims.size(); ++p)
      if (static_cast<std::size_t>(env_dims[p]) == want) {
        found = p;
        break;
      }
    if (found == env_dims.size())
      throw std::invalid_argument(
          "coefficient_batch: env dims must cover the complement of the "
          "triple");
    pos[j] = found;
  }

  std::vector<Matrix> left(n), right(n);
  for (std::size_t v = 1; v <= n; ++v) {
    left[v - 1] = ring.core(wrap_core(k - 1, d)).slice(static_cast<int>(v));
    right[v - 1] = ring.core(wrap_core(k + 1, d)).slice(static_cast<int>(v));
  }

  const std::size_t ne = set.env.elements.size();
  c_.resize(n * n * ne);
  for (std::size_t e = 0; e < ne; ++e) {
    // env chain product, ring order k+2 .. k-2
    Matrix p;
    bool have = false;
    for (std::size_t j = 0; j < env_dims.size(); ++j) {
      const std::size_t dim = wrap_core(k + 2 + static_cast<long long>(j), d);
      Matrix h = ring.core(dim).slice(set.env.elements[e][pos[j]]);
      if (!have) {
        p = std::move(h);
        have = true;
      } else {
        p = matmul(p, h);
        ++mults_;
      }
    }
    if (!have) p = Matrix::identity(r);

    for (std::size_t u = 0; u < n; ++u) {
      Matrix q = matmul(right[u], p);
      ++mults_;
      for (std::size_t a = 0; a < n; ++a) {
        c_[a + n * u + n * n * e] = matmul(q, left[a]);
        ++mults_;
      }
    }
  }
}

CoreUpdateStats solve_core(TensorRing& ring, int k, const SampleSet& set,
                           double lambda) {
  const std::size_t n = ring.n(), r = ring.rank();
  CoefficientBatch batch(ring, k, set);
  const std::size_t rows = batch.count();

  // shared design matrix: row per sample column, unknowns vec(H^k[v])
  Matrix a(rows, r * r);
  for (std::size_t row = 0; row < rows; ++row) {
    const Matrix& c = batch.c(row);
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < r; ++i) a(row, i + r * j) = c(j, i);
  }
  Matrix b(rows, n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t row = 0; row < rows; ++row)
      b(row, v) = set.values(v, row);

  TRCore& core = ring.core(static_cast<std::size_t>(k));
  CoreUpdateStats stats;
  stats.mults = batch.mults();
  stats.residual_before = restricted_residual(a, b, core);

  Matrix x = ridge_ls(a, b, lambda);
  for (std::size_t v = 0; v < n; ++v) {
    double* slice = core.slice_data(static_cast<int>(v + 1));
    for (std::size_t q = 0; q < r * r; ++q) slice[q] = x(q, v);
  }

  stats.residual_after = restricted_residual(a, b, core);
  if (lambda == 0.0 &&
      stats.residual_after > stats.residual_before * (1.0 + 1e-9) + 1e-300)
    warn("solve_core: restricted residual increased under exact least squares "
         "at core " +
         std::to_string(k));
  return stats;
}

double skeleton_error(const TensorRing& ring,
                      const std::vector<SampleSet>& sets) {
  const std::size_t d = ring.d(), n = ring.n();
  std::unordered_set<MultiIndex, MultiIndexHash> seen;
  std::vector<MultiIndex> points;
  std::vector<double> values;
  for (const SampleSet& set : sets) {
    const std::size_t cols = set.values.cols();
    for (std::size_t v = 1; v <= n; ++v)
      for (std::size_t c = 0; c < cols; ++c) {
        MultiIndex x = set.point(d, static_cast<int>(v), c);
        if (seen.insert(x).second) {
          points.push_back(std::move(x));
          values.push_back(set.values(v - 1, c));
        }
      }
  }
  return error_E(ring, points, values);
}

SweepStats als_sweep(TensorRing& ring, const std::vector<SampleSet>& sets,
                     double lambda) {
  if (sets.size() != ring.d())
    throw std::invalid_argument("als_sweep: need one sample set per core");
  SweepStats out;
  for (std::size_t k = 1; k <= ring.d(); ++k)
    out.mults +=
        solve_core(ring, static_cast<int>(k), sets[k - 1], lambda).mults;
  out.e_skeleton = skeleton_error(ring, sets);
  return out;
}

TensorRing rank_increase(const TensorRing& ring, double variance,
                         std::uint64_t seed) {
  if (variance < 0.0)
    throw std::invalid_argument("rank_increase: negative variance");
  const std::size_t d = ring.d(), n = ring.n();
  const double dev = std::sqrt(variance);
  Rng rng(seed);
  std::vector<TRCore> cores;
  cores.reserve(d);
  for (std::size_t k = 1; k <= d; ++k) {
    const TRCore& old = ring.core(k);
    const std::size_t rl = old.rank_left(), rr = old.rank_right();
    TRCore nc(rl + 1, n, rr + 1);
    for (std::size_t v = 1; v <= n; ++v) {
      const int vi = static_cast<int>(v);
      for (std::size_t j = 0; j < rr; ++j)
        for (std::size_t i = 0; i < rl; ++i)
          nc.at(i, vi, j) = old.at(i, vi, j);
      for (std::size_t i = 0; i < rl; ++i)
        nc.at(i, vi, rr) = rng.normal(0.0, dev);
      for (std::size_t j = 0; j < rr; ++j)
        nc.at(rl, vi, j) = rng.normal(0.0, dev);
      nc.at(rl, vi, rr) = 1.0;
    }
    cores.push_back(std::move(nc));
  }
  return TensorRing(std::move(cores));
}

TensorRing random_ring(std::size_t d, std::size_t n, std::size_t r,
                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TRCore> cores;
  cores.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    TRCore core(r, n, r);
    for (double& x : core.raw()) x = rng.normal();
    cores.push_back(std::move(core));
  }
  return TensorRing(std::move(cores));
}

RunResult run(BlackBox& oracle, const AlsConfig& cfg) {
  const std::size_t d = oracle.dim(), n = oracle.grid();
  if (cfg.r == 0) throw std::invalid_argument("run: rank must be positive");
  if (cfg.s == 0) throw std::invalid_argument("run: s must be positive");
  if (cfg.lambda < 0.0) throw std::invalid_argument("run: negative lambda");
  if (cfg.max_sweeps < 1) throw std::invalid_argument("run: max_sweeps < 1");

  Rng master(cfg.seed);
  const std::uint64_t sampling_seed = master.fork();
  const std::uint64_t init_seed = master.fork();
  const std::uint64_t eval_seed = master.fork();
  Rng rank_rng(master.fork());

  RunResult out;
  RunReport& rep = out.report;

  auto t0 = std::chrono::steady_clock::now();
  std::vector<SkeletonSet> envs =
      build_all_envs(oracle, d, cfg.s, cfg.passes, sampling_seed);
  std::vector<SampleSet> sets;
  sets.reserve(d);
  for (std::size_t k = 1; k <= d; ++k)
    sets.push_back(
        assemble_sample_set(oracle, static_cast<int>(k), envs[k - 1]));
  rep.calls_sampling = oracle.calls();
  rep.t_sampling = seconds_since(t0);

  auto t1 = std::chrono::steady_clock::now();
  TensorRing ring;
  if (cfg.proposed_init) {
    InitOptions opt;
    opt.r = cfg.r;
    opt.seed = init_seed;
    if (cfg.init_z_from_env) opt.env_sets = &envs;
    ring = initialize_ring(oracle, opt, &rep.init_residuals);
  } else {
    ring = random_ring(d, n, cfg.r, init_seed);
  }
  rep.calls_init = oracle.calls();
  rep.t_init = seconds_since(t1);
  rep.e_skeleton_init = skeleton_error(ring, sets);

  auto t2 = std::chrono::steady_clock::now();
  double prev = rep.e_skeleton_init;
  bool have_prev = true;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    SweepStats st = als_sweep(ring, sets, cfg.lambda);
    rep.mults += st.mults;
    rep.core_updates += d;
    rep.history.push_back(st.e_skeleton);
    const double cur = st.e_skeleton;
    if (have_prev && (prev - cur) / std::max(prev, 1e-15) < cfg.rel_tol) {
      if (cfg.rank_increase_enabled &&
          ring.rank() < cfg.rank_increase_target_r && cur > 1e-12) {
        ring = rank_increase(ring, cfg.rank_increase_variance,
                             rank_rng.fork());
        have_prev = false;  // let one sweep absorb the bump before comparing
        continue;
      }
      break;
    }
    prev = cur;
    have_prev = true;
  }
  rep.sweeps = static_cast<int>(rep.history.size());
  rep.e_skeleton = rep.history.empty() ? rep.e_skeleton_init
                                       : rep.history.back();
  rep.t_sweeps = seconds_since(t2);

  // held-out error; training calls snapshotted first
  auto t3 = std::chrono::steady_clock::now();
  rep.calls = oracle.calls();
  rep.fraction = static_cast<double>(rep.calls) /
                 std::pow(static_cast<double>(n), static_cast<double>(d));
  std::vector<MultiIndex> pts = sample_eval_set(d, n, cfg.eval_count, eval_seed);
  rep.e = error_E(ring, oracle, pts);
  rep.t_eval = seconds_since(t3);

  out.ring = std::move(ring);
  out.envs = std::move(envs);
  return out;
}

}  // namespace tr
