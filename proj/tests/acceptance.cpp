// Acceptance gates for the compression pipeline. Each gate measures one
// advertised guarantee end to end and prints a single PASS / FAIL line with
// the observed numbers; the process exits with the number of failed gates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tr/als.hpp"
#include "tr/diagnostics.hpp"
#include "tr/initializer.hpp"
#include "tr/linalg.hpp"
#include "tr/oracle.hpp"
#include "tr/rng.hpp"
#include "tr/skeleton.hpp"
#include "tr/tensor.hpp"
#include "tr/tensor_ring.hpp"

using namespace tr;

namespace {

int g_failures = 0;

void gate(const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %s — %s\n", ok ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Campaign {
  std::vector<RunReport> reports;
  double median_e = 0.0;
  double max_run_seconds = 0.0;
  double wall = 0.0;
};

Campaign campaign(const std::function<BlackBox()>& make_oracle,
                  AlsConfig base, int repeats, std::uint64_t master_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng master(master_seed);
  Campaign out;
  std::vector<double> es;
  for (int i = 0; i < repeats; ++i) {
    AlsConfig cfg = base;
    cfg.seed = master.fork();
    BlackBox oracle = make_oracle();
    const RunResult res = run(oracle, cfg);
    es.push_back(res.report.e);
    const RunReport& rep = res.report;
    out.max_run_seconds =
        std::max(out.max_run_seconds,
                 rep.t_sampling + rep.t_init + rep.t_sweeps + rep.t_eval);
    out.reports.push_back(rep);
  }
  out.median_e = trtest::median_low(es);
  out.wall = seconds_since(t0);
  return out;
}

// ---------------------------------------------------------------- gate 1
void gate_synthetic() {
  AlsConfig cfg;
  cfg.r = 3;
  cfg.s = 5;
  const auto c = campaign(
      [] {
        return synthetic_tr_oracle(gibbs_chain_ring(12, 4, 3, 4242, 0.0));
      },
      cfg, 5, 1);
  bool sweeps_ok = true;
  for (const auto& rep : c.reports) sweeps_ok = sweeps_ok && rep.sweeps <= 30;
  gate("1 exact-rank chain, d=12 n=4 r=3",
       c.median_e <= 1e-6 && sweeps_ok && c.wall < 60.0,
       fmt("median E %.3e (gate 1e-6), %d runs in %.1fs (budget 60s)",
           c.median_e, 5, c.wall));
}

// ---------------------------------------------------------------- gate 2
void gate_diffusion() {
  AlsConfig cfg;
  cfg.r = 3;
  cfg.s = 4;
  const auto c12 = campaign([] { return pde_oracle(12); }, cfg, 5, 2);
  const auto c24 = campaign([] { return pde_oracle(24); }, cfg, 5, 3);
  const double worst = std::max(c12.max_run_seconds, c24.max_run_seconds);
  gate("2 diffusion coefficient, d=12 and d=24",
       c12.median_e <= 1e-3 && c24.median_e <= 1e-3 && worst < 300.0,
       fmt("median E %.3e / %.3e (gate 1e-3), slowest run %.1fs (budget 300s)",
           c12.median_e, c24.median_e, worst));
}

// ---------------------------------------------------------------- gate 3
void gate_distance() {
  AlsConfig cfg;
  cfg.r = 3;
  cfg.s = 4;
  const auto c6 = campaign([] { return toy_oracle(6, 10); }, cfg, 5, 4);
  const auto c12 = campaign([] { return toy_oracle(12, 5); }, cfg, 5, 5);
  gate("3 distance function, d=6 n=10 and d=12 n=5",
       c6.median_e <= 1e-2 && c12.median_e <= 1e-2,
       fmt("median E %.3e / %.3e (gate 1e-2)", c6.median_e, c12.median_e));
}

// ---------------------------------------------------------------- gate 4
void gate_spin_chain() {
  AlsConfig cfg12;
  cfg12.r = 4;
  cfg12.s = 5;
  const auto c12 = campaign([] { return ising_oracle(12); }, cfg12, 5, 6);
  AlsConfig cfg24;
  cfg24.r = 3;
  cfg24.s = 5;
  const auto c24 = campaign([] { return ising_oracle(24); }, cfg24, 5, 7);
  gate("4 spin-chain free energy, d=12 r=4 and d=24 r=3",
       c12.median_e <= 5e-2 && c24.median_e <= 5e-2,
       fmt("median E %.3e / %.3e (gate 5e-2)", c12.median_e, c24.median_e));
}

// ---------------------------------------------------------------- gate 5
void gate_initializer_vs_random() {
  AlsConfig cfg;
  cfg.r = 3;
  cfg.s = 4;
  cfg.max_sweeps = 1;
  const auto proposed = campaign([] { return pde_oracle(12); }, cfg, 5, 8);
  AlsConfig rnd = cfg;
  rnd.proposed_init = false;
  const auto random_start = campaign([] { return pde_oracle(12); }, rnd, 5, 8);
  gate("5 structured init beats random init after one sweep",
       proposed.median_e <= 1e-3 &&
           random_start.median_e >= 10.0 * proposed.median_e,
       fmt("median E %.3e vs %.3e (gates: 1e-3 and 10x separation)",
           proposed.median_e, random_start.median_e));
}

// ---------------------------------------------------------------- gate 6
void gate_linear_scaling() {
  AlsConfig cfg;
  cfg.r = 3;
  cfg.s = 4;
  std::uint64_t calls6 = 0, calls12 = 0, calls24 = 0;
  double mpc12 = 0.0, mpc24 = 0.0, mpc6 = 0.0;
  for (std::size_t d : {6, 12, 24}) {
    AlsConfig one = cfg;
    one.seed = 9;
    BlackBox oracle = pde_oracle(d);
    const RunResult res = run(oracle, one);
    const double mpc = static_cast<double>(res.report.mults) /
                       static_cast<double>(res.report.core_updates);
    if (d == 6) {
      calls6 = res.report.calls_sampling;
      mpc6 = mpc;
    } else if (d == 12) {
      calls12 = res.report.calls_sampling;
      mpc12 = mpc;
    } else {
      calls24 = res.report.calls_sampling;
      mpc24 = mpc;
    }
  }
  const double call_ratio =
      static_cast<double>(calls24) / static_cast<double>(calls12);
  const double mult_ratio = mpc24 / mpc12;
  gate("6 doubling d scales samples and per-core cost by <= 2.5x",
       call_ratio <= 2.5 && mult_ratio <= 2.5,
       fmt("sampling calls %llu/%llu/%llu (d24/d12 %.2fx), "
           "mults per update %.0f/%.0f/%.0f (%.2fx)",
           static_cast<unsigned long long>(calls6),
           static_cast<unsigned long long>(calls12),
           static_cast<unsigned long long>(calls24), call_ratio, mpc6, mpc12,
           mpc24, mult_ratio));
}

// ---------------------------------------------------------------- gate 7
bool check_eval_matches_brute() {
  const std::size_t dims[4][3] = {{2, 3, 3}, {3, 2, 2}, {4, 3, 3}, {4, 2, 1}};
  for (const auto& t : dims) {
    const TensorRing ring = random_ring(t[0], t[1], t[2], 31 + t[0]);
    for (const auto& x : trtest::grid_points(t[0], t[1]))
      if (!trtest::near(eval_tr(ring, x), trtest::brute_eval(ring, x), 1e-12))
        return false;
  }
  return true;
}

bool check_coefficient_contract() {
  for (std::size_t d : {4, 6}) {
    const TensorRing ring = random_ring(d, 3, 2, 17 + d);
    SampleSet set;
    set.k = 2;
    set.n = 3;
    for (std::size_t j = 4; j <= d; ++j)
      set.env.dims.push_back(static_cast<int>(j));
    set.env.elements = {std::vector<int>(d - 3, 1),
                        std::vector<int>(d - 3, 2)};
    set.env.elements[1][0] = 3;
    set.values = Matrix(3, 9 * set.env.size());
    const CoefficientBatch batch(ring, 2, set);
    for (std::size_t c = 0; c < batch.count(); ++c)
      for (int v = 1; v <= 3; ++v) {
        const Matrix prod =
            trtest::naive_matmul(ring.core(2).slice(v), batch.c(c));
        double tr_val = 0.0;
        for (std::size_t i = 0; i < prod.rows(); ++i) tr_val += prod(i, i);
        const MultiIndex x = set.point(d, v, c);
        if (!trtest::near(tr_val, eval_tr(ring, x), 1e-12)) return false;
      }
  }
  return true;
}

bool check_ridge_normal_equations() {
  const Matrix a = trtest::random_matrix(20, 6, 12);
  const Matrix b = trtest::random_matrix(20, 1, 13);
  for (double lambda : {1e-9, 1e-3}) {
    Matrix gram(6, 6);
    std::vector<double> atb(6, 0.0);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        double acc = 0.0;
        for (std::size_t t = 0; t < 20; ++t) acc += a(t, i) * a(t, j);
        gram(i, j) = acc;
      }
      for (std::size_t t = 0; t < 20; ++t) atb[i] += a(t, i) * b(t, 0);
    }
    const double sigma = trtest::power_eig(gram);
    Matrix shifted = gram;
    for (std::size_t i = 0; i < 6; ++i) shifted(i, i) += lambda * sigma;
    const std::vector<double> ref = trtest::gauss_solve(shifted, atb);
    const Matrix h = ridge_ls(a, b, lambda);
    for (std::size_t i = 0; i < 6; ++i)
      if (!trtest::near(h(i, 0), ref[i], 1e-10)) return false;
  }
  return true;
}

bool check_reshape_layout() {
  DenseTensor t({2, 3, 2});
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = double(i) + 1.0;
  const std::vector<std::vector<int>> rows_list = {
      {1}, {2}, {3}, {1, 3}, {3, 1}, {2, 3}, {1, 2, 3}};
  const std::vector<int> dims = {2, 3, 2};
  for (const auto& rows : rows_list) {
    std::vector<int> cols;
    for (int dim = 1; dim <= 3; ++dim)
      if (std::find(rows.begin(), rows.end(), dim) == rows.end())
        cols.push_back(dim);
    const DimGroupMatrix m = reshape_group(t, rows, cols);
    for (int i1 = 1; i1 <= 2; ++i1)
      for (int i2 = 1; i2 <= 3; ++i2)
        for (int i3 = 1; i3 <= 2; ++i3) {
          const int x[3] = {i1, i2, i3};
          auto index_in = [&](const std::vector<int>& group) {
            std::size_t idx = 0, stride = 1;
            for (int dim : group) {
              idx += static_cast<std::size_t>(x[dim - 1] - 1) * stride;
              stride *= static_cast<std::size_t>(dims[dim - 1]);
            }
            return idx;
          };
          const double want = t.at({i1, i2, i3});
          if (m.values(index_in(rows), index_in(cols)) != want) return false;
        }
    const DenseTensor back = reshape_ungroup(m, {2, 3, 2});
    for (std::size_t i = 0; i < t.size(); ++i)
      if (back.data()[i] != t.data()[i]) return false;
  }
  return true;
}

void gate_properties() {
  const bool ev = check_eval_matches_brute();
  const bool co = check_coefficient_contract();
  const bool ri = check_ridge_normal_equations();
  const bool re = check_reshape_layout();
  gate("7 algebra contracts (eval, coefficients, ridge, reshape)",
       ev && co && ri && re,
       fmt("eval %s, coefficients %s, ridge %s, reshape %s",
           ev ? "ok" : "BAD", co ? "ok" : "BAD", ri ? "ok" : "BAD",
           re ? "ok" : "BAD"));
}

// --------------------------------------------------------------- gate 8a
void gate_chain_concentration() {
  int bad = 0;
  double worst = 1.0;
  for (int i = 0; i < 10; ++i) {
    const TensorRing ring =
        gibbs_chain_ring(12, 4, 3, 9000 + static_cast<std::uint64_t>(i), 0.0);
    Rng rng(500 + static_cast<std::uint64_t>(i));
    // three distinct cuts in 1..11 define four nonempty cyclic arcs
    int c1 = 0, c2 = 0, c3 = 0;
    do {
      c1 = rng.uniform_index(11);
      c2 = rng.uniform_index(11);
      c3 = rng.uniform_index(11);
    } while (c1 == c2 || c2 == c3 || c1 == c3);
    int cut[3] = {c1, c2, c3};
    std::sort(cut, cut + 3);
    auto arc = [&](int from, int to) {  // dims from+1 .. to
      std::vector<int> dims;
      for (int dim = from + 1; dim <= to; ++dim) dims.push_back(dim);
      return dims;
    };
    const std::vector<int> a = arc(0, cut[0]);
    const std::vector<int> b = arc(cut[1], cut[2]);
    auto freeze = [&](const std::vector<int>& dims) {
      std::vector<int> x;
      for (std::size_t j = 0; j < dims.size(); ++j)
        x.push_back(rng.uniform_index(4));
      return x;
    };
    const double ra = rank1_ratio(segment_product(ring, a, freeze(a)));
    const double rb = rank1_ratio(segment_product(ring, b, freeze(b)));
    worst = std::min(worst, std::min(ra, rb));
    if (ra < 1.0 - 1e-6 || rb < 1.0 - 1e-6) ++bad;
  }
  gate("8a frozen arcs of pure chains are rank-1",
       bad == 0, fmt("10 instances, worst ratio 1 - %.1e (gate 1e-6)",
                     1.0 - worst));
}

// --------------------------------------------------------------- gate 8b
void gate_conditioning_bound() {
  int checked = 0, violations = 0;
  double tightest = 1e300;
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = std::vector<std::size_t>{6, 8, 10, 12}[
        static_cast<std::size_t>(i % 4)];
    const double mix = 0.4 * static_cast<double>(i % 10) / 9.0;
    const TensorRing ring =
        gibbs_chain_ring(d, 3, 2, 2000 + static_cast<std::uint64_t>(i), mix);
    auto oracle = synthetic_tr_oracle(ring);

    Partition part;
    const std::size_t lc1 = (d - 2) / 2, lc2 = d - 2 - lc1;
    int dim = 1;
    auto take = [&](std::size_t len) {
      std::vector<int> out;
      for (std::size_t j = 0; j < len; ++j) out.push_back(dim++);
      return out;
    };
    part.a = take(1);
    part.c1 = take(lc1);
    part.b = take(1);
    part.c2 = take(lc2);

    Rng rng(3000 + static_cast<std::uint64_t>(i));
    const int za = rng.uniform_index(3), zb = rng.uniform_index(3);
    const double alpha = alpha_ratio(oracle, part, {za, zb});
    const double kappa = std::max(condition_kappa(ring, part.c1),
                                  condition_kappa(ring, part.c2));
    const double bound = std::isfinite(kappa)
                             ? alpha / (kappa * kappa * kappa * kappa) *
                                   (1.0 - 1e-9)
                             : 0.0;
    const double ra = rank1_ratio(segment_product(ring, part.a, {za}));
    const double rb = rank1_ratio(segment_product(ring, part.b, {zb}));
    if (ra < bound || rb < bound) ++violations;
    if (bound > 0.0)
      tightest = std::min(tightest, std::min(ra, rb) / bound);
    ++checked;
  }
  gate("8b concentration >= alpha / kappa^4 across the mixing sweep",
       checked == 100 && violations == 0,
       fmt("100 instances, 0 expected violations, got %d; tightest margin "
           "%.2fx", violations, tightest));
}

// --------------------------------------------------------------- gate 8c
void gate_trend() {
  const std::vector<double> mixes = {0.0,  0.03, 0.06, 0.1, 0.15,
                                     0.22, 0.3,  0.4,  0.5, 0.65};
  Partition part;
  part.a = {1};
  part.c1 = {2, 3};
  part.b = {4};
  part.c2 = {5, 6};

  std::vector<double> alphas, errors;
  for (std::size_t m = 0; m < mixes.size(); ++m) {
    const TensorRing truth = gibbs_chain_ring(6, 3, 2, 7700, mixes[m]);
    auto oracle = synthetic_tr_oracle(truth);

    Rng rng(7800 + static_cast<std::uint64_t>(m));
    std::vector<double> a_samples;
    for (int t = 0; t < 5; ++t) {
      const int za = rng.uniform_index(3), zb = rng.uniform_index(3);
      a_samples.push_back(alpha_ratio(oracle, part, {za, zb}));
    }
    alphas.push_back(trtest::median_low(a_samples));

    InitOptions opt;
    opt.r = 2;
    opt.seed = 7900;
    auto fit_oracle = synthetic_tr_oracle(truth);
    const TensorRing ring = initialize_ring(fit_oracle, opt);
    auto fresh = synthetic_tr_oracle(truth);
    errors.push_back(error_E(ring, fresh, trtest::grid_points(6, 3)));
  }
  const double rho = trtest::spearman(alphas, errors);
  gate("8c concentration predicts initialization quality",
       rho < -0.8,
       fmt("Spearman rho(alpha, init error) = %.3f over %zu mixes (gate "
           "-0.8)", rho, mixes.size()));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  gate_synthetic();
  gate_diffusion();
  gate_distance();
  gate_spin_chain();
  gate_initializer_vs_random();
  gate_linear_scaling();
  gate_properties();
  gate_chain_concentration();
  gate_conditioning_bound();
  gate_trend();
  std::printf("%s: %d gate(s) failed, total %.1fs\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures, seconds_since(t0));
  return g_failures;
}
