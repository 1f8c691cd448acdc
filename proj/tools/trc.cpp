// trc: fit, evaluate, and probe tensor-ring compressions of black-box
// functions. Subcommands: decompose (fit a ring to a configured oracle and
// report per-run / median errors), evaluate (relative error of a saved ring
// against an oracle on a fresh point set), diagnose (structure measurements:
// near-rank-1 ratios and segment condition numbers).
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 runtime or
// numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "tr/als.hpp"
#include "tr/config.hpp"
#include "tr/diagnostics.hpp"
#include "tr/oracle.hpp"
#include "tr/rng.hpp"
#include "tr/skeleton.hpp"
#include "tr/tensor_ring.hpp"

namespace {

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[256];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

bool is_power_of_two(std::size_t v) { return v && (v & (v - 1)) == 0; }

// order statistic at index (m-1)/2 of a sorted copy (the middle for odd m)
template <typename T>
T median_of(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

struct RunRow {
  std::string run;
  double e = 0.0, e_skeleton = 0.0, fraction = 0.0, seconds = 0.0;
  std::uint64_t calls = 0;
  int sweeps = 0;
  std::size_t rank = 0;
};

std::string csv_line(const RunRow& row) {
  return row.run + "," + fmt("%.6e", row.e) + "," +
         fmt("%.6e", row.e_skeleton) + "," + std::to_string(row.calls) + "," +
         fmt("%.6e", row.fraction) + "," + std::to_string(row.sweeps) + "," +
         fmt("%.3f", row.seconds) + "\n";
}

std::string table_line(const RunRow& row) {
  return fmt("%6s  %12.6e  %12.6e  %10llu  %10.3e  %6d  %5zu  %8.3f\n",
             row.run.c_str(), row.e, row.e_skeleton,
             static_cast<unsigned long long>(row.calls), row.fraction,
             row.sweeps, row.rank, row.seconds);
}

int cmd_decompose(const tr::Config& cfg, const std::string& out_path,
                  const std::string& ring_out, int threads) {
  if (!is_power_of_two(cfg.d / 3) || cfg.d % 3 != 0 || cfg.d < 6) {
    std::cerr << "decompose: d must be 3 * 2^L with L >= 1\n";
    return 2;
  }

  // per-repeat seeds derived up front so the thread count cannot matter
  tr::Rng master(cfg.seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.repeats));
  for (auto& s : seeds) s = master.fork();

  const std::size_t m = seeds.size();
  std::vector<tr::RunResult> results(m);
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&](std::size_t first) {
    for (std::size_t i = first; i < m;
         i += static_cast<std::size_t>(threads)) {
      try {
        tr::AlsConfig als = cfg.als;
        als.seed = seeds[i];
        tr::BlackBox oracle = tr::make_oracle(cfg);
        results[i] = tr::run(oracle, als);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    threads = 1;
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(worker, static_cast<std::size_t>(t));
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRow> rows;
  rows.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const tr::RunReport& rep = results[i].report;
    RunRow row;
    row.run = std::to_string(i + 1);
    row.e = rep.e;
    row.e_skeleton = rep.e_skeleton;
    row.calls = rep.calls;
    row.fraction = rep.fraction;
    row.sweeps = rep.sweeps;
    row.rank = results[i].ring.rank();
    row.seconds = rep.t_sampling + rep.t_init + rep.t_sweeps + rep.t_eval;
    rows.push_back(row);
  }
  RunRow med;
  med.run = "median";
  {
    std::vector<double> e, es, fr, sec;
    std::vector<std::uint64_t> calls;
    std::vector<int> sweeps;
    std::vector<std::size_t> rank;
    for (const RunRow& row : rows) {
      e.push_back(row.e);
      es.push_back(row.e_skeleton);
      fr.push_back(row.fraction);
      sec.push_back(row.seconds);
      calls.push_back(row.calls);
      sweeps.push_back(row.sweeps);
      rank.push_back(row.rank);
    }
    med.e = median_of(e);
    med.e_skeleton = median_of(es);
    med.fraction = median_of(fr);
    med.seconds = median_of(sec);
    med.calls = median_of(calls);
    med.sweeps = median_of(sweeps);
    med.rank = median_of(rank);
  }
  rows.push_back(med);

  std::cout << "oracle " << cfg.oracle << "  d " << cfg.d << "  r "
            << cfg.als.r << "  s " << cfg.als.s << "  repeats " << cfg.repeats
            << "\n\n";
  std::cout << fmt("%6s  %12s  %12s  %10s  %10s  %6s  %5s  %8s\n", "run", "E",
                   "E_skeleton", "calls", "fraction", "sweeps", "rank",
                   "seconds");
  for (const RunRow& row : rows) std::cout << table_line(row);

  std::string csv = "run,E,E_skeleton,calls,fraction,sweeps,seconds\n";
  for (const RunRow& row : rows) csv += csv_line(row);
  if (out_path.empty()) {
    std::cout << "\n" << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << csv;
    std::cout << "\nreport written to " << out_path << "\n";
  }

  // the run realizing the median E carries the saved artifacts
  std::size_t pick = 0;
  {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return results[x].report.e < results[y].report.e;
    });
    pick = order[(m - 1) / 2];
  }
  const std::string ring_path = ring_out.empty() ? cfg.ring_out : ring_out;
  if (!ring_path.empty()) {
    tr::save_ring(results[pick].ring, ring_path);
    std::cout << "ring (run " << pick + 1 << ") written to " << ring_path
              << "\n";
  }
  if (!cfg.skeleton_dump.empty()) {
    tr::dump_skeletons(results[pick].envs, cfg.skeleton_dump);
    std::cout << "skeletons written to " << cfg.skeleton_dump << "\n";
  }
  return 0;
}

int cmd_evaluate(tr::Config cfg, const std::string& ring_path,
                 std::size_t count, std::uint64_t seed) {
  tr::TensorRing ring = tr::load_ring(ring_path);
  if (cfg.d == 0) cfg.d = ring.d();
  if (cfg.n == 0 && cfg.oracle != "ising" && cfg.oracle != "pde")
    cfg.n = ring.n();
  tr::BlackBox oracle = tr::make_oracle(cfg);
  if (oracle.dim() != ring.d() || oracle.grid() != ring.n())
    throw std::runtime_error(
        "evaluate: ring and oracle disagree on dimensions (ring " +
        std::to_string(ring.d()) + "x" + std::to_string(ring.n()) +
        ", oracle " + std::to_string(oracle.dim()) + "x" +
        std::to_string(oracle.grid()) + ")");

  std::vector<tr::MultiIndex> pts =
      tr::sample_eval_set(ring.d(), ring.n(), count, seed);
  const double e = tr::error_E(ring, oracle, pts);
  std::cout << fmt("E = %.6e over %zu points (seed %llu)\n", e, pts.size(),
                   static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_diagnose(const tr::Config& cfg, const std::string& out_path) {
  tr::BlackBox oracle = tr::make_oracle(cfg);
  const std::size_t d = oracle.dim(), n = oracle.grid();

  tr::TensorRing ring;
  if (!cfg.ring_in.empty()) {
    ring = tr::load_ring(cfg.ring_in);
    if (ring.d() != d || ring.n() != n)
      throw std::runtime_error("diagnose: ring_in does not match the oracle");
  } else if (cfg.oracle == "synthetic") {
    ring = tr::gibbs_chain_ring(d, n, cfg.synthetic_rank, cfg.synthetic_seed,
                                cfg.synthetic_mix);
  } else {
    std::cerr << "diagnose: ring_in is required unless oracle = synthetic\n";
    return 2;
  }

  std::vector<std::size_t> arcs = cfg.partition;
  if (arcs.empty()) {
    const std::size_t base = d / 4, extra = d % 4;
    arcs = {base + (extra > 0), base + (extra > 1), base + (extra > 2), base};
  }
  if (arcs.size() != 4 || arcs[0] + arcs[1] + arcs[2] + arcs[3] != d ||
      arcs[0] == 0 || arcs[1] == 0 || arcs[2] == 0 || arcs[3] == 0) {
    std::cerr << "diagnose: partition must be four positive arc lengths "
                 "summing to d\n";
    return 2;
  }

  tr::Partition part;
  int dim = 1;
  auto take = [&](std::size_t len) {
    std::vector<int> out;
    for (std::size_t j = 0; j < len; ++j) out.push_back(dim++);
    return out;
  };
  part.a = take(arcs[0]);
  part.c1 = take(arcs[1]);
  part.b = take(arcs[2]);
  part.c2 = take(arcs[3]);

  std::ostringstream rep;
  auto arc_str = [](const std::vector<int>& v) {
    return std::to_string(v.front()) + ".." + std::to_string(v.back());
  };
  rep << "partition  a=" << arc_str(part.a) << "  c1=" << arc_str(part.c1)
      << "  b=" << arc_str(part.b) << "  c2=" << arc_str(part.c2) << "\n";
  const double k1 = tr::condition_kappa(ring, part.c1);
  const double k2 = tr::condition_kappa(ring, part.c2);
  rep << fmt("kappa(c1) = %.6e   kappa(c2) = %.6e\n\n", k1, k2);
  rep << fmt("%4s  %12s  %12s  %12s  %12s\n", "z", "alpha", "rank1(B_a)",
             "rank1(B_b)", "alpha/k^4");

  tr::Rng rng(cfg.seed);
  for (int t = 1; t <= cfg.z_samples; ++t) {
    std::vector<int> z(part.a.size() + part.b.size());
    for (auto& v : z) v = rng.uniform_index(static_cast<int>(n));
    std::vector<int> xa(z.begin(),
                        z.begin() + static_cast<std::ptrdiff_t>(part.a.size()));
    std::vector<int> xb(z.begin() + static_cast<std::ptrdiff_t>(part.a.size()),
                        z.end());
    const double alpha = tr::alpha_ratio(oracle, part, z);
    const double r1a = tr::rank1_ratio(tr::segment_product(ring, part.a, xa));
    const double r1b = tr::rank1_ratio(tr::segment_product(ring, part.b, xb));
    rep << fmt("%4d  %12.6e  %12.6e  %12.6e  %12.6e\n", t, alpha, r1a, r1b,
               alpha / (k1 * k1 * k2 * k2));
  }

  std::cout << rep.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << rep.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor-ring compression of black-box functions"};
  app.require_subcommand(1);

  std::string config_path, out_path, ring_out, ring_path, oracle_name;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  double count_flag = 0;

  CLI::App* dec = app.add_subcommand(
      "decompose", "fit a tensor ring to the configured oracle");
  dec->add_option("--config", config_path, "config file")->required();
  dec->add_option("--out", out_path, "CSV report path");
  dec->add_option("--ring-out", ring_out, "save the median run's ring here");
  dec->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });
  dec->add_option("--threads", threads, "repeats run in parallel")
      ->check(CLI::Range(1, 64));

  CLI::App* ev = app.add_subcommand(
      "evaluate", "relative error of a saved ring against an oracle");
  ev->add_option("--ring", ring_path, "ring file")->required();
  ev->add_option("--config", config_path, "config file for the oracle");
  ev->add_option("--oracle", oracle_name,
                 "oracle name (toy, ising, pde, synthetic)");
  ev->add_option("--count", count_flag, "evaluation points (default 1e5)");
  ev->add_option("--seed", seed, "evaluation set seed")
      ->each([&](const std::string&) { seed_given = true; });

  CLI::App* diag = app.add_subcommand(
      "diagnose", "structure measurements for a ring / oracle pair");
  diag->add_option("--config", config_path, "config file")->required();
  diag->add_option("--out", out_path, "write the table here too");
  diag->add_option("--seed", seed, "frozen-point seed")
      ->each([&](const std::string&) { seed_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  tr::Config cfg;
  try {
    if (!config_path.empty()) cfg = tr::load_config(config_path);
    if (ev->parsed() && !oracle_name.empty()) {
      if (!cfg.oracle.empty() && cfg.oracle != oracle_name)
        throw std::invalid_argument(
            "evaluate: --oracle disagrees with the config");
      if (oracle_name != "toy" && oracle_name != "ising" &&
          oracle_name != "pde" && oracle_name != "synthetic")
        throw std::invalid_argument("evaluate: unknown oracle " + oracle_name);
      cfg.oracle = oracle_name;
    }
    if (seed_given) cfg.seed = seed;

    if (dec->parsed()) return cmd_decompose(cfg, out_path, ring_out, threads);
    if (ev->parsed()) {
      std::size_t count = count_flag > 0
                              ? static_cast<std::size_t>(count_flag)
                              : cfg.als.eval_count;
      return cmd_evaluate(cfg, ring_path, count, cfg.seed);
    }
    return cmd_diagnose(cfg, out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}
