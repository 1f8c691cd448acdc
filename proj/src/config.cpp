#include "tr/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tr/oracle.hpp"

namespace tr {

namespace {

[[noreturn]] void fail(const std::string& line, const std::string& why) {
  throw std::invalid_argument("config: " + why + " in \"" + line + "\"");
}

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& line, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    fail(line, "malformed number");
  return x;
}

// integer-valued keys accept scientific notation (e.g. eval_count = 1e5)
std::uint64_t parse_count(const std::string& line, const std::string& v,
                          std::uint64_t min_value) {
  const double x = parse_real(line, v);
  if (x < 0 || x > 1e18 || std::floor(x) != x)
    fail(line, "expected a nonnegative integer");
  const std::uint64_t u = static_cast<std::uint64_t>(x);
  if (u < min_value) fail(line, "value below its minimum");
  return u;
}

bool parse_bool(const std::string& line, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line, "expected true or false");
}

std::vector<double> parse_reals(const std::string& line,
                                const std::string& v) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_real(line, tok));
  if (out.empty()) fail(line, "expected at least one number");
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& line,
                                      const std::string& v,
                                      std::uint64_t min_value) {
  std::istringstream in(v);
  std::vector<std::size_t> out;
  std::string tok;
  while (in >> tok)
    out.push_back(static_cast<std::size_t>(parse_count(line, tok, min_value)));
  if (out.empty()) fail(line, "expected at least one integer");
  return out;
}

}  // namespace

Config parse_config(const std::string& text) {
  Config cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(raw, "missing '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(raw, "missing key");
    if (value.empty()) fail(raw, "missing value");
    if (!seen.insert(key).second) fail(raw, "duplicate key");

    if (key == "oracle") {
      if (value != "toy" && value != "ising" && value != "pde" &&
          value != "synthetic")
        fail(raw, "unknown oracle (toy, ising, pde, synthetic)");
      cfg.oracle = value;
    } else if (key == "d") {
      cfg.d = static_cast<std::size_t>(parse_count(raw, value, 1));
    } else if (key == "n") {
      cfg.n = static_cast<std::size_t>(parse_count(raw, value, 1));
    } else if (key == "r") {
      cfg.als.r = static_cast<std::size_t>(parse_count(raw, value, 1));
    } else if (key == "s") {
      cfg.als.s = static_cast<std::size_t>(parse_count(raw, value, 1));
    } else if (key == "lambda") {
      cfg.als.lambda = parse_real(raw, value);
      if (cfg.als.lambda < 0) fail(raw, "lambda must be >= 0");
    } else if (key == "passes") {
      cfg.als.passes = static_cast<int>(parse_count(raw, value, 1));
    } else if (key == "max_sweeps") {
      cfg.als.max_sweeps = static_cast<int>(parse_count(raw, value, 1));
    } else if (key == "rel_tol") {
      cfg.als.rel_tol = parse_real(raw, value);
      if (cfg.als.rel_tol < 0) fail(raw, "rel_tol must be >= 0");
    } else if (key == "repeats") {
      cfg.repeats = static_cast<int>(parse_count(raw, value, 1));
    } else if (key == "seed") {
      cfg.seed = parse_count(raw, value, 0);
    } else if (key == "eval_count") {
      cfg.als.eval_count = static_cast<std::size_t>(parse_count(raw, value, 1));
    } else if (key == "init") {
      if (value == "proposed")
        cfg.als.proposed_init = true;
      else if (value == "random")
        cfg.als.proposed_init = false;
      else
        fail(raw, "init must be proposed or random");
    } else if (key == "init_z") {
      if (value == "env")
        cfg.als.init_z_from_env = true;
      else if (value == "random")
        cfg.als.init_z_from_env = false;
      else
        fail(raw, "init_z must be random or env");
    } else if (key == "rank_increase_enabled") {
      cfg.als.rank_increase_enabled = parse_bool(raw, value);
    } else if (key == "rank_increase_target_r") {
      cfg.als.rank_increase_target_r =
          static_cast<std::size_t>(parse_count(raw, value, 1));
    } else if (key == "rank_increase_variance") {
      cfg.als.rank_increase_variance = parse_real(raw, value);
      if (cfg.als.rank_increase_variance < 0)
        fail(raw, "variance must be >= 0");
    } else if (key == "beta") {
      cfg.beta = parse_real(raw, value);
      if (cfg.beta <= 0) fail(raw, "beta must be > 0");
    } else if (key == "levels") {
      cfg.levels = parse_reals(raw, value);
    } else if (key == "synthetic_rank") {
      cfg.synthetic_rank = static_cast<std::size_t>(parse_count(raw, value, 1));
    } else if (key == "synthetic_seed") {
      cfg.synthetic_seed = parse_count(raw, value, 0);
    } else if (key == "synthetic_mix") {
      cfg.synthetic_mix = parse_real(raw, value);
      if (cfg.synthetic_mix < 0) fail(raw, "synthetic_mix must be >= 0");
    } else if (key == "ring_in") {
      cfg.ring_in = value;
    } else if (key == "ring_out") {
      cfg.ring_out = value;
    } else if (key == "skeleton_dump") {
      cfg.skeleton_dump = value;
    } else if (key == "partition") {
      cfg.partition = parse_counts(raw, value, 1);
      if (cfg.partition.size() != 4)
        fail(raw, "partition needs exactly four arc lengths");
    } else if (key == "z_samples") {
      cfg.z_samples = static_cast<int>(parse_count(raw, value, 1));
    } else {
      fail(raw, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

BlackBox make_oracle(const Config& cfg) {
  if (cfg.oracle.empty())
    throw std::invalid_argument("config: oracle is required");
  if (cfg.d == 0) throw std::invalid_argument("config: d is required");

  if (cfg.oracle == "toy") {
    if (cfg.n == 0) throw std::invalid_argument("config: n is required");
    return toy_oracle(cfg.d, cfg.n);
  }
  if (cfg.oracle == "ising") {
    std::vector<double> lv =
        cfg.levels.empty() ? std::vector<double>{-2.5, -1.5, 1.0, 2.0}
                           : cfg.levels;
    if (cfg.n != 0 && cfg.n != lv.size())
      throw std::invalid_argument("config: n disagrees with level count");
    return ising_oracle(cfg.d, cfg.beta, std::move(lv));
  }
  if (cfg.oracle == "pde") {
    std::vector<double> lv = cfg.levels.empty()
                                 ? std::vector<double>{1.0, 2.0, 3.0}
                                 : cfg.levels;
    if (cfg.n != 0 && cfg.n != lv.size())
      throw std::invalid_argument("config: n disagrees with level count");
    return pde_oracle(cfg.d, std::move(lv));
  }
  if (cfg.oracle == "synthetic") {
    if (cfg.n == 0) throw std::invalid_argument("config: n is required");
    return synthetic_tr_oracle(gibbs_chain_ring(
        cfg.d, cfg.n, cfg.synthetic_rank, cfg.synthetic_seed,
        cfg.synthetic_mix));
  }
  throw std::invalid_argument("config: unknown oracle " + cfg.oracle);
}

}  // namespace tr
