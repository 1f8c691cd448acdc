#pragma once

// Flat key-value experiment configuration shared by the CLI subcommands.
// Unknown keys, duplicate keys, and malformed values are hard errors, so a
// typo cannot silently fall back to a default.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tr/als.hpp"

namespace tr {

class BlackBox;

struct Config {
  std::string oracle;  // toy | ising | pde | synthetic
  std::size_t d = 0;
  std::size_t n = 0;  // inferred from `levels` for ising / pde when unset
  AlsConfig als;
  int repeats = 5;
  std::uint64_t seed = 0;  // master seed; per-repeat seeds derive from it

  // oracle parameters
  double beta = 10.0;          // ising inverse temperature
  std::vector<double> levels;  // ising / pde grid levels
  std::size_t synthetic_rank = 1;
  std::uint64_t synthetic_seed = 0;
  double synthetic_mix = 0.0;

  // file plumbing
  std::string ring_in;
  std::string ring_out;
  std::string skeleton_dump;

  // diagnose: arc lengths (a, c1, b, c2 in ring order) and frozen-point count
  std::vector<std::size_t> partition;
  int z_samples = 5;
};

// Parses a config document: one `key = value` pair per line, `#` starts a
// comment, blank lines ignored. Throws std::invalid_argument naming the
// offending line on any unknown key, duplicate key, or malformed value.
Config parse_config(const std::string& text);

// parse_config over a file's contents; throws on unreadable files.
Config load_config(const std::string& path);

// Builds the configured oracle. Requires `oracle` and `d`; `n` must match
// the level count for ising / pde when both are given. Throws
// std::invalid_argument describing any missing or inconsistent field.
BlackBox make_oracle(const Config& cfg);

}  // namespace tr
