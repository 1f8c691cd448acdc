#pragma once

// Seeded random source with self-contained distributions. mt19937_64 is
// bit-exact across standard libraries, but std::uniform_int_distribution and
// std::normal_distribution are not, so the draws are implemented here:
// bounded integers by rejection (no modulo bias) and normals by Box-Muller.
// Identical seeds therefore give identical streams on every platform.

#include <cmath>
#include <cstdint>
#include <random>

namespace tr {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform integer in [0, bound)
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % bound;
  }

  // uniform grid value in [1, n]
  int uniform_index(int n) {
    return static_cast<int>(uniform_below(static_cast<std::uint64_t>(n))) + 1;
  }

  // uniform double in [0, 1)
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return mean + stddev * radius * std::cos(angle);
  }

  // Derive an independent child seed; used to give each repeat / each core
  // its own stream without coupling draw counts.
  std::uint64_t fork() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tr
