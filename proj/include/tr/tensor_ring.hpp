#pragma once

// Tensor-ring representation: d cores H^1..H^d, core k holding one rl x rr
// matrix slice per grid value of dimension k, with cyclically matching bond
// dimensions. The represented value at a grid point is the trace of the
// product of the selected slices around the ring.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tr/matrix.hpp"
#include "tr/tensor.hpp"

namespace tr {

class BlackBox;

// One ring core. Storage is slice-major: the n slices are stored
// consecutively for v = 1..n, each slice column-major rl x rr. This is also
// the serialized order.
class TRCore {
 public:
  TRCore() : rl_(0), n_(0), rr_(0) {}
  TRCore(std::size_t rl, std::size_t n, std::size_t rr)
      : rl_(rl), n_(n), rr_(rr), a_(rl * n * rr, 0.0) {}

  std::size_t rank_left() const { return rl_; }
  std::size_t rank_right() const { return rr_; }
  std::size_t grid() const { return n_; }

  // v is the 1-based grid value
  double* slice_data(int v) { return a_.data() + slice_offset(v); }
  const double* slice_data(int v) const { return a_.data() + slice_offset(v); }

  Matrix slice(int v) const;
  void set_slice(int v, const Matrix& m);

  double& at(std::size_t i, int v, std::size_t j) {
    return a_[slice_offset(v) + i + rl_ * j];
  }
  double at(std::size_t i, int v, std::size_t j) const {
    return a_[slice_offset(v) + i + rl_ * j];
  }

  const std::vector<double>& raw() const { return a_; }
  std::vector<double>& raw() { return a_; }

 private:
  std::size_t slice_offset(int v) const;
  std::size_t rl_, n_, rr_;
  std::vector<double> a_;
};

class TensorRing {
 public:
  TensorRing() = default;
  // Validates cyclic bond consistency, uniform grid size, uniform rank.
  explicit TensorRing(std::vector<TRCore> cores);

  std::size_t d() const { return cores_.size(); }
  std::size_t n() const { return cores_.empty() ? 0 : cores_[0].grid(); }
  std::size_t rank() const { return cores_.empty() ? 0 : cores_[0].rank_left(); }

  const TRCore& core(std::size_t k) const { return cores_[k - 1]; }  // 1-based
  TRCore& core(std::size_t k) { return cores_[k - 1]; }
  const std::vector<TRCore>& cores() const { return cores_; }

 private:
  std::vector<TRCore> cores_;
};

// Trace of the slice-product chain at grid point x.
double eval_tr(const TensorRing& ring, const MultiIndex& x);

// Materializes every entry; refuses when n^d exceeds the entry budget.
DenseTensor full_contract(const TensorRing& ring,
                          std::size_t budget = 10'000'000);

// Relative l2 error sqrt(sum (eval - f)^2 / sum f^2) over the given points,
// with reference values supplied directly...
double error_E(const TensorRing& ring, const std::vector<MultiIndex>& points,
               const std::vector<double>& values);

// ...or pulled from an oracle (cached entries are free).
double error_E(const TensorRing& ring, BlackBox& oracle,
               const std::vector<MultiIndex>& points);

// Evaluation set: the full grid when n^d <= count, otherwise `count`
// independent uniform draws (duplicates possible, order is draw order).
std::vector<MultiIndex> sample_eval_set(std::size_t d, std::size_t n,
                                        std::size_t count,
                                        std::uint64_t seed);

// Textual serialization (hexfloat payload). Round-trips bit-exactly.
void save_ring(const TensorRing& ring, const std::string& path);
TensorRing load_ring(const std::string& path);

}  // namespace tr
