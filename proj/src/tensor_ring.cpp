#include "tr/tensor_ring.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tr/kernels.hpp"
#include "tr/oracle.hpp"
#include "tr/rng.hpp"

namespace tr {

std::size_t TRCore::slice_offset(int v) const {
  if (v < 1 || static_cast<std::size_t>(v) > n_)
    throw std::out_of_range("TRCore: slice out of range");
  return static_cast<std::size_t>(v - 1) * rl_ * rr_;
}

Matrix TRCore::slice(int v) const {
  Matrix m(rl_, rr_);
  const double* s = slice_data(v);
  std::copy(s, s + rl_ * rr_, m.data());
  return m;
}

void TRCore::set_slice(int v, const Matrix& m) {
  if (m.rows() != rl_ || m.cols() != rr_)
    throw std::invalid_argument("TRCore: slice shape mismatch");
  std::copy(m.data(), m.data() + rl_ * rr_, slice_data(v));
}

TensorRing::TensorRing(std::vector<TRCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw std::invalid_argument("TensorRing: no cores");
  const std::size_t d = cores_.size();
  const std::size_t n = cores_[0].grid();
  const std::size_t r = cores_[0].rank_left();
  for (std::size_t k = 0; k < d; ++k) {
    if (cores_[k].grid() != n)
      throw std::invalid_argument("TensorRing: grid size not uniform");
    if (cores_[k].rank_left() != r)
      throw std::invalid_argument("TensorRing: rank not uniform");
    if (cores_[k].rank_right() != cores_[(k + 1) % d].rank_left())
      throw std::invalid_argument("TensorRing: bond mismatch");
  }
}

double eval_tr(const TensorRing& ring, const MultiIndex& x) {
  const std::size_t d = ring.d();
  if (x.size() != d) throw std::invalid_argument("eval_tr: index order");
  // two reusable chain buffers; bond dims are uniform r
  static thread_local std::vector<double> buf_a, buf_b;
  const TRCore& c1 = ring.core(1);
  std::size_t rows = c1.rank_left(), cols = c1.rank_right();
  buf_a.assign(c1.slice_data(x[0]), c1.slice_data(x[0]) + rows * cols);
  std::vector<double>* cur = &buf_a;
  std::vector<double>* nxt = &buf_b;
  for (std::size_t k = 2; k <= d; ++k) {
    const TRCore& ck = ring.core(k);
    nxt->assign(rows * ck.rank_right(), 0.0);
    kernels::gemm_acc(rows, ck.rank_right(), cols, cur->data(), rows,
                      ck.slice_data(x[k - 1]), cols, nxt->data(), rows);
    cols = ck.rank_right();
    std::swap(cur, nxt);
  }
  double tr = 0.0;
  for (std::size_t i = 0; i < rows; ++i) tr += (*cur)[i + rows * i];
  return tr;
}

DenseTensor full_contract(const TensorRing& ring, std::size_t budget) {
  const std::size_t d = ring.d(), n = ring.n();
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (total > budget / n)
      throw std::invalid_argument("full_contract: entry budget exceeded");
    total *= n;
  }
  DenseTensor t(std::vector<std::size_t>(d, n));
  MultiIndex x(d, 1);
  for (std::size_t flat = 0; flat < total; ++flat) {
    t.data()[flat] = eval_tr(ring, x);
    for (std::size_t k = 0; k < d; ++k) {  // odometer, dimension 1 fastest
      if (++x[k] <= static_cast<int>(n)) break;
      x[k] = 1;
    }
  }
  return t;
}

double error_E(const TensorRing& ring, const std::vector<MultiIndex>& points,
               const std::vector<double>& values) {
  if (points.size() != values.size() || points.empty())
    throw std::invalid_argument("error_E: bad point set");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double diff = eval_tr(ring, points[i]) - values[i];
    num += diff * diff;
    den += values[i] * values[i];
  }
  if (den == 0.0)
    throw std::domain_error("error_E: reference values identically zero");
  return std::sqrt(num / den);
}

double error_E(const TensorRing& ring, BlackBox& oracle,
               const std::vector<MultiIndex>& points) {
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = oracle(points[i]);
  return error_E(ring, points, values);
}

std::vector<MultiIndex> sample_eval_set(std::size_t d, std::size_t n,
                                        std::size_t count,
                                        std::uint64_t seed) {
  if (d == 0 || n == 0) throw std::invalid_argument("sample_eval_set: empty");
  // overflow-safe n^d vs count
  std::size_t total = 1;
  bool fits = true;
  for (std::size_t k = 0; k < d; ++k) {
    if (total > count / n + 1) {
      fits = false;
      break;
    }
    total *= n;
  }
  std::vector<MultiIndex> pts;
  if (fits && total <= count) {
    pts.reserve(total);
    MultiIndex x(d, 1);
    for (std::size_t flat = 0; flat < total; ++flat) {
      pts.push_back(x);
      for (std::size_t k = 0; k < d; ++k) {
        if (++x[k] <= static_cast<int>(n)) break;
        x[k] = 1;
      }
    }
    return pts;
  }
  Rng rng(seed);
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    MultiIndex x(d);
    for (std::size_t k = 0; k < d; ++k)
      x[k] = rng.uniform_index(static_cast<int>(n));
    pts.push_back(std::move(x));
  }
  return pts;
}

void save_ring(const TensorRing& ring, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_ring: cannot open " + path);
  out << "trring 1\n";
  out << "d " << ring.d() << "\n";
  out << "n " << ring.n() << "\n";
  char buf[40];
  for (std::size_t k = 1; k <= ring.d(); ++k) {
    const TRCore& c = ring.core(k);
    out << "core " << k << " " << c.rank_left() << " " << c.rank_right()
        << "\n";
    const auto& a = c.raw();
    const std::size_t per_slice = c.rank_left() * c.rank_right();
    for (std::size_t v = 0; v < c.grid(); ++v) {
      for (std::size_t t = 0; t < per_slice; ++t) {
        std::snprintf(buf, sizeof buf, "%a", a[v * per_slice + t]);
        out << (t ? " " : "") << buf;
      }
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("save_ring: write failed for " + path);
}

TensorRing load_ring(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ring: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "trring" || version != 1)
    throw std::runtime_error("load_ring: not a ring file: " + path);
  std::string key;
  std::size_t d = 0, n = 0;
  in >> key >> d;
  if (key != "d") throw std::runtime_error("load_ring: malformed header");
  in >> key >> n;
  if (key != "n") throw std::runtime_error("load_ring: malformed header");
  std::vector<TRCore> cores;
  cores.reserve(d);
  for (std::size_t k = 1; k <= d; ++k) {
    std::size_t idx = 0, rl = 0, rr = 0;
    in >> key >> idx >> rl >> rr;
    if (key != "core" || idx != k)
      throw std::runtime_error("load_ring: malformed core header");
    TRCore c(rl, n, rr);
    for (std::size_t t = 0; t < rl * n * rr; ++t) {
      std::string tok;
      in >> tok;
      c.raw()[t] = std::strtod(tok.c_str(), nullptr);
    }
    if (!in) throw std::runtime_error("load_ring: truncated payload");
    cores.push_back(std::move(c));
  }
  return TensorRing(std::move(cores));
}

}  // namespace tr
