#include "tr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tr/kernels.hpp"
#include "tr/oracle.hpp"
#include "tr/warn.hpp"

namespace tr {

namespace {
WarnHandler g_warn = [](const std::string& m) {
  std::fputs(("warning: " + m + "\n").c_str(), stderr);
};
}  // namespace

WarnHandler set_warn_handler(WarnHandler h) {
  WarnHandler old = g_warn;
  g_warn = std::move(h);
  return old;
}

void warn(const std::string& message) {
  if (g_warn) g_warn(message);
}

int mod_index(const MultiIndex& x, long long i, std::size_t d) {
  if (d == 0 || x.size() != d)
    throw std::invalid_argument("mod_index: bad length");
  const long long dd = static_cast<long long>(d);
  long long pos = (i - 1) % dd;
  if (pos < 0) pos += dd;
  return x[static_cast<std::size_t>(pos)];
}

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)) {
  std::size_t total = 1;
  for (std::size_t n : shape_) {
    if (n == 0) throw std::invalid_argument("DenseTensor: zero extent");
    total *= n;
  }
  data_.assign(total, 0.0);
}

std::size_t DenseTensor::offset(const MultiIndex& x) const {
  if (x.size() != shape_.size())
    throw std::invalid_argument("DenseTensor: index order mismatch");
  std::size_t off = 0, stride = 1;
  for (std::size_t j = 0; j < shape_.size(); ++j) {
    const int v = x[j];
    if (v < 1 || static_cast<std::size_t>(v) > shape_[j])
      throw std::out_of_range("DenseTensor: index out of range");
    off += static_cast<std::size_t>(v - 1) * stride;
    stride *= shape_[j];
  }
  return off;
}

double frobenius_norm(const DenseTensor& t) {
  return std::sqrt(kernels::sumsq(t.data(), t.size()));
}

namespace {

// Strides of the listed dimensions in the dimension-1-fastest layout, plus
// the product of their extents.
struct GroupIndexer {
  std::vector<std::size_t> strides;   // stride of each listed dim in t
  std::vector<std::size_t> extents;   // extent of each listed dim
  std::size_t count = 1;

  GroupIndexer(const std::vector<int>& dims,
               const std::vector<std::size_t>& shape) {
    std::size_t stride = 1;
    std::vector<std::size_t> full(shape.size());
    for (std::size_t j = 0; j < shape.size(); ++j) {
      full[j] = stride;
      stride *= shape[j];
    }
    for (int d : dims) {
      strides.push_back(full[static_cast<std::size_t>(d - 1)]);
      extents.push_back(shape[static_cast<std::size_t>(d - 1)]);
      count *= extents.back();
    }
  }

  // Tensor-offset contribution of the group's k-th flat index (first listed
  // dimension fastest).
  std::size_t offset(std::size_t k) const {
    std::size_t off = 0;
    for (std::size_t j = 0; j < extents.size(); ++j) {
      off += (k % extents[j]) * strides[j];
      k /= extents[j];
    }
    return off;
  }
};

void check_partition(const std::vector<int>& rows, const std::vector<int>& cols,
                     std::size_t order) {
  std::vector<char> seen(order, 0);
  auto mark = [&](const std::vector<int>& dims) {
    for (int d : dims) {
      if (d < 1 || static_cast<std::size_t>(d) > order)
        throw std::invalid_argument("reshape_group: dimension out of range");
      if (seen[static_cast<std::size_t>(d - 1)]++)
        throw std::invalid_argument("reshape_group: overlapping dim-sets");
    }
  };
  mark(rows);
  mark(cols);
  for (char c : seen)
    if (!c) throw std::invalid_argument("reshape_group: incomplete dim-sets");
}

}  // namespace

DimGroupMatrix reshape_group(const DenseTensor& t, std::vector<int> row_dims,
                             std::vector<int> col_dims) {
  check_partition(row_dims, col_dims, t.order());
  GroupIndexer ri(row_dims, t.shape()), ci(col_dims, t.shape());
  DimGroupMatrix out;
  out.values = Matrix(ri.count, ci.count);
  for (std::size_t j = 0; j < ci.count; ++j) {
    const std::size_t cj = ci.offset(j);
    for (std::size_t i = 0; i < ri.count; ++i)
      out.values(i, j) = t.data()[cj + ri.offset(i)];
  }
  out.row_dims = std::move(row_dims);
  out.col_dims = std::move(col_dims);
  return out;
}

DenseTensor reshape_ungroup(const DimGroupMatrix& m,
                            const std::vector<std::size_t>& shape) {
  check_partition(m.row_dims, m.col_dims, shape.size());
  GroupIndexer ri(m.row_dims, shape), ci(m.col_dims, shape);
  if (ri.count != m.values.rows() || ci.count != m.values.cols())
    throw std::invalid_argument("reshape_ungroup: shape mismatch");
  DenseTensor t(shape);
  for (std::size_t j = 0; j < ci.count; ++j) {
    const std::size_t cj = ci.offset(j);
    for (std::size_t i = 0; i < ri.count; ++i)
      t.data()[cj + ri.offset(i)] = m.values(i, j);
  }
  return t;
}

bool SkeletonSet::contains(const std::vector<int>& elem) const {
  return std::find(elements.begin(), elements.end(), elem) != elements.end();
}

MultiIndex merge_assignments(const SkeletonSet& a, std::size_t ia,
                             const SkeletonSet& b, std::size_t ib,
                             std::size_t d) {
  MultiIndex x(d, 0);
  auto fill = [&](const SkeletonSet& s, std::size_t i) {
    const auto& elem = s.elements[i];
    for (std::size_t j = 0; j < s.dims.size(); ++j) {
      const std::size_t pos = static_cast<std::size_t>(s.dims[j] - 1);
      if (pos >= d || x[pos] != 0)
        throw std::invalid_argument(
            "merge_assignments: dims not a disjoint cover");
      x[pos] = elem[j];
    }
  };
  fill(a, ia);
  fill(b, ib);
  for (int v : x)
    if (v == 0)
      throw std::invalid_argument("merge_assignments: dims not a full cover");
  return x;
}

Matrix subsample(BlackBox& oracle, const SkeletonSet& rows,
                 const SkeletonSet& cols) {
  const std::size_t d = oracle.dim();
  Matrix m(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      m(i, j) = oracle(merge_assignments(rows, i, cols, j, d));
  return m;
}

}  // namespace tr
