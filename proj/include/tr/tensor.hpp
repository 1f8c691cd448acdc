#pragma once

// Dense tensors over the grid [n]^d and the index bookkeeping shared by the
// whole pipeline.
//
// Conventions, used everywhere without exception:
//  * grid values and dimension labels are 1-based at API boundaries;
//  * flattened layouts put dimension 1 fastest (first listed dimension for
//    grouped reshapes, first factor for product enumerations).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tr/matrix.hpp"

namespace tr {

class BlackBox;

// Point on the grid [n]^d; entry j (0-based storage) is the 1-based value of
// dimension j+1.
using MultiIndex = std::vector<int>;

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& x) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (int v : x) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Value of x at ring position i, with i interpreted cyclically:
// position ((i-1) mod d) + 1. Accepts any integer i, e.g. i=0 -> x_d.
int mod_index(const MultiIndex& x, long long i, std::size_t d);

// Dense tensor with shape (n_1, ..., n_p), dimension 1 fastest.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<std::size_t> shape);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  // x has one 1-based entry per dimension
  double& at(const MultiIndex& x) { return data_[offset(x)]; }
  double at(const MultiIndex& x) const { return data_[offset(x)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::size_t offset(const MultiIndex& x) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

double frobenius_norm(const DenseTensor& t);

// Matrix view of a tensor with rows indexed by the dimensions in
// `row_dims` (listed order, first fastest) and columns by `col_dims`.
struct DimGroupMatrix {
  std::vector<int> row_dims;  // 1-based dimension labels
  std::vector<int> col_dims;
  Matrix values;
};

// Reshape T into the grouped matrix (row_dims; col_dims). The two lists must
// partition {1..order} exactly. An empty row_dims gives a 1 x N row vector.
DimGroupMatrix reshape_group(const DenseTensor& t, std::vector<int> row_dims,
                             std::vector<int> col_dims);

// Inverse of reshape_group for the original shape; exact (pure permutation).
DenseTensor reshape_ungroup(const DimGroupMatrix& m,
                            const std::vector<std::size_t>& shape);

// Set of partial assignments over a fixed list of dimensions. `dims` holds
// 1-based dimension labels in a fixed order (cyclic runs keep ring order);
// each element assigns one grid value per listed dimension. Invariants:
// distinct dims, values in [1,n], no duplicate elements.
struct SkeletonSet {
  std::vector<int> dims;
  std::vector<std::vector<int>> elements;

  std::size_t size() const { return elements.size(); }
  bool contains(const std::vector<int>& elem) const;
};

// Merge two disjoint partial assignments into a full multi-index of order d.
MultiIndex merge_assignments(const SkeletonSet& a, std::size_t ia,
                             const SkeletonSet& b, std::size_t ib,
                             std::size_t d);

// Evaluation matrix f(rows; cols): entry (i,j) evaluates the oracle at the
// union of rows.elements[i] and cols.elements[j], which must cover all d
// dimensions exactly once.
Matrix subsample(BlackBox& oracle, const SkeletonSet& rows,
                 const SkeletonSet& cols);

}  // namespace tr
