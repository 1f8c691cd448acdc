#pragma once

// Column-major dense matrix. The whole codebase works at desk scale
// (dimensions up to a few thousand), so this stays deliberately small:
// contiguous storage, kernels-backed products, and nothing clever.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tr {

class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return a_[i + rows_ * j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i + rows_ * j];
  }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* col(std::size_t j) { return a_.data() + rows_ * j; }
  const double* col(std::size_t j) const { return a_.data() + rows_ * j; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> a_;
};

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);

// C += A * B
void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c);

Matrix transpose(const Matrix& m);

double frobenius_norm(const Matrix& m);

// sum_i A(i,i); requires square
double trace(const Matrix& m);

}  // namespace tr
