#include "tr/matrix.hpp"

#include <cmath>

#include "tr/kernels.hpp"

namespace tr {

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  matmul_acc(a, b, c);
  return c;
}

void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
    throw std::invalid_argument("matmul: shape mismatch");
  kernels::gemm_acc(a.rows(), b.cols(), a.cols(), a.data(), a.rows(), b.data(),
                    b.rows(), c.data(), c.rows());
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) t(j, i) = m(i, j);
  return t;
}

double frobenius_norm(const Matrix& m) {
  return std::sqrt(kernels::sumsq(m.data(), m.size()));
}

double trace(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("trace: not square");
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, i);
  return s;
}

}  // namespace tr
