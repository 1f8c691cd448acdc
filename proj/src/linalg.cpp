#include "tr/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "tr/kernels.hpp"
#include "tr/warn.hpp"

namespace tr {

namespace {

using EMap = Eigen::Map<const Eigen::MatrixXd>;

EMap emap(const Matrix& m) {
  return EMap(m.data(), static_cast<Eigen::Index>(m.rows()),
              static_cast<Eigen::Index>(m.cols()));
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<std::size_t>(e.rows()),
           static_cast<std::size_t>(e.cols()));
  Eigen::Map<Eigen::MatrixXd>(m.data(), e.rows(), e.cols()) = e;
  return m;
}

}  // namespace

Svd truncated_svd(const Matrix& m, std::size_t r, double rank_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      emap(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sig = svd.singularValues();
  const double s1 = sig.size() ? sig(0) : 0.0;
  std::size_t k = 0;
  while (k < static_cast<std::size_t>(sig.size()) && k < r &&
         sig(static_cast<Eigen::Index>(k)) > rank_tol * s1 && s1 > 0.0)
    ++k;

  Svd out;
  out.u = Matrix(m.rows(), k);
  out.v = Matrix(m.cols(), k);
  out.sigma.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Index ej = static_cast<Eigen::Index>(j);
    out.sigma[j] = sig(ej);
    // sign convention: largest-magnitude entry of the left vector positive,
    // lowest row index on ties
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double a = std::abs(svd.matrixU()(static_cast<Eigen::Index>(i), ej));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    const double flip =
        svd.matrixU()(static_cast<Eigen::Index>(imax), ej) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      out.u(i, j) = flip * svd.matrixU()(static_cast<Eigen::Index>(i), ej);
    for (std::size_t i = 0; i < m.cols(); ++i)
      out.v(i, j) = flip * svd.matrixV()(static_cast<Eigen::Index>(i), ej);
  }
  return out;
}

std::vector<int> rrqr_select(const Matrix& m, std::size_t s, double tie_tol) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::size_t picks = std::min(s, cols);
  Matrix work = m;  // residual columns, orthogonalized in place
  std::vector<double> nrm2(cols);
  for (std::size_t j = 0; j < cols; ++j)
    nrm2[j] = kernels::sumsq(work.col(j), rows);
  std::vector<char> used(cols, 0);
  std::vector<int> selected;
  selected.reserve(picks);

  for (std::size_t step = 0; step < picks; ++step) {
    double best = -1.0;
    for (std::size_t j = 0; j < cols; ++j)
      if (!used[j] && nrm2[j] > best) best = nrm2[j];
    std::size_t pick = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j]) continue;
      if (nrm2[j] >= best - tie_tol * std::max(best, 0.0)) {
        pick = j;
        break;  // lowest index within the tie tolerance
      }
    }
    used[pick] = 1;
    selected.push_back(static_cast<int>(pick) + 1);

    const double norm = std::sqrt(std::max(nrm2[pick], 0.0));
    if (norm > 0.0) {
      kernels::scal(1.0 / norm, work.col(pick), rows);
      const double* q = work.col(pick);
      for (std::size_t j = 0; j < cols; ++j) {
        if (used[j]) continue;
        const double proj = kernels::dot(q, work.col(j), rows);
        kernels::axpy(-proj, q, work.col(j), rows);
        // recomputing instead of downdating keeps the norms exact
        nrm2[j] = kernels::sumsq(work.col(j), rows);
      }
    }
  }
  return selected;
}

Matrix pinv(const Matrix& m, double tol) {
  Svd svd = truncated_svd(m, std::min(m.rows(), m.cols()), tol);
  // V * diag(1/sigma) * U^T
  Matrix vs = svd.v;
  for (std::size_t j = 0; j < svd.sigma.size(); ++j)
    kernels::scal(1.0 / svd.sigma[j], vs.col(j), vs.rows());
  Matrix out(m.cols(), m.rows());
  kernels::gemm_acc(out.rows(), out.cols(), svd.sigma.size(), vs.data(),
                    vs.rows(), transpose(svd.u).data(), svd.sigma.size(),
                    out.data(), out.rows());
  return out;
}

Matrix ridge_ls(const Matrix& a, const Matrix& b, double lambda) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("ridge_ls: row mismatch");
  if (lambda < 0.0) throw std::invalid_argument("ridge_ls: negative lambda");

  if (lambda == 0.0) {
    Matrix h = matmul(pinv(a), b);
    // report rank deficiency: the minimum-norm branch is silent otherwise
    Svd probe = truncated_svd(a, std::min(a.rows(), a.cols()));
    if (probe.sigma.size() < std::min(a.rows(), a.cols()))
      warn("ridge_ls: rank-deficient system, minimum-norm solution returned");
    return h;
  }

  const std::size_t p = a.cols();
  Matrix gram(p, p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const double g = kernels::dot(a.col(i), a.col(j), a.rows());
      gram(i, j) = g;
      gram(j, i) = g;
    }
  Matrix rhs(p, b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < p; ++i)
      rhs(i, j) = kernels::dot(a.col(i), b.col(j), a.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(emap(gram),
                                                    Eigen::EigenvaluesOnly);
  const double sigma =
      es.eigenvalues().size() ? std::max(es.eigenvalues().maxCoeff(), 0.0) : 0.0;
  if (sigma == 0.0) return Matrix(p, b.cols());  // A == 0: zero is min-norm

  Eigen::MatrixXd shifted = emap(gram);
  shifted.diagonal().array() += lambda * sigma;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    warn("ridge_ls: Cholesky failed, falling back to pseudo-inverse");
    return matmul(pinv(a), b);
  }
  return from_eigen(llt.solve(emap(rhs)));
}

}  // namespace tr
