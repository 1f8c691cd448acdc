#include "tr/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tr/kernels.hpp"
#include "tr/linalg.hpp"
#include "tr/oracle.hpp"
#include "tr/tensor.hpp"

namespace tr {

namespace {

int wrap_dim(long long raw, std::size_t d) {
  const long long dd = static_cast<long long>(d);
  long long m = (raw - 1) % dd;
  if (m < 0) m += dd;
  return static_cast<int>(m) + 1;
}

void check_contiguous(const std::vector<int>& region, std::size_t d,
                      const char* who) {
  if (region.empty())
    throw std::invalid_argument(std::string(who) + ": empty region");
  if (region.size() > d)
    throw std::invalid_argument(std::string(who) + ": region longer than d");
  for (std::size_t j = 0; j < region.size(); ++j) {
    if (region[j] < 1 || static_cast<std::size_t>(region[j]) > d)
      throw std::invalid_argument(std::string(who) +
                                  ": dimension label out of range");
    if (j > 0 && region[j] != wrap_dim(region[j - 1] + 1, d))
      throw std::invalid_argument(std::string(who) +
                                  ": region not cyclically contiguous");
  }
}

}  // namespace

Matrix segment_product(const TensorRing& ring, const std::vector<int>& region,
                       const std::vector<int>& x_region) {
  const std::size_t d = ring.d(), n = ring.n();
  check_contiguous(region, d, "segment_product");
  if (x_region.size() != region.size())
    throw std::invalid_argument(
        "segment_product: one grid value per region dimension required");
  for (int v : x_region)
    if (v < 1 || static_cast<std::size_t>(v) > n)
      throw std::invalid_argument("segment_product: grid value out of range");

  Matrix prod =
      ring.core(static_cast<std::size_t>(region[0])).slice(x_region[0]);
  for (std::size_t j = 1; j < region.size(); ++j)
    prod = matmul(prod, ring.core(static_cast<std::size_t>(region[j]))
                            .slice(x_region[j]));
  return prod;
}

double rank1_ratio(const Matrix& b) {
  const double fro2 = kernels::sumsq(b.data(), b.size());
  if (fro2 == 0.0)
    throw std::invalid_argument("rank1_ratio: zero matrix");
  const Svd svd = truncated_svd(b, 1);
  const double s1 = svd.sigma.empty() ? 0.0 : svd.sigma[0];
  return s1 * s1 / fro2;
}

double alpha_ratio(BlackBox& oracle, const Partition& part,
                   const std::vector<int>& z, std::size_t budget) {
  const std::size_t d = oracle.dim(), n = oracle.grid();
  std::vector<char> seen(d, 0);
  auto mark = [&](const std::vector<int>& dims) {
    for (int dim : dims) {
      if (dim < 1 || static_cast<std::size_t>(dim) > d ||
          seen[static_cast<std::size_t>(dim - 1)]++)
        throw std::invalid_argument("alpha_ratio: groups must partition [d]");
    }
  };
  mark(part.a);
  mark(part.b);
  mark(part.c1);
  mark(part.c2);
  for (char c : seen)
    if (!c) throw std::invalid_argument("alpha_ratio: groups must cover [d]");
  if (z.size() != part.a.size() + part.b.size())
    throw std::invalid_argument(
        "alpha_ratio: z must assign every dimension of a and b");
  if (part.c1.empty() || part.c2.empty())
    throw std::invalid_argument("alpha_ratio: c1 and c2 must be nonempty");

  std::size_t rows = 1, cols = 1;
  for (std::size_t j = 0; j < part.c1.size(); ++j) {
    if (rows > budget / n)
      throw std::invalid_argument("alpha_ratio: unfolding exceeds budget");
    rows *= n;
  }
  for (std::size_t j = 0; j < part.c2.size(); ++j) {
    if (rows * cols > budget / n)
      throw std::invalid_argument("alpha_ratio: unfolding exceeds budget");
    cols *= n;
  }

  MultiIndex x(d, 1);
  for (std::size_t j = 0; j < part.a.size(); ++j)
    x[static_cast<std::size_t>(part.a[j] - 1)] = z[j];
  for (std::size_t j = 0; j < part.b.size(); ++j)
    x[static_cast<std::size_t>(part.b[j] - 1)] = z[part.a.size() + j];

  // first listed dimension fastest, in both groups
  Matrix m(rows, cols);
  for (std::size_t cc = 0; cc < cols; ++cc) {
    std::size_t rem = cc;
    for (int dim : part.c2) {
      x[static_cast<std::size_t>(dim - 1)] = static_cast<int>(rem % n) + 1;
      rem /= n;
    }
    for (std::size_t rr = 0; rr < rows; ++rr) {
      rem = rr;
      for (int dim : part.c1) {
        x[static_cast<std::size_t>(dim - 1)] = static_cast<int>(rem % n) + 1;
        rem /= n;
      }
      m(rr, cc) = oracle(x);
    }
  }
  return rank1_ratio(m);
}

double condition_kappa(const TensorRing& ring,
                       const std::vector<int>& segment) {
  const std::size_t d = ring.d(), n = ring.n(), r = ring.rank();
  check_contiguous(segment, d, "condition_kappa");
  const std::size_t r2 = r * r;
  std::size_t cols = 1;
  for (std::size_t j = 0; j < segment.size(); ++j) {
    if (cols > 10'000'000 / n)
      throw std::invalid_argument("condition_kappa: segment grid too large");
    cols *= n;
  }
  if (cols < r2)
    throw std::invalid_argument(
        "condition_kappa: segment too short, n^L < r^2");

  // column x -> segment product, rows grouped (bond-in, bond-out)
  Matrix m(r2, cols);
  std::vector<int> xs(segment.size(), 1);
  for (std::size_t cc = 0; cc < cols; ++cc) {
    std::size_t rem = cc;
    for (std::size_t j = 0; j < segment.size(); ++j) {
      xs[j] = static_cast<int>(rem % n) + 1;
      rem /= n;
    }
    Matrix prod = segment_product(ring, segment, xs);
    for (std::size_t jj = 0; jj < r; ++jj)
      for (std::size_t ii = 0; ii < r; ++ii)
        m(ii + r * jj, cc) = prod(ii, jj);
  }

  const Svd svd = truncated_svd(m, r2, 0.0);
  if (svd.sigma.size() < r2)
    return std::numeric_limits<double>::infinity();
  return svd.sigma.front() / svd.sigma.back();
}

}  // namespace tr
