#include "tr/initializer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tr/kernels.hpp"
#include "tr/linalg.hpp"
#include "tr/oracle.hpp"
#include "tr/warn.hpp"

namespace tr {

namespace {

int wrap_dim(long long raw, std::size_t d) {
  const long long dd = static_cast<long long>(d);
  long long m = (raw - 1) % dd;
  if (m < 0) m += dd;
  return static_cast<int>(m) + 1;
}

// cyclic run of `len` dimensions starting at `start`
std::vector<int> dim_run(long long start, std::size_t len, std::size_t d) {
  std::vector<int> dims(len);
  for (std::size_t j = 0; j < len; ++j)
    dims[j] = wrap_dim(start + static_cast<long long>(j), d);
  return dims;
}

SkeletonSet single_assignment(std::vector<int> dims, std::vector<int> values) {
  SkeletonSet s;
  s.dims = std::move(dims);
  s.elements.push_back(std::move(values));
  return s;
}

SkeletonSet restrict_to(const MultiIndex& base, std::vector<int> dims) {
  std::vector<int> values(dims.size());
  for (std::size_t j = 0; j < dims.size(); ++j)
    values[j] = base[static_cast<std::size_t>(dims[j] - 1)];
  return single_assignment(std::move(dims), std::move(values));
}

MultiIndex random_base(std::size_t d, std::size_t n, Rng& rng) {
  MultiIndex base(d);
  for (auto& v : base) v = rng.uniform_index(static_cast<int>(n));
  return base;
}

void check_z(const SkeletonSet& z, int k, std::size_t free_span,
             std::size_t d) {
  if (z.elements.size() != 1)
    throw std::invalid_argument("frozen point must hold exactly one element");
  std::vector<char> seen(d, 0);
  for (std::size_t j = 0; j < free_span; ++j)
    seen[static_cast<std::size_t>(
        wrap_dim(k - 1 + static_cast<long long>(j), d) - 1)] = 1;
  std::size_t covered = free_span;
  for (int dim : z.dims) {
    if (dim < 1 || static_cast<std::size_t>(dim) > d ||
        seen[static_cast<std::size_t>(dim - 1)]++)
      throw std::invalid_argument("frozen point must cover the complement");
    ++covered;
  }
  if (covered != d)
    throw std::invalid_argument("frozen point must cover the complement");
}

}  // namespace

LocalTriple local_tt_svd(BlackBox& oracle, int k, std::size_t r,
                         const SkeletonSet& z) {
  const std::size_t d = oracle.dim(), n = oracle.grid();
  if (d < 4) throw std::invalid_argument("local_tt_svd: requires d >= 4");
  check_z(z, k, 3, d);

  // local block over (k-1, k, k+1)
  DenseTensor t({n, n, n});
  const int dm1 = wrap_dim(k - 1, d), dk = wrap_dim(k, d),
            dp1 = wrap_dim(k + 1, d);
  MultiIndex x(d, 0);
  for (std::size_t j = 0; j < z.dims.size(); ++j)
    x[static_cast<std::size_t>(z.dims[j] - 1)] = z.elements[0][j];
  MultiIndex local(3);
  for (int a = 1; a <= static_cast<int>(n); ++a)
    for (int y = 1; y <= static_cast<int>(n); ++y)
      for (int u = 1; u <= static_cast<int>(n); ++u) {
        x[static_cast<std::size_t>(dm1 - 1)] = a;
        x[static_cast<std::size_t>(dk - 1)] = y;
        x[static_cast<std::size_t>(dp1 - 1)] = u;
        local = {a, y, u};
        t.at(local) = oracle(x);
      }

  // first split: (k-1) against (k, k+1)
  Svd left = truncated_svd(reshape_group(t, {1}, {2, 3}).values, r);
  const std::size_t kl = left.sigma.size();

  // center-right block C(i, y, u) = sigma_i * V((y,u), i), then second split
  // (bond, k) against (k+1)
  Matrix m2(kl * n, n);
  for (std::size_t i = 0; i < kl; ++i)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t u = 0; u < n; ++u)
        m2(i + kl * y, u) = left.sigma[i] * left.v(y + n * u, i);
  Svd right = truncated_svd(m2, r);
  const std::size_t kr = right.sigma.size();

  LocalTriple out;
  out.k = k;
  out.deficient = kl < r || kr < r;
  if (out.deficient)
    warn("local_tt_svd: rank-deficient block at dimension " +
         std::to_string(k) + ", factors zero-padded");

  out.sigma_l.assign(r, 0.0);
  out.sigma_r.assign(r, 0.0);
  for (std::size_t i = 0; i < kl; ++i) out.sigma_l[i] = left.sigma[i];
  for (std::size_t j = 0; j < kr; ++j) out.sigma_r[j] = right.sigma[j];

  out.tl = Matrix(n, r);
  for (std::size_t i = 0; i < kl; ++i)
    for (std::size_t a = 0; a < n; ++a)
      out.tl(a, i) = left.u(a, i) * std::sqrt(left.sigma[i]);

  out.tr_m = Matrix(r, n);
  for (std::size_t j = 0; j < kr; ++j)
    for (std::size_t u = 0; u < n; ++u)
      out.tr_m(j, u) = std::sqrt(right.sigma[j]) * right.v(u, j);

  // center: (U_R Sigma_R)(i + kl*y, j) rescaled by the inverse square roots
  out.tc = TRCore(r, n, r);
  for (std::size_t j = 0; j < kr; ++j)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t i = 0; i < kl; ++i)
        out.tc.at(i, static_cast<int>(y + 1), j) =
            right.u(i + kl * y, j) * right.sigma[j] /
            (std::sqrt(left.sigma[i]) * std::sqrt(right.sigma[j]));
  return out;
}

Gauge solve_gauge(BlackBox& oracle, const LocalTriple& left,
                  const LocalTriple& right, const SkeletonSet& z) {
  const std::size_t d = oracle.dim(), n = oracle.grid();
  const std::size_t r = left.tc.rank_left();
  const int k = left.k;
  if (wrap_dim(k + 1, d) != wrap_dim(right.k, d))
    throw std::invalid_argument("solve_gauge: triples not adjacent");
  check_z(z, k, 4, d);

  // 4D block over (k-1 .. k+2)
  DenseTensor s_block({n, n, n, n});
  MultiIndex x(d, 0);
  for (std::size_t j = 0; j < z.dims.size(); ++j)
    x[static_cast<std::size_t>(z.dims[j] - 1)] = z.elements[0][j];
  const int dims4[4] = {wrap_dim(k - 1, d), wrap_dim(k, d), wrap_dim(k + 1, d),
                        wrap_dim(k + 2, d)};
  MultiIndex local(4);
  for (int a = 1; a <= static_cast<int>(n); ++a)
    for (int y = 1; y <= static_cast<int>(n); ++y)
      for (int u = 1; u <= static_cast<int>(n); ++u)
        for (int w = 1; w <= static_cast<int>(n); ++w) {
          x[static_cast<std::size_t>(dims4[0] - 1)] = a;
          x[static_cast<std::size_t>(dims4[1] - 1)] = y;
          x[static_cast<std::size_t>(dims4[2] - 1)] = u;
          x[static_cast<std::size_t>(dims4[3] - 1)] = w;
          local = {a, y, u, w};
          s_block.at(local) = oracle(x);
        }

  // left composite L((a,y), i) and right composite R(j, (u,w))
  Matrix lmat(n * n, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t a = 0; a < n; ++a) {
        double acc = 0.0;
        for (std::size_t p = 0; p < r; ++p)
          acc += left.tl(a, p) * left.tc.at(p, static_cast<int>(y + 1), i);
        lmat(a + n * y, i) = acc;
      }
  Matrix rmat(r, n * n);
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t j = 0; j < r; ++j) {
        double acc = 0.0;
        for (std::size_t p = 0; p < r; ++p)
          acc += right.tc.at(j, static_cast<int>(u + 1), p) * right.tr_m(p, w);
        rmat(j, u + n * w) = acc;
      }

  DimGroupMatrix smat = reshape_group(s_block, {1, 2}, {3, 4});

  // vec(L G R) = A vec(G) with A((row,col),(i,j)) = L(row,i) * R(j,col)
  const std::size_t nn = n * n;
  Matrix a_sys(nn * nn, r * r);
  Matrix b_sys(nn * nn, 1);
  for (std::size_t colc = 0; colc < nn; ++colc)
    for (std::size_t rowc = 0; rowc < nn; ++rowc) {
      const std::size_t srow = rowc + nn * colc;
      b_sys(srow, 0) = smat.values(rowc, colc);
      for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r; ++i)
          a_sys(srow, i + r * j) = lmat(rowc, i) * rmat(j, colc);
    }

  Matrix g_vec = ridge_ls(a_sys, b_sys, 0.0);
  Gauge out;
  out.g = Matrix(r, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < r; ++i) out.g(i, j) = g_vec(i + r * j, 0);

  Matrix fit(nn * nn, 1);
  matmul_acc(a_sys, g_vec, fit);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nn * nn; ++i) {
    const double diff = fit(i, 0) - b_sys(i, 0);
    num += diff * diff;
    den += b_sys(i, 0) * b_sys(i, 0);
  }
  out.rel_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return out;
}

TensorRing gauge_fix(BlackBox& oracle, const std::vector<LocalTriple>& triples,
                     Rng& rng, std::vector<double>* residuals,
                     const MultiIndex* base) {
  const std::size_t d = oracle.dim(), n = oracle.grid();
  if (triples.size() != d)
    throw std::invalid_argument("gauge_fix: need one triple per dimension");
  const std::size_t r = triples[0].tc.rank_left();
  if (residuals) residuals->assign(d, 0.0);

  MultiIndex shared = base ? *base : random_base(d, n, rng);

  std::vector<TRCore> cores;
  cores.reserve(d);
  for (std::size_t k = 1; k <= d; ++k) {
    const LocalTriple& left = triples[k - 1];
    const LocalTriple& right = triples[k % d];
    SkeletonSet z =
        restrict_to(shared, dim_run(static_cast<long long>(k) + 3, d - 4, d));
    Gauge gauge = solve_gauge(oracle, left, right, z);
    if (residuals) (*residuals)[k - 1] = gauge.rel_residual;

    TRCore h(r, n, r);
    for (std::size_t v = 1; v <= n; ++v) {
      Matrix slice(r, r);
      kernels::gemm_acc(r, r, r, left.tc.slice_data(static_cast<int>(v)), r,
                        gauge.g.data(), r, slice.data(), r);
      h.set_slice(static_cast<int>(v), slice);
    }
    cores.push_back(std::move(h));
  }
  TensorRing ring(std::move(cores));

  // The d bond solves determine each gauge from its own block, which leaves
  // the product of all gauges around the cycle off by one scalar; fit it on
  // a few probe points and absorb it into the first core.
  double num = 0.0, den = 0.0;
  for (int probe = 0; probe < 8; ++probe) {
    MultiIndex x = random_base(d, n, rng);
    const double want = oracle(x), got = eval_tr(ring, x);
    num += want * got;
    den += got * got;
  }
  if (den > 0.0) {
    const double c = num / den;
    TRCore& first = ring.core(1);
    for (double& v : first.raw()) v *= c;
  } else {
    warn("gauge_fix: degenerate ring scale, correction skipped");
  }
  return ring;
}

TensorRing initialize_ring(BlackBox& oracle, const InitOptions& opt,
                           std::vector<double>* residuals) {
  const std::size_t d = oracle.dim(), n = oracle.grid();
  if (d < 4)
    throw std::invalid_argument("initialize_ring: requires d >= 4");
  if (opt.r == 0) throw std::invalid_argument("initialize_ring: r == 0");
  Rng rng(opt.seed);
  const MultiIndex shared = random_base(d, n, rng);

  std::vector<LocalTriple> triples;
  triples.reserve(d);
  for (std::size_t k = 1; k <= d; ++k) {
    SkeletonSet z;
    if (opt.env_sets) {
      const SkeletonSet& env = (*opt.env_sets)[k - 1];
      if (env.elements.empty())
        throw std::invalid_argument("initialize_ring: empty env set");
      z = single_assignment(
          env.dims, env.elements[rng.uniform_below(env.elements.size())]);
    } else {
      z = restrict_to(shared, dim_run(static_cast<long long>(k) + 2, d - 3, d));
    }
    triples.push_back(local_tt_svd(oracle, static_cast<int>(k), opt.r, z));
  }
  return gauge_fix(oracle, triples, rng, residuals, &shared);
}

}  // namespace tr
