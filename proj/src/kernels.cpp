#include "tr/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

namespace tr::kernels {

namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

// Column-major accumulating product: C(:,j) += sum_l A(:,l) * B(l,j).
// The axpy formulation keeps every memory access contiguous.
void gemm_acc_scalar(std::size_t m, std::size_t n, std::size_t k,
                     const double* a, std::size_t lda,
                     const double* b, std::size_t ldb,
                     double* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    const double* bj = b + j * ldb;
    for (std::size_t l = 0; l < k; ++l) {
      axpy_scalar(bj[l], a + l * lda, cj, m);
    }
  }
}

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_supported();
double dot_avx2(const double*, const double*, std::size_t);
double sumsq_avx2(const double*, std::size_t);
void axpy_avx2(double, const double*, double*, std::size_t);
void scal_avx2(double, double*, std::size_t);
void gemm_acc_avx2(std::size_t, std::size_t, std::size_t,
                   const double*, std::size_t,
                   const double*, std::size_t,
                   double*, std::size_t);
#endif
#if defined(__aarch64__)
double dot_neon(const double*, const double*, std::size_t);
double sumsq_neon(const double*, std::size_t);
void axpy_neon(double, const double*, double*, std::size_t);
void scal_neon(double, double*, std::size_t);
void gemm_acc_neon(std::size_t, std::size_t, std::size_t,
                   const double*, std::size_t,
                   const double*, std::size_t,
                   double*, std::size_t);
#endif

struct Table {
  Backend backend;
  double (*dot)(const double*, const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  void (*gemm_acc)(std::size_t, std::size_t, std::size_t,
                   const double*, std::size_t,
                   const double*, std::size_t,
                   double*, std::size_t);
};

constexpr Table kScalarTable = {Backend::scalar, dot_scalar, sumsq_scalar,
                                axpy_scalar, scal_scalar, gemm_acc_scalar};

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return avx2_supported();
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Table make_table(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2)
    return {Backend::avx2, dot_avx2, sumsq_avx2, axpy_avx2, scal_avx2,
            gemm_acc_avx2};
#endif
#if defined(__aarch64__)
  if (b == Backend::neon)
    return {Backend::neon, dot_neon, sumsq_neon, axpy_neon, scal_neon,
            gemm_acc_neon};
#endif
  (void)b;
  return kScalarTable;
}

Backend pick_default() {
  if (const char* env = std::getenv("TR_KERNELS")) {
    if (!std::strcmp(env, "scalar")) return Backend::scalar;
    if (!std::strcmp(env, "avx2") && backend_supported(Backend::avx2))
      return Backend::avx2;
    if (!std::strcmp(env, "neon") && backend_supported(Backend::neon))
      return Backend::neon;
  }
  if (backend_supported(Backend::avx2)) return Backend::avx2;
  if (backend_supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

Table g_table = kScalarTable;
std::once_flag g_init;

const Table& table() {
  std::call_once(g_init, [] { g_table = make_table(pick_default()); });
  return g_table;
}

}  // namespace detail

Backend active() { return detail::table().backend; }

bool force(Backend b) {
  if (!detail::backend_supported(b)) return false;
  detail::table();  // ensure one-time init ran first
  detail::g_table = detail::make_table(b);
  return true;
}

const char* name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

double dot(const double* x, const double* y, std::size_t n) {
  return detail::table().dot(x, y, n);
}

double sumsq(const double* x, std::size_t n) {
  return detail::table().sumsq(x, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  detail::table().axpy(a, x, y, n);
}

void scal(double a, double* x, std::size_t n) {
  detail::table().scal(a, x, n);
}

void gemm_acc(std::size_t m, std::size_t n, std::size_t k,
              const double* a, std::size_t lda,
              const double* b, std::size_t ldb,
              double* c, std::size_t ldc) {
  detail::table().gemm_acc(m, n, k, a, lda, b, ldb, c, ldc);
}

}  // namespace tr::kernels
