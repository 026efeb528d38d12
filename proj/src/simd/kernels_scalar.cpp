#include <cmath>

#include "simd/kernels.hpp"

namespace saltus::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
  return m;
}

double max_abs_lag_diff(const double* u, std::size_t lag, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(u[i + lag] - u[i]));
  return m;
}

inline double ipow(double d, int p) {
  double r = d;
  for (int k = 1; k < p; ++k) r *= d;
  return r;
}

double varp_relax(const double* best, const double* x, double xi, int p, std::size_t n) {
  double m = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) m = std::fmax(m, best[j] + ipow(std::fabs(xi - x[j]), p));
  return m;
}

void gather_apply(const std::int32_t* cols, const double* coef, std::size_t slots, std::size_t n,
                  const double* in, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < slots; ++k) s += coef[k * n + i] * in[cols[k * n + i]];
    out[i] = s;
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable t{dot, axpy, max_abs, max_abs_diff, max_abs_lag_diff, varp_relax,
                             gather_apply};
  return t;
}

}  // namespace saltus::simd::detail
