#include <arm_neon.h>

#include <cmath>

#include "simd/kernels.hpp"

namespace saltus::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
    s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i] - b[i]));
  return r;
}

double max_abs(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

double max_abs_lag_diff(const double* u, std::size_t lag, std::size_t n) {
  return max_abs_diff(u + lag, u, n);
}

double varp_relax(const double* best, const double* x, double xi, int p, std::size_t n) {
  const float64x2_t vxi = vdupq_n_f64(xi);
  float64x2_t m = vdupq_n_f64(-INFINITY);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t d = vabdq_f64(vxi, vld1q_f64(x + j));
    float64x2_t pw = d;
    for (int k = 1; k < p; ++k) pw = vmulq_f64(pw, d);
    m = vmaxq_f64(m, vaddq_f64(vld1q_f64(best + j), pw));
  }
  double r = vmaxvq_f64(m);
  for (; j < n; ++j) {
    double d = std::fabs(xi - x[j]);
    double pw = d;
    for (int k = 1; k < p; ++k) pw *= d;
    r = std::fmax(r, best[j] + pw);
  }
  return r;
}

// No gather instruction on NEON; the scalar loop is what the compiler would emit anyway.
void gather_apply(const std::int32_t* cols, const double* coef, std::size_t slots, std::size_t n,
                  const double* in, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < slots; ++k) s += coef[k * n + i] * in[cols[k * n + i]];
    out[i] = s;
  }
}

}  // namespace

const KernelTable& neon_table() noexcept {
  static const KernelTable t{dot, axpy, max_abs, max_abs_diff, max_abs_lag_diff, varp_relax,
                             gather_apply};
  return t;
}

}  // namespace saltus::simd::detail
