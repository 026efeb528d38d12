#include <immintrin.h>

#include <cmath>

#include "simd/kernels.hpp"

namespace saltus::simd::detail {
namespace {

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  lo = _mm_max_sd(lo, _mm_unpackhi_pd(lo, lo));
  return _mm_cvtsd_f64(lo);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  lo = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
  return _mm_cvtsd_f64(lo);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double max_abs(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, vabs(_mm256_loadu_pd(x + i)));
  double r = hmax(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  double r = hmax(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i] - b[i]));
  return r;
}

double max_abs_lag_diff(const double* u, std::size_t lag, std::size_t n) {
  return max_abs_diff(u + lag, u, n);
}

double varp_relax(const double* best, const double* x, double xi, int p, std::size_t n) {
  const __m256d vxi = _mm256_set1_pd(xi);
  __m256d m = _mm256_set1_pd(-INFINITY);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d d = vabs(_mm256_sub_pd(vxi, _mm256_loadu_pd(x + j)));
    __m256d pw = d;
    for (int k = 1; k < p; ++k) pw = _mm256_mul_pd(pw, d);
    m = _mm256_max_pd(m, _mm256_add_pd(_mm256_loadu_pd(best + j), pw));
  }
  double r = hmax(m);
  for (; j < n; ++j) {
    double d = std::fabs(xi - x[j]);
    double pw = d;
    for (int k = 1; k < p; ++k) pw *= d;
    r = std::fmax(r, best[j] + pw);
  }
  return r;
}

void gather_apply(const std::int32_t* cols, const double* coef, std::size_t slots, std::size_t n,
                  const double* in, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_setzero_pd();
    for (std::size_t k = 0; k < slots; ++k) {
      __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k * n + i));
      __m256d v = _mm256_i32gather_pd(in, idx, 8);
      s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(coef + k * n + i), v));
    }
    _mm256_storeu_pd(out + i, s);
  }
  for (; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < slots; ++k) s += coef[k * n + i] * in[cols[k * n + i]];
    out[i] = s;
  }
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable t{dot, axpy, max_abs, max_abs_diff, max_abs_lag_diff, varp_relax,
                             gather_apply};
  return t;
}

}  // namespace saltus::simd::detail
