#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "simd/kernels.hpp"

namespace saltus::simd {
namespace {

Isa detect() noexcept {
#if defined(SALTUS_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
#if defined(SALTUS_HAVE_NEON)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

Isa initial() noexcept {
  Isa best = detect();
  if (const char* env = std::getenv("SALTUS_SIMD")) {
    std::string s(env);
    if (s == "scalar") return Isa::Scalar;
    if (s == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (s == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  return best;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd: span length mismatch");
}

}  // namespace

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SALTUS_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(SALTUS_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument("simd: ISA not available");
  switch (isa) {
#if defined(SALTUS_HAVE_AVX2)
    case Isa::Avx2: return detail::avx2_table();
#endif
#if defined(SALTUS_HAVE_NEON)
    case Isa::Neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

const KernelTable& kernels() noexcept { return table(active_isa()); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument("simd: ISA not available");
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

double max_abs(std::span<const double> x) { return kernels().max_abs(x.data(), x.size()); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return kernels().max_abs_diff(a.data(), b.data(), a.size());
}

double max_abs_lag_diff(std::span<const double> u, std::size_t lag, std::size_t first,
                        std::size_t count) {
  if (first + count + lag > u.size()) throw std::invalid_argument("simd: lag range out of bounds");
  return kernels().max_abs_lag_diff(u.data() + first, lag, count);
}

double varp_relax(std::span<const double> best, std::span<const double> x, double xi, int p) {
  check_sizes(best.size(), x.size());
  if (p < 1) throw std::invalid_argument("simd: varp_relax needs integer p >= 1");
  return kernels().varp_relax(best.data(), x.data(), xi, p, x.size());
}

}  // namespace saltus::simd
