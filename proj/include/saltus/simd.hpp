#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Vector kernels behind a runtime-selected instruction set. Every kernel has a
// scalar reference; the wide variants must agree with it (exactly for max
// reductions, to rounding for sums).
namespace saltus::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // max over i in [0, n) of |u[i + lag] - u[i]|
  double (*max_abs_lag_diff)(const double* u, std::size_t lag, std::size_t n);
  // max over j < n of best[j] + |xi - x[j]|^p for integer p >= 1
  double (*varp_relax)(const double* best, const double* x, double xi, int p, std::size_t n);
  // out[i] = sum_k coef[k*n + i] * in[cols[k*n + i]], k < slots
  void (*gather_apply)(const std::int32_t* cols, const double* coef, std::size_t slots,
                       std::size_t n, const double* in, double* out);
};

bool isa_available(Isa isa) noexcept;
std::string_view isa_name(Isa isa) noexcept;

// The best available ISA unless overridden with SALTUS_SIMD=scalar|avx2|neon.
Isa active_isa() noexcept;
const KernelTable& table(Isa isa);
const KernelTable& kernels() noexcept;

// Process-wide override, for tests and benchmarks. Throws std::invalid_argument
// if the ISA is not available on this machine.
void set_isa(Isa isa);

class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : saved_(active_isa()) { set_isa(isa); }
  ~ScopedIsa() { set_isa(saved_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa saved_;
};

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double max_abs(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs_lag_diff(std::span<const double> u, std::size_t lag, std::size_t first,
                        std::size_t count);
double varp_relax(std::span<const double> best, std::span<const double> x, double xi, int p);

}  // namespace saltus::simd
