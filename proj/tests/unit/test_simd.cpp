#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "saltus/simd.hpp"

using namespace saltus::simd;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<Isa> wide_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(isa_available(Isa::Scalar));
  CHECK(isa_name(Isa::Scalar) == "scalar");
}

TEST_CASE("wide kernels agree with the scalar reference") {
  const KernelTable& ref = table(Isa::Scalar);
  std::mt19937_64 rng(11);
  for (Isa isa : wide_isas()) {
    CAPTURE(isa_name(isa));
    const KernelTable& k = table(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 1001u}) {
      CAPTURE(n);
      const auto a = random_vector(rng, n), b = random_vector(rng, n);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::fabs(a[i] * b[i]);
      CHECK(std::fabs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
            1e-15 * (1.0 + scale));

      auto y1 = b, y2 = b;
      k.axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      CHECK(y1 == y2);

      CHECK(k.max_abs(a.data(), n) == ref.max_abs(a.data(), n));
      CHECK(k.max_abs_diff(a.data(), b.data(), n) == ref.max_abs_diff(a.data(), b.data(), n));
      if (n > 5) {
        CHECK(k.max_abs_lag_diff(a.data(), 5, n - 5) == ref.max_abs_lag_diff(a.data(), 5, n - 5));
      }
      if (n > 0) {
        for (int p : {1, 2, 3}) {
          CHECK(k.varp_relax(b.data(), a.data(), 0.3, p, n) ==
                ref.varp_relax(b.data(), a.data(), 0.3, p, n));
        }
      }
    }
  }
}

TEST_CASE("gather kernel agrees with the scalar reference") {
  const KernelTable& ref = table(Isa::Scalar);
  std::mt19937_64 rng(5);
  const std::size_t n = 257, slots = 4;
  std::uniform_int_distribution<std::int32_t> col(0, static_cast<std::int32_t>(n - 1));
  std::vector<std::int32_t> cols(slots * n);
  for (auto& c : cols) c = col(rng);
  const auto coef = random_vector(rng, slots * n), in = random_vector(rng, n);
  std::vector<double> out_ref(n);
  ref.gather_apply(cols.data(), coef.data(), slots, n, in.data(), out_ref.data());
  for (Isa isa : wide_isas()) {
    std::vector<double> out(n);
    table(isa).gather_apply(cols.data(), coef.data(), slots, n, in.data(), out.data());
    CHECK(out == out_ref);
  }
}

TEST_CASE("ScopedIsa restores the previous selection") {
  const Isa before = active_isa();
  {
    ScopedIsa s(Isa::Scalar);
    CHECK(active_isa() == Isa::Scalar);
  }
  CHECK(active_isa() == before);
}

TEST_CASE("span wrappers match direct evaluation") {
  std::vector<double> a{1, -4, 2}, b{0.5, 1, 3};
  CHECK(dot(a, b) == doctest::Approx(1 * 0.5 - 4 + 6));
  CHECK(max_abs(a) == 4.0);
  CHECK(max_abs_diff(a, b) == 5.0);
}
