#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "saltus/bvspaces.hpp"
#include "saltus/errors.hpp"
#include "saltus/grid_function.hpp"

using namespace saltus;

TEST_CASE("var_1 is total variation") {
  const std::vector<double> v{0, 1, 0.5, 2, -1};
  CHECK(var_p(v, 1.0) == doctest::Approx(1 + 0.5 + 1.5 + 3));
}

TEST_CASE("var_2 of a monotone sequence is its range") {
  const std::vector<double> v{0, 0.1, 0.2, 0.7, 1.0};
  CHECK(var_p(v, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("var_p of a zig-zag") {
  // 0 1 0 1: every increment is 1, three of them.
  const std::vector<double> v{0, 1, 0, 1};
  CHECK(var_p(v, 1.0) == doctest::Approx(3.0));
  CHECK(var_p(v, 2.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(var_p(v, 3.0) == doctest::Approx(std::cbrt(3.0)));
}

TEST_CASE("var_p of constants and singletons is zero") {
  CHECK(var_p(std::vector<double>{2.0}, 1.5) == 0.0);
  CHECK(var_p(std::vector<double>{3, 3, 3}, 2.0) == 0.0);
}

TEST_CASE("var_p rejects p < 1") {
  CHECK_THROWS_AS(var_p(std::vector<double>{0, 1}, 0.5), ValidationError);
}

TEST_CASE("extrema subsequence keeps endpoints and turning points") {
  const std::vector<double> v{0, 1, 2, 2, 1, 3, 3, 3};
  const auto e = extrema_subsequence(v);
  CHECK(e == std::vector<double>{0, 2, 1, 3});
}

TEST_CASE("dynamic programme matches exhaustive search") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> len(1, 10);
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = u(rng);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      CHECK(var_p(v, p) == doctest::Approx(var_p_bruteforce(v, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("var_p is non-increasing in p") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> v(40);
  for (auto& x : v) x = n(rng);
  double prev = var_p(v, 1.0);
  for (double p : {1.25, 1.5, 2.0, 3.0, 5.0}) {
    const double cur = var_p(v, p);
    CHECK(cur <= prev * (1.0 + 1e-12));
    prev = cur;
  }
}

TEST_CASE("bvp_norm pads with zeros") {
  const GridFunction u(std::vector<double>{1, 1, 1});
  CHECK(bvp_norm(u, 1.0) == doctest::Approx(2.0));
  CHECK(bvp_norm(u, 2.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("bvp_norm is subadditive and absolutely homogeneous") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = GridFunction::sample(64, [&](double) { return u(rng); });
    const auto b = GridFunction::sample(64, [&](double) { return u(rng); });
    for (double p : {1.0, 1.5, 2.0}) {
      CHECK(bvp_norm(a + b, p) <= bvp_norm(a, p) + bvp_norm(b, p) + 1e-12);
      CHECK(bvp_norm(-2.5 * a, p) == doctest::Approx(2.5 * bvp_norm(a, p)));
    }
  }
}
