#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "saltus/catalog.hpp"
#include "saltus/errors.hpp"
#include "saltus/maps.hpp"
#include "saltus/transfer.hpp"

using namespace saltus;

TEST_CASE("grid size must be even and not tiny") {
  CHECK_THROWS_AS(build_operator(tent_map(), 101), DomainError);
  CHECK_THROWS_AS(build_operator(tent_map(), 32), DomainError);
}

TEST_CASE("tent operator fixes the uniform density") {
  const auto op = build_operator(tent_map(), 256);
  const auto one = GridFunction::sample(256, [](double) { return 0.5; });
  const auto out = op.apply(one);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("tent operator on x^2") {
  // L x^2 = ((x+1)/2 - 1)^2 / 2 + (1 - (x+1)/2)^2 / 2 = (1 - x)^2 / 4
  const auto op = build_operator(tent_map(), 512);
  const auto u = GridFunction::sample(512, [](double x) { return x * x; });
  const auto out = op.apply(u);
  for (std::size_t i = 0; i < out.size(); i += 17) {
    const double x = out.node(i);
    CHECK(out[i] == doctest::Approx((1 - x) * (1 - x) / 4).epsilon(1e-4));
  }
}

TEST_CASE("apply, transpose and dense matrix agree") {
  const auto op = build_operator(skew_tent_map(1.8), 128);
  const std::size_t n = op.size();
  const auto A = op.dense_row_major();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n), y(n), yt(n);
  for (auto& v : x) v = u(rng);
  op.apply(x, y);
  op.apply_transpose(x, yt);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0, st = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += A[i * n + j] * x[j];
      st += A[j * n + i] * x[j];
    }
    CHECK(y[i] == doctest::Approx(s).epsilon(1e-13));
    CHECK(yt[i] == doctest::Approx(st).epsilon(1e-13));
  }
}

TEST_CASE("every node has one or two preimages with weights 1/|f'|") {
  const auto f = bumped_tent_map(1.8, 0.2);
  const auto op = build_operator(f, 256);
  for (std::size_t i = 0; i < op.size(); ++i) {
    const auto pre = op.preimages(i);
    CHECK(pre.size() <= 2);
    for (const auto& p : pre) {
      CHECK(p.weight == doctest::Approx(1.0 / std::fabs(f.derivative(p.y, p.side))).epsilon(1e-12));
    }
  }
}

TEST_CASE("leading spectrum of the tent") {
  const auto sd = leading_spectrum(build_operator(tent_map(), 1024));
  CHECK(sd.leading_eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sd.density.integral() == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < sd.density.size(); ++i) CHECK(std::fabs(sd.density[i] - 0.5) < 1e-10);
  double sum = 0.0;
  for (double d : sd.dual) sum += d;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(sd.gap_estimate < 0.6);
  CHECK(sd.pairing(sd.density.values()) == doctest::Approx(1.0));
}

TEST_CASE("resolvent against the Neumann series") {
  const std::size_t M = 256;
  const auto op = build_operator(tent_map(), M);
  const auto sd = leading_spectrum(op);
  // x^2 - 1/3 is mean-zero in the continuum only; project it.
  const auto w = sd.complement(GridFunction::sample(M, [](double x) { return x * x - 1.0 / 3.0; }));
  const auto u = Resolvent(op, sd).solve(w);
  GridFunction term = w, sum = w;
  for (int n = 0; n < 200; ++n) {
    term = op.apply(term);
    sum = sum + term;
  }
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(sum[i]).epsilon(1e-9));
  // (I - A) u = w
  const auto lhs = u - op.apply(u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(lhs[i] == doctest::Approx(w[i]).scale(1.0).epsilon(1e-10));
}

TEST_CASE("resolvent rejects right-hand sides with mass") {
  const auto op = build_operator(tent_map(), 128);
  const auto sd = leading_spectrum(op);
  const auto w = GridFunction::sample(128, [](double x) { return x * x; });
  CHECK_THROWS_AS(Resolvent(op, sd).solve(w), ValidationError);
}

TEST_CASE("weighted operator at s = t = 0 is the plain operator") {
  const auto fam =
      MapFamily::conjugation(tent_map(), catalog_function("bump"), zero_function(), 0.05);
  const auto w = weighted_operator(fam, 0.0, 0.0, catalog_function("monomial", std::vector<double>{1}), 128);
  CHECK(w.has_default_weight());
  CHECK(w.dense_row_major() == build_operator(tent_map(), 128).dense_row_major());
  const auto ws = weighted_operator(fam, 0.1, 0.0, catalog_function("monomial", std::vector<double>{2}), 128);
  CHECK_FALSE(ws.has_default_weight());
  CHECK(leading_spectrum(ws).leading_eigenvalue > 1.0);
  CHECK_THROWS_AS(weighted_operator(fam, 0.0, 0.5, catalog_function("zero"), 128), DomainError);
}

TEST_CASE("XFER dump round trip") {
  const auto op = build_operator(skew_tent_map(1.9), 64);
  const auto path = std::filesystem::temp_directory_path() / "saltus_test.xfer";
  write_matrix_dump(op, path);
  const auto d = read_matrix_dump(path);
  std::filesystem::remove(path);
  CHECK(d.grid_size == 64);
  CHECK(d.flags == 0);
  CHECK(d.data == op.dense_row_major());
}
