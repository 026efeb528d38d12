#include <doctest.h>

#include <cmath>

#include "saltus/catalog.hpp"
#include "saltus/conjugacy.hpp"
#include "saltus/errors.hpp"
#include "saltus/maps.hpp"

using namespace saltus;

namespace {

// v = alpha o f - f' alpha for a known alpha with alpha(0) = 0.
RealFn manufactured(const PiecewiseExpandingMap& f, RealFn alpha) {
  return [f, alpha](double x) { return alpha(f(x)) - f.derivative(x) * alpha(x); };
}

double sup_diff(const GridFunction& u, const RealFn& exact) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::fabs(u[i] - exact(u.node(i))));
  return m;
}

}  // namespace

TEST_CASE("series solution recovers a manufactured conjugacy") {
  const RealFn alpha = [](double x) { return 0.2 * x * (1.0 - x * x); };
  for (const auto& f : {tent_map(), skew_tent_map(1.9), bumped_tent_map(1.8, 0.2)}) {
    CAPTURE(f.name());
    const RealFn v = manufactured(f, alpha);
    const auto sol = solve_tce_series(f, v, 512, 1e-12);
    CHECK(sup_diff(sol.alpha, alpha) <= sol.truncation_error_bound + 1e-10);
    CHECK(sol.alpha[256] == 0.0);
    CHECK(sol.at(0.123) == doctest::Approx(alpha(0.123)).epsilon(1e-9));
  }
}

TEST_CASE("pull-back iteration agrees with the series") {
  const auto f = skew_tent_map(1.7);
  const RealFn v = manufactured(f, [](double x) { return 0.3 * std::sin(M_PI * x); });
  const auto series = solve_tce_series(f, v, 1024, 1e-12);
  const auto pull = solve_tce_pullback(f, v, pullback_initial_guess(f, v, 1024), 80);
  REQUIRE(pull.cesaro.has_value());
  double diff = 0.0;
  for (std::size_t i = 0; i < series.alpha.size(); ++i) {
    diff = std::max(diff, std::fabs(series.alpha[i] - pull.alpha[i]));
  }
  CHECK(diff <= series.truncation_error_bound + pull.truncation_error_bound);
  CHECK(tce_residual(f, v, series.alpha) <= 1e-4);
}

TEST_CASE("horizontality defect vanishes on manufactured directions") {
  const auto f = skew_tent_map(1.9);
  const RealFn v = manufactured(f, [](double x) { return x * std::exp(x); });
  const auto d = horizontality_defect(f, v, DefectConvention::TceConsistency);
  CHECK(std::fabs(d.value) <= 1e-10 + d.error_bar);
  CHECK(std::fabs(horizontality_defect(f, v, DefectConvention::Printed).value) <= 1e-10 + d.error_bar);
}

TEST_CASE("x^2 over the tent is not horizontal and the two conventions are opposite") {
  const auto f = tent_map();
  const RealFn v = [](double x) { return x * x; };
  const auto printed = horizontality_defect(f, v, DefectConvention::Printed);
  const auto consistency = horizontality_defect(f, v, DefectConvention::TceConsistency);
  // J = sum_{j >= 1} 1 / (f^j)'(c_1) = -1/2 - 1/4 - ... = -1
  CHECK(printed.value == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(consistency.value == doctest::Approx(-printed.value).epsilon(1e-10));
}

TEST_CASE("series term count follows the geometric tail") {
  const auto st = series_terms(tent_map(), 1.0, 1e-12);
  // 2^-N / (1 - 1/2) < 1e-12
  CHECK(st.terms == 41);
  CHECK(st.tail_bound < 1e-12);
}

TEST_CASE("Holder constant of a linear function") {
  const auto u = GridFunction::sample(256, [](double x) { return x; });
  CHECK(holder_norm(u, 0.5).constant == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(holder_norm(u, 1.0), DomainError);
}

TEST_CASE("Holder budgets give nested estimates") {
  const auto u = GridFunction::sample(8192, [](double x) { return std::sqrt(std::fabs(x)); });
  const auto small = holder_norm(u, 0.5, 1000);
  const auto large = holder_norm(u, 0.5, 100000);
  CHECK(small.constant <= large.constant);
  CHECK(small.pairs_examined < large.pairs_examined);
  CHECK(large.constant <= 1.0 + 1e-12);
}

TEST_CASE("second-order equation has a small residual") {
  const auto g = catalog_function("odd_cubic", std::vector<double>{0.25});
  const auto fam = MapFamily::conjugation(skew_tent_map(1.9), g, zero_function(), 0.05);
  const RealFn v = [&fam](double x) { return fam.direction(x); };
  const auto a1 = solve_tce_series(fam.base(), v, 1024, 1e-12);
  // For h_t = x + t g the first-order conjugacy is g itself.
  CHECK(sup_diff(a1.alpha, [&g](double x) { return g(x); }) <= 1e-10);
  const auto a2 = solve_tce_second_order(fam, a1, 1024, 1e-12);
  CHECK(a2.alpha.size() == 1025);
  CHECK(std::isfinite(a2.alpha.sup_norm()));
}
