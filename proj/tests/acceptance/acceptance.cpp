// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "saltus/bvspaces.hpp"
#include "saltus/catalog.hpp"
#include "saltus/conjugacy.hpp"
#include "saltus/density.hpp"
#include "saltus/maps.hpp"
#include "saltus/response.hpp"
#include "saltus/transfer.hpp"

using namespace saltus;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Smooth fn(const char* name, std::vector<double> params = {}) { return catalog_function(name, params); }

// ---- 1 -----------------------------------------------------------------------
Verdict tent_srb() {
  const auto f = tent_map();
  const auto rho = srb_density(f, 4096);
  double dev = 0.0;
  for (double v : rho.raw.density.values()) dev = std::max(dev, std::fabs(v - 0.5));
  const auto recon = rho.reconstruction();
  for (double v : recon.values()) dev = std::max(dev, std::fabs(v - 0.5));
  const double s1 = rho.s1();
  const double c1 = rho.jumps.empty() ? NAN : rho.jumps.front().location;
  double merged = NAN;
  for (const auto& j : rho.merged_jumps) {
    if (j.location == -1.0) merged = j.amplitude;
  }
  double decay = 0.0;
  for (std::size_t k = 0; k < rho.jumps.size(); ++k) {
    const double expected = s1 / rho.orbit.derivative_products[k];
    decay = std::max(decay, std::fabs(rho.jumps[k].amplitude - expected));
  }
  const bool pass = dev <= 1e-6 && std::fabs(s1 + 0.5) <= 1e-4 && c1 == 1.0 &&
                    std::fabs(merged - 0.5) <= 1e-4 && decay <= 1e-12;
  return {pass, fmt("node dev %.2e, s1 %.12f at c1 %.3f, merged %.12f at -1, decay err %.1e, K %d",
                    dev, s1, c1, merged, decay, rho.truncation_K)};
}

// ---- 2 -----------------------------------------------------------------------
Verdict conjugation_ground_truth() {
  const auto g = fn("bump", {0.25});
  const auto fam = MapFamily::additive(tent_map(), g, 0.05);
  const auto psi = fn("monomial", {1});
  const auto rep = response_formula(fam, psi, 4096, 1e-12, g);
  const auto fd = response_finite_difference(fam, psi, 4096, {0.02, 0.01, 0.005});
  const double exact = 1.0 / 6.0;
  const double e1 = std::fabs(rep.formula_value - fd.value);
  const double e2 = std::fabs(rep.formula_value - exact);
  const double e3 = std::fabs(fd.value - exact);
  const double gt = rep.ground_truth.value_or(NAN);
  const bool pass = std::max({e1, e2, e3}) <= 3e-3 && std::fabs(gt - exact) <= 3e-3;
  return {pass, fmt("formula %.10f, fd %.10f, 1/6; pairwise %.1e %.1e %.1e; identity %.10f",
                    rep.formula_value, fd.value, e1, e2, e3, gt)};
}

// ---- 3 -----------------------------------------------------------------------
Verdict tce_dual_solver() {
  struct Case {
    PiecewiseExpandingMap map;
    RealFn alpha;
  };
  const std::vector<Case> cases{
      {tent_map(), [](double x) { return 0.2 * x * (1 - x * x); }},
      {skew_tent_map(1.9), [](double x) { return 0.3 * std::sin(M_PI * x); }},
      {skew_tent_map(1.7), [](double x) { return 0.25 * x * std::exp(x); }},
      {bumped_tent_map(1.8, 0.2), [](double x) { return 0.1 * x + 0.05 * x * x; }},
      {bumped_tent_map(1.9, 0.1), [](double x) { return 0.2 * std::sin(2 * x) * std::cos(x); }},
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto& f = c.map;
    const RealFn alpha = c.alpha;
    const RealFn v = [f, alpha](double x) { return alpha(f(x)) - f.derivative(x) * alpha(x); };
    const auto defect = horizontality_defect(f, v, DefectConvention::TceConsistency);
    const auto series = solve_tce_series(f, v, 1024, 1e-12);
    const auto pull = solve_tce_pullback(f, v, pullback_initial_guess(f, v, 1024), 60);
    double diff = 0.0;
    for (std::size_t i = 0; i < series.alpha.size(); ++i) {
      diff = std::max(diff, std::fabs(series.alpha[i] - pull.alpha[i]));
    }
    const double bound = series.truncation_error_bound + pull.truncation_error_bound;
    bool ok = diff <= bound && std::fabs(defect.value) <= 1e-8;
    for (const auto* s : {&series, &pull}) {
      const double allowance =
          s->truncation_error_bound * (1.0 + f.derivative_sup()) + 10.0 * s->interpolation_error;
      ok = ok && s->residual <= allowance + 1e-12;
    }
    pass = pass && ok;
    detail += fmt("%s diff %.1e/bound %.1e; ", f.name().c_str(), diff, bound);
  }
  return {pass, detail};
}

// ---- 4 -----------------------------------------------------------------------
Verdict pressure_identity() {
  const auto fam = MapFamily::conjugation(tent_map(), fn("bump", {0.25}), zero_function(), 0.05);
  double worst = 0.0;
  std::string detail;
  for (int k : {1, 2}) {
    for (double t : {0.0, 0.05}) {
      const auto rep = pressure_derivative(fam, fn("monomial", {double(k)}), t, {1e-3}, 4096);
      const double d = std::fabs(rep.derivative - rep.integral_conjugation);
      worst = std::max(worst, d);
      detail += fmt("x^%d t=%.2f: %.1e; ", k, t, d);
    }
  }
  return {worst <= 1e-4, detail};
}

// ---- 5 -----------------------------------------------------------------------
Verdict varp_exactness() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(1, 12);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = n(rng);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double dp = var_p(v, p), bf = var_p_bruteforce(v, p);
      worst = std::max(worst, std::fabs(dp - bf) / std::max(1.0, bf));
    }
  }
  return {worst <= 1e-12, fmt("max relative difference %.1e over 2000 cases", worst)};
}

// ---- 6 -----------------------------------------------------------------------
Verdict algebra_property() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pieces(1, 8);
  auto random_pl = [&] {
    const int k = pieces(rng);
    std::vector<double> xs{-1.0}, ys{u(rng)};
    for (int i = 1; i < k; ++i) xs.push_back(u(rng));
    xs.push_back(1.0);
    std::sort(xs.begin(), xs.end());
    for (int i = 1; i <= k; ++i) ys.push_back(u(rng));
    return GridFunction::sample(512, [&](double x) {
      std::size_t j = 0;
      while (j + 2 < xs.size() && x > xs[j + 1]) ++j;
      const double w = xs[j + 1] > xs[j] ? (x - xs[j]) / (xs[j + 1] - xs[j]) : 0.0;
      return (1 - w) * ys[j] + w * ys[j + 1];
    });
  };
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_pl(), b = random_pl();
    const auto ab = pointwise_product(a, b);
    for (double p : {1.0, 1.5, 2.0}) {
      worst = std::max(worst, bvp_norm(ab, p) / (2.0 * bvp_norm(a, p) * bvp_norm(b, p)));
    }
  }
  return {worst <= 1.0, fmt("max ratio |ab| / (2|a||b|) = %.4f over 600 cases", worst)};
}

// ---- 7 -----------------------------------------------------------------------
Verdict ccclaim_identity() {
  const auto fam = MapFamily::additive(tent_map(), fn("bump", {0.25}), 0.05);
  const auto r1 = ccclaim_check(fam, 2048);
  const auto r2 = ccclaim_check(fam, 4096);
  // Exact identity on a piecewise-linear full-branch map: residuals sit at
  // rounding level and an order cannot be read off.
  const double floor = 1e-12 * std::max(1.0, r2.scale);
  const bool exact = r1.residual <= floor && r2.residual <= floor;
  const double order = exact ? INFINITY : std::log2(r1.residual / r2.residual);
  const bool pass = (exact || order >= 1.0) && r2.residual <= 20.0 / 4096;

  // Diagnostic on a smooth nonlinear base; not part of the verdict.
  const auto nl = MapFamily::additive(bumped_tent_map(1.8, 0.2), fn("bump", {0.25}), 0.05);
  const auto n1 = ccclaim_check(nl, 2048), n2 = ccclaim_check(nl, 4096);
  return {pass, fmt("tent: residual %.1e (M=2048), %.1e (M=4096), %s; "
                    "bumped 1.8/0.2 (info): %.2e -> %.2e, order %.2f",
                    r1.residual, r2.residual,
                    exact ? "exact to rounding" : fmt("order %.2f", order).c_str(), n1.residual,
                    n2.residual, std::log2(n1.residual / n2.residual))};
}

// ---- 8 -----------------------------------------------------------------------
Verdict holder_boundedness() {
  const auto g = fn("odd_cubic", {0.25});
  const std::vector<MapFamily> families{
      MapFamily::additive(tent_map(), fn("bump", {0.25}), 0.05),
      MapFamily::additive(skew_tent_map(1.9), companion_direction(1.9, g), 0.05),
  };
  bool pass = true;
  std::string detail;
  for (const auto& fam : families) {
    const RealFn v = [&fam](double x) { return fam.direction(x); };
    for (double beta : {0.5, 0.9}) {
      double lo = INFINITY, hi = 0.0;
      for (std::size_t M : {512u, 1024u, 2048u, 4096u, 8192u}) {
        const double h = holder_norm(solve_tce_series(fam.base(), v, M, 1e-12).alpha, beta).constant;
        lo = std::min(lo, h);
        hi = std::max(hi, h);
      }
      pass = pass && hi < 2.0 * lo;
      detail += fmt("%s b=%.1f [%.4f, %.4f]; ", fam.base().name().c_str(), beta, lo, hi);
    }
  }
  return {pass, detail};
}

// ---- 9 -----------------------------------------------------------------------
Verdict kl_exponent() {
  const auto g = fn("odd_cubic", {0.25});
  const auto base = skew_tent_map(1.9);
  const auto add = MapFamily::additive(base, companion_direction(1.9, g), 0.05);
  const auto conj = MapFamily::conjugation(base, g, zero_function(), 0.05);
  const auto rep = tangent_pair_distance(add, conj, {0.04, 0.02, 0.01, 0.005}, 4096);
  std::string d;
  for (double x : rep.distances) d += fmt("%.2e ", x);
  return {rep.exponent >= 1.5, fmt("exponent %.4f; distances %s", rep.exponent, d.c_str())};
}

// ---- 10 ----------------------------------------------------------------------
Verdict birkhoff_consistency() {
  bool pass = true;
  std::string detail;
  for (const auto& f : {tent_map(), skew_tent_map(1.9)}) {
    const auto rho = srb_density(f, 4096);
    for (int k : {1, 2}) {
      const RealFn psi = [k](double x) { return std::pow(x, k); };
      const double density = rho.integrate(psi);
      const auto b = birkhoff_average(f, psi, 200, 100000, 1000, 7);
      const double z = (b.mean - density) / b.standard_error;
      pass = pass && std::fabs(z) <= 3.0;
      detail += fmt("%s x^%d: %.6f vs %.6f z=%.2f; ", f.name().c_str(), k, density, b.mean, z);
    }
  }
  return {pass, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "tent SRB density and decomposition", 10, tent_srb},
      {2, "conjugation ground truth 1/6", 60, conjugation_ground_truth},
      {3, "TCE series vs pull-back", 30, tce_dual_solver},
      {4, "pressure identity", 60, pressure_identity},
      {5, "var_p dynamic programme vs exhaustive", 10, varp_exactness},
      {6, "BV_p algebra inequality", 5, algebra_property},
      {7, "internal identity residual order", 120, ccclaim_identity},
      {8, "Holder constant under refinement", 60, holder_boundedness},
      {9, "tangent pair L1 exponent", 120, kl_exponent},
      {10, "Birkhoff vs density", 60, birkhoff_consistency},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = v.pass && in_time;
    failures += !pass;
    std::printf("criterion %2d %s: %s [%.2f s / %.0f s%s] %s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", secs, c.budget_s, in_time ? "" : " OVER BUDGET",
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
