#include "saltus/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "saltus/errors.hpp"
#include "saltus/simd.hpp"

namespace saltus {
namespace {

double sampled_sup(const RealFn& v, std::size_t n = 4096) {
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) s = std::max(s, std::fabs(v(GridFunction::node(i, n))));
  return s;
}

}  // namespace

SeriesTerms series_terms(const PiecewiseExpandingMap& map, double sup_v, double tol, int cap) {
  if (!(tol > 0.0)) throw DomainError("series: tol must be positive");
  if (sup_v == 0.0) return {0, 0.0};
  const double lambda = map.contraction();
  const double target = tol * (1.0 - lambda) / sup_v;
  int n = target >= 1.0 ? 0 : static_cast<int>(std::ceil(std::log(target) / std::log(lambda)));
  n = std::clamp(n, 0, cap);
  return {n, sup_v * std::pow(lambda, n) / (1.0 - lambda)};
}

double tce_series_value(const PiecewiseExpandingMap& map, const RealFn& v, double x, int terms,
                        double period_tol) {
  if (x == 0.0) return 0.0;
  double y = x, d = 1.0, s = 0.0;
  for (int i = 0; i < terms; ++i) {
    if (i > 0 && std::fabs(y) <= period_tol) break;
    d *= map.derivative(y, side_of(y));
    s += v(y) / d;
    y = map(y);
  }
  return -s;
}

DefectReport horizontality_defect(const PiecewiseExpandingMap& map, const RealFn& v,
                                  DefectConvention convention, double period_tol) {
  const double sup_v = sampled_sup(v);
  const double lambda = map.contraction();
  // Smallest K with tail < 1e-12, accepted up to 200 terms if the tail is < 1e-10.
  int K = 1;
  double tail = sup_v / (1.0 - lambda);
  while (tail >= 1e-12 && K < 200) {
    ++K;
    tail *= lambda;
  }
  if (tail >= 1e-10) {
    throw NumericalError("horizontality_defect: tail bound not below 1e-10 within 200 terms");
  }
  const CriticalOrbit orbit = critical_orbit(map, K, period_tol);
  int terms = K;
  double bar = tail;
  if (orbit.period) {
    terms = *orbit.period;
    bar = 0.0;
  }
  DefectReport out;
  out.terms = terms;
  out.error_bar = bar;
  if (convention == DefectConvention::Printed) {
    double J = v(0.0);
    for (int j = 1; j < terms; ++j) J += v(orbit.points[j - 1]) / orbit.derivative_products[j];
    out.value = J;
  } else {
    out.value = tce_series_value(map, v, orbit.points[0], terms, period_tol) - v(0.0);
  }
  return out;
}

double tce_residual(const PiecewiseExpandingMap& map, const RealFn& v,
                    const GridFunction& alpha) {
  double r = 0.0;
  const std::size_t M = alpha.intervals();
  for (std::size_t i = 0; i <= M; ++i) {
    if (i == alpha.center()) continue;
    const double x = alpha.node(i);
    r = std::max(r, std::fabs(v(x) - alpha(map(x)) + map.derivative(x) * alpha[i]));
  }
  return r;
}

TCESolution solve_tce_series(const PiecewiseExpandingMap& map, const RealFn& v,
                             std::size_t grid_size, double tol, double period_tol) {
  if (grid_size < 2 || grid_size % 2) throw DomainError("grid_size must be even");
  const SeriesTerms st = series_terms(map, sampled_sup(v), tol);
  auto values = std::vector<double>(grid_size + 1);
  for (std::size_t i = 0; i <= grid_size; ++i) {
    values[i] = tce_series_value(map, v, GridFunction::node(i, grid_size), st.terms, period_tol);
  }
  values[grid_size / 2] = 0.0;
  TCESolution sol;
  sol.alpha = GridFunction(std::move(values));
  sol.truncation_error_bound = st.tail_bound;
  sol.method = TceMethod::Series;
  sol.iterations_or_terms = st.terms;
  sol.residual = tce_residual(map, v, sol.alpha);
  sol.interpolation_error = interpolation_error_estimate(sol.alpha);
  sol.evaluator = [map, v, n = st.terms, period_tol](double x) {
    return tce_series_value(map, v, x, n, period_tol);
  };
  return sol;
}

GridFunction pullback_initial_guess(const PiecewiseExpandingMap& map, const RealFn& v,
                                    std::size_t grid_size, int orbit_points) {
  std::map<double, double> knots{{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
  auto near_knot = [&](double x) {
    auto it = knots.lower_bound(x - 1e-9);
    return it != knots.end() && std::fabs(it->first - x) <= 1e-9;
  };
  double c = map.critical_value();
  double a = v(0.0);
  const double bound = 10.0 * sampled_sup(v) + 1.0;
  for (int k = 0; k < orbit_points; ++k) {
    if (near_knot(c) || std::fabs(a) > bound) break;
    knots.emplace(c, a);
    a = v(c) + map.derivative(c, side_of(c)) * a;
    c = map(c);
  }
  std::vector<double> kx, ky;
  for (auto [x, y] : knots) {
    kx.push_back(x);
    ky.push_back(y);
  }
  return GridFunction::sample(grid_size, [&](double x) {
    auto it = std::upper_bound(kx.begin(), kx.end(), x);
    if (it == kx.begin()) return ky.front();
    if (it == kx.end()) return ky.back();
    const std::size_t j = static_cast<std::size_t>(it - kx.begin());
    const double th = (x - kx[j - 1]) / (kx[j] - kx[j - 1]);
    return ky[j - 1] + th * (ky[j] - ky[j - 1]);
  });
}

TCESolution solve_tce_pullback(const PiecewiseExpandingMap& map, const RealFn& v,
                               const GridFunction& alpha0, int n_iter) {
  if (n_iter < 1) throw DomainError("solve_tce_pullback: n_iter must be >= 1");
  const std::size_t M = alpha0.intervals();
  const std::size_t n = M + 1;
  std::vector<double> vx(n), fx(n), dfx(n);
  std::vector<CellLocation> loc(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = GridFunction::node(i, M);
    vx[i] = v(x);
    fx[i] = map(x);
    dfx[i] = map.derivative(x);
    loc[i] = locate(fx[i], M);
  }
  const double sup_v = simd::max_abs(vx);
  const double lambda = map.contraction();
  std::vector<double> cur(alpha0.values().begin(), alpha0.values().end()), next(n);
  std::vector<double> sum(n, 0.0);
  double last_step = 0.0;
  for (int it = 0; it < n_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto [j, th] = loc[i];
      const double af = cur[j] + th * (cur[j + 1] - cur[j]);
      next[i] = (af - vx[i]) / dfx[i];
    }
    next[M / 2] = 0.0;
    last_step = simd::max_abs_diff(next, cur);
    cur.swap(next);
    simd::axpy(1.0, cur, sum);
    if (simd::max_abs(cur) > 1e6 * std::max(sup_v, 1e-300)) {
      throw NumericalError("solve_tce_pullback: iterates diverge (v not horizontal?)");
    }
  }
  for (double& s : sum) s /= n_iter;
  TCESolution sol;
  sol.alpha = GridFunction(std::move(cur));
  sol.method = TceMethod::PullBack;
  sol.iterations_or_terms = n_iter;
  sol.cesaro = GridFunction(std::move(sum));
  sol.interpolation_error = interpolation_error_estimate(sol.alpha);
  const double k = lambda / (1.0 - lambda);
  sol.truncation_error_bound = k * last_step + k * sol.interpolation_error;
  sol.residual = tce_residual(map, v, sol.alpha);
  return sol;
}

TCESolution solve_tce_second_order(const MapFamily& family, const TCESolution& alpha,
                                   std::size_t grid_size, double tol) {
  const auto& f = family.base();
  auto a = std::make_shared<TCESolution>(alpha);
  RealFn w = [f, family, a](double x) {
    const Side s = side_of(x);
    const double al = a->at(x);
    return f.derivative(x, s, 2) * al * al + 2.0 * family.direction_derivative(x, s) * al +
           family.second_t_derivative(x, s);
  };
  return solve_tce_series(f, w, grid_size, tol);
}

}  // namespace saltus
