#include "saltus/response.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "saltus/errors.hpp"
#include "saltus/simd.hpp"
#include "saltus/transfer.hpp"

namespace saltus {
namespace {

double trapezoid(std::span<const double> v, double h) {
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

double regular_slope(const DensityDecomposition& rho, std::size_t i) {
  if (i == rho.regular.center()) {
    return 0.5 * (rho.regular_derivative_left + rho.regular_derivative_right);
  }
  return rho.regular_derivative[i];
}

double saltus_at_fold(const DensityDecomposition& rho, Side side) {
  double s = 0.0;
  for (const Jump& j : rho.merged_jumps) s += j.amplitude * heaviside_limit(j.location, 0.0, side);
  return s;
}

// X' rho + X rho_reg' at the nodes.
GridFunction source_term(const Smooth& X, const DensityDecomposition& rho) {
  const std::size_t M = rho.grid_size();
  const GridFunction rho0 = rho.reconstruction();
  std::vector<double> w(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    const double x = GridFunction::node(i, M);
    w[i] = X.d1(x) * rho0[i] + X(x) * regular_slope(rho, i);
  }
  return GridFunction(std::move(w));
}

// Integral of the source term: Heaviside parts exactly, the rest by quadrature.
double source_mean(const Smooth& X, const DensityDecomposition& rho) {
  const std::size_t M = rho.grid_size();
  std::vector<double> v(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    const double x = GridFunction::node(i, M);
    v[i] = X.d1(x) * rho.regular[i] + X(x) * regular_slope(rho, i);
  }
  double s = trapezoid(v, rho.regular.spacing());
  for (const Jump& j : rho.merged_jumps) s -= j.amplitude * (X(j.location) - X(-1.0));
  return s;
}

struct FormulaTerms {
  double singular = 0.0;
  double resolvent = 0.0;
  double mean = 0.0;
  double gap = 0.0;
  bool good = true;
  std::optional<double> ground_truth;
};

FormulaTerms formula_terms(const MapFamily& family, const Smooth& psi, std::size_t M, double tol,
                           const std::optional<Smooth>& g) {
  const auto& f = family.base();
  const RealFn v = [&family](double x) { return family.direction(x); };
  const TCESolution alpha = solve_tce_series(f, v, M, tol);
  const DensityDecomposition rho = srb_density(f, M);

  FormulaTerms out;
  out.gap = rho.raw.gap_estimate;
  out.good = good_condition(f, rho.orbit);
  for (const Jump& j : rho.jumps) out.singular -= j.amplitude * alpha.at(j.location) * psi(j.location);

  const Smooth& X = family.X();
  out.mean = source_mean(X, rho);
  if (std::fabs(out.mean) > 1e-6) {
    throw NumericalError("response_formula: source term not mean-zero (" +
                         std::to_string(out.mean) + ")");
  }
  const TransferOperator op = build_operator(f, M);
  const Resolvent R(op, rho.raw);
  const GridFunction u = R.solve(rho.raw.complement(source_term(X, rho)));
  std::vector<double> pu(M + 1);
  for (std::size_t i = 0; i <= M; ++i) pu[i] = psi(GridFunction::node(i, M)) * u[i];
  out.resolvent = -trapezoid(pu, u.spacing());
  if (g) {
    out.ground_truth = rho.integrate([&](double x) { return psi.d1(x) * (*g)(x); });
  }
  return out;
}

// Polynomial extrapolation in delta^2 to 0 (Neville). Returns the estimate
// and the difference to the best estimate one level lower.
std::pair<double, double> extrapolate_squared(const std::vector<double>& deltas,
                                              const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> T = values;
  double previous = values.back();
  for (std::size_t k = 1; k < n; ++k) {
    previous = T[n - k];
    for (std::size_t j = 0; j + k < n; ++j) {
      const double xj = deltas[j] * deltas[j], xk = deltas[j + k] * deltas[j + k];
      T[j] = T[j + 1] + (T[j + 1] - T[j]) * xk / (xj - xk);
    }
  }
  return {T[0], n > 1 ? std::fabs(T[0] - previous) : 0.0};
}

void check_deltas(const std::vector<double>& deltas, const char* who) {
  if (deltas.empty()) throw DomainError(std::string(who) + ": no deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw DomainError(std::string(who) + ": deltas must be positive");
    if (i && !(deltas[i] < deltas[i - 1])) {
      throw DomainError(std::string(who) + ": deltas must be strictly descending");
    }
  }
}

}  // namespace

ResponseReport response_formula(const MapFamily& family, const Smooth& psi, std::size_t grid_size,
                                double tol, const std::optional<Smooth>& ground_truth_g) {
  if (family.kind() != FamilyKind::Additive) {
    throw ValidationError("response_formula: needs an additive family");
  }
  if (grid_size % 4) throw DomainError("response_formula: grid_size must be divisible by 4");
  const RealFn v = [&family](double x) { return family.direction(x); };
  ResponseReport rep;
  rep.grid_size = grid_size;
  rep.defect = horizontality_defect(family.base(), v, DefectConvention::TceConsistency).value;
  if (std::fabs(rep.defect) > 1e-8) {
    throw HorizontalityError("response_formula: direction is not horizontal (defect " +
                             std::to_string(rep.defect) + ")");
  }
  const FormulaTerms fine = formula_terms(family, psi, grid_size, tol, ground_truth_g);
  const FormulaTerms coarse = formula_terms(family, psi, grid_size / 2, tol, std::nullopt);
  rep.singular_term = fine.singular;
  rep.resolvent_term = fine.resolvent;
  rep.formula_value = fine.singular + fine.resolvent;
  rep.formula_error = std::fabs(rep.formula_value - (coarse.singular + coarse.resolvent));
  rep.mean_check = fine.mean;
  rep.gap_estimate = fine.gap;
  rep.good = fine.good;
  rep.mixing = fine.gap < 0.95;
  rep.ground_truth = fine.ground_truth;
  return rep;
}

FiniteDifferenceReport response_finite_difference(const MapFamily& family, const Smooth& psi,
                                                  std::size_t grid_size,
                                                  const std::vector<double>& deltas) {
  check_deltas(deltas, "response_finite_difference");
  const RealFn p = [&psi](double x) { return psi(x); };
  auto R = [&](double t, std::size_t M) { return srb_density(family_map(family, t), M).integrate(p); };
  FiniteDifferenceReport rep;
  rep.deltas = deltas;
  for (double d : deltas) {
    rep.plus.push_back(R(d, grid_size));
    rep.minus.push_back(R(-d, grid_size));
    rep.central.push_back((rep.plus.back() - rep.minus.back()) / (2.0 * d));
  }
  const auto [value, spread] = extrapolate_squared(deltas, rep.central);
  rep.value = value;
  rep.extrapolation_spread = spread;
  const double dmin = deltas.back();
  const double coarse = (R(dmin, grid_size / 2) - R(-dmin, grid_size / 2)) / (2.0 * dmin);
  rep.discretization_error = std::fabs(rep.central.back() - coarse);
  rep.error_bar = spread + rep.discretization_error;

  rep.base_value = R(0.0, grid_size);
  if (deltas.size() >= 3) {
    const double den = rep.central[1] - rep.central[2];
    if (den != 0.0) {
      rep.convergence_ratio = (rep.central[0] - rep.central[1]) / den;
      rep.non_differentiable = *rep.convergence_ratio < 2.0;
    }
  }
  std::vector<double> dev(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    dev[i] = 0.5 * (std::fabs(rep.plus[i] - rep.base_value) +
                    std::fabs(rep.minus[i] - rep.base_value));
  }
  const ModulusFit fit = modulus_fit(deltas, dev);
  rep.modulus_log_coefficient = fit.log_coefficient;
  rep.modulus_linear_coefficient = fit.linear_coefficient;
  return rep;
}

ModulusFit modulus_fit(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw DomainError("modulus_fit: size mismatch");
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double a = t[i] * std::log(1.0 / t[i]), b = t[i];
    s11 += a * a;
    s12 += a * b;
    s22 += b * b;
    r1 += a * y[i];
    r2 += b * y[i];
  }
  ModulusFit fit;
  const double det = s11 * s22 - s12 * s12;
  if (t.size() >= 2 && det != 0.0) {
    fit.log_coefficient = (r1 * s22 - r2 * s12) / det;
    fit.linear_coefficient = (s11 * r2 - s12 * r1) / det;
  } else if (s22 > 0.0) {
    fit.linear_coefficient = r2 / s22;
  }
  return fit;
}

PressureReport pressure_derivative(const MapFamily& family, const Smooth& psi, double t,
                                   const std::vector<double>& s_deltas, std::size_t grid_size) {
  if (family.kind() != FamilyKind::Conjugation) {
    throw ValidationError("pressure_derivative: needs a conjugation family");
  }
  check_deltas(s_deltas, "pressure_derivative");
  PressureReport rep;
  std::vector<double> central;
  for (double d : s_deltas) {
    const double lp = leading_spectrum(weighted_operator(family, d, t, psi, grid_size)).leading_eigenvalue;
    const double lm = leading_spectrum(weighted_operator(family, -d, t, psi, grid_size)).leading_eigenvalue;
    rep.s_values.insert(rep.s_values.end(), {d, -d});
    rep.lambdas.insert(rep.lambdas.end(), {lp, lm});
    central.push_back((std::log(lp) - std::log(lm)) / (2.0 * d));
  }
  const auto [value, spread] = extrapolate_squared(s_deltas, central);
  rep.derivative = value;
  rep.error_bar = spread;

  const SpectralData sd = leading_spectrum(weighted_operator(family, 0.0, t, psi, grid_size));
  const std::size_t n = grid_size + 1;
  std::vector<double> prho(n);
  for (std::size_t i = 0; i < n; ++i) {
    prho[i] = psi(family.h(t, GridFunction::node(i, grid_size))) * sd.density[i];
  }
  rep.integral_weighted = sd.pairing(prho);
  rep.integral_conjugation = srb_density(family.base(), grid_size).integrate([&](double x) {
    return psi(family.h(t, x));
  });
  return rep;
}

CcclaimReport ccclaim_check(const MapFamily& family, std::size_t grid_size) {
  if (family.kind() != FamilyKind::Additive) {
    throw ValidationError("ccclaim_check: needs an additive family");
  }
  const auto& f = family.base();
  const std::size_t M = grid_size;
  const RealFn v = [&family](double x) { return family.direction(x); };
  const TCESolution alpha = solve_tce_series(f, v, M, 1e-13);
  const DensityDecomposition rho = srb_density(f, M);
  const TransferOperator op = build_operator(f, M);
  const Resolvent R(op, rho.raw);
  const TransferOperator D = derivative_operator(family, alpha, M);

  // M rho: regular part through the stencils, saltus part exactly at the preimages.
  std::vector<double> mrho(M + 1);
  D.apply(rho.regular.values(), mrho);
  const double fold_l = saltus_at_fold(rho, Side::Left), fold_r = saltus_at_fold(rho, Side::Right);
  for (std::size_t i = 0; i <= M; ++i) {
    for (const NodePreimage& p : D.preimages(i)) {
      const double s = p.y != 0.0 ? rho.saltus(p.y) : (p.side == Side::Left ? fold_l : fold_r);
      mrho[i] += p.weight * s;
    }
  }
  const GridFunction lhs_res = R.solve(rho.raw.complement(GridFunction(std::move(mrho))));
  const GridFunction rhs_res = R.solve(rho.raw.complement(source_term(family.X(), rho)));

  CcclaimReport rep;
  std::vector<double> lhs(M + 1), rhs(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    lhs[i] = -alpha.alpha[i] * regular_slope(rho, i) + lhs_res[i];
    rhs[i] = -rhs_res[i];
  }
  const double h = rho.regular.spacing();
  rep.lhs_mean = trapezoid(lhs, h);
  const GridFunction rho0 = rho.reconstruction();
  std::vector<double> projected(lhs);
  simd::axpy(-rep.lhs_mean, rho0.values(), projected);
  for (std::size_t i = 0; i <= M; ++i) {
    const double x = GridFunction::node(i, M);
    const bool near = std::any_of(rho.merged_jumps.begin(), rho.merged_jumps.end(), [&](const Jump& j) {
      return std::fabs(j.amplitude) > 1e-10 && std::fabs(x - j.location) <= 3.0 * h;
    });
    if (near) {
      ++rep.excluded_nodes;
      continue;
    }
    rep.residual = std::max(rep.residual, std::fabs(projected[i] - rhs[i]));
    rep.literal_residual = std::max(rep.literal_residual, std::fabs(lhs[i] - rhs[i]));
    rep.scale = std::max(rep.scale, std::fabs(rhs[i]));
  }
  rep.lhs = GridFunction(std::move(lhs));
  rep.rhs = GridFunction(std::move(rhs));
  return rep;
}

Smooth companion_direction(double a, const Smooth& g) {
  if (!(a > 1.0)) throw DomainError("companion_direction: slope must exceed 1");
  auto xr = [a](double y) { return (a - 1.0 - y) / a; };
  Smooth X;
  X.name = "companion(" + g.name + ")";
  X.f = [=](double y) { return g(y) + a * g(xr(y)); };
  X.d1 = [=](double y) { return g.d1(y) - g.d1(xr(y)); };
  X.d2 = [=](double y) { return g.d2(y) + g.d2(xr(y)) / a; };
  X.d3 = [=](double y) { return g.d3(y) - g.d3(xr(y)) / (a * a); };
  return X;
}

double l1_distance(const DensityDecomposition& a, const DensityDecomposition& b) {
  const std::size_t M = a.grid_size();
  if (b.grid_size() != M) throw DomainError("l1_distance: grid sizes differ");
  std::vector<double> pts;
  for (std::size_t i = 0; i <= M; ++i) pts.push_back(GridFunction::node(i, M));
  for (const auto* d : {&a, &b}) {
    for (const Jump& j : d->merged_jumps) {
      if (j.location > -1.0 && j.location < 1.0) pts.push_back(j.location);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double p = pts[k], q = pts[k + 1], L = q - p;
    if (L <= 0.0) continue;
    const double m = 0.5 * (p + q);
    const double s = a.saltus(m) - b.saltus(m);
    const double d0 = a.regular(p) - b.regular(p) + s;
    const double d1 = a.regular(q) - b.regular(q) + s;
    if ((d0 >= 0.0) == (d1 >= 0.0)) {
      total += 0.5 * (std::fabs(d0) + std::fabs(d1)) * L;
    } else {
      total += 0.5 * (d0 * d0 + d1 * d1) / (std::fabs(d0) + std::fabs(d1)) * L;
    }
  }
  return total;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("log_log_slope: need >= 2 points");
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("log_log_slope: nonpositive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

TangentPairReport tangent_pair_distance(const MapFamily& additive, const MapFamily& conjugation,
                                        const std::vector<double>& t_values,
                                        std::size_t grid_size) {
  TangentPairReport rep;
  rep.t_values = t_values;
  for (double t : t_values) {
    const DensityDecomposition a = srb_density(family_map(additive, t), grid_size);
    const DensityDecomposition b = srb_density(family_map(conjugation, t), grid_size);
    rep.distances.push_back(l1_distance(a, b));
  }
  rep.exponent = log_log_slope(rep.t_values, rep.distances);
  return rep;
}

}  // namespace saltus
