#include "saltus/density.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "saltus/errors.hpp"
#include "saltus/simd.hpp"

namespace saltus {

double heaviside(double u, double x) {
  if (x < u) return -1.0;
  if (x > u) return 0.0;
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return -1.0;
  return -0.5;
}

double heaviside_limit(double u, double x, Side side) {
  if (side == Side::Left) return u >= x ? -1.0 : 0.0;
  return u > x ? -1.0 : 0.0;
}

double integrate_interval(const std::function<double(double)>& psi, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(psi, a, b, 15, 1e-14);
}

double DensityDecomposition::saltus(double x) const {
  double s = 0.0;
  for (const Jump& j : merged_jumps) s += j.amplitude * heaviside(j.location, x);
  return s;
}

GridFunction DensityDecomposition::reconstruction() const {
  const std::size_t M = grid_size();
  std::vector<double> v(M + 1);
  for (std::size_t i = 0; i <= M; ++i) v[i] = regular[i] + saltus(GridFunction::node(i, M));
  return GridFunction(std::move(v));
}

double DensityDecomposition::integral() const {
  double s = regular.integral();
  for (const Jump& j : merged_jumps) s -= j.amplitude * (j.location + 1.0);
  return s;
}

double DensityDecomposition::integrate(const std::function<double(double)>& psi) const {
  const std::size_t M = grid_size();
  std::vector<double> v(M + 1);
  for (std::size_t i = 0; i <= M; ++i) v[i] = psi(GridFunction::node(i, M)) * regular[i];
  double s = GridFunction(std::move(v)).integral();
  for (const Jump& j : merged_jumps) s -= j.amplitude * integrate_interval(psi, -1.0, j.location);
  return s;
}

namespace {

struct SideFit {
  double value = 0.0;
  double rms = 0.0;
  int count = 0;
};

// Least squares y ~ a + b (x - x0) [+ s z], value a. The z column (the
// propagated jumps of other orbit points) is used only when it varies.
SideFit window_fit(std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> zs, double x0) {
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  SideFit out;
  out.count = static_cast<int>(n);
  if (n == 0) return out;
  const auto [zlo, zhi] = std::minmax_element(zs.begin(), zs.end());
  const bool with_z = *zhi - *zlo > 0.0 && n > 3;
  Eigen::MatrixXd A(n, with_z ? 3 : 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i] - x0;
    if (with_z) A(i, 2) = zs[i];
    y(i) = ys[i];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
  out.value = coef(0);
  out.rms = std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(n));
  return out;
}

class JumpFitter {
 public:
  JumpFitter(const GridFunction& raw, std::vector<double> avoid, std::function<double(double)> rest)
      : raw_(raw), avoid_(std::move(avoid)), rest_(std::move(rest)), M_(raw.intervals()),
        h_(raw.spacing()) {}

  bool clear(std::size_t i) const {
    const double x = raw_.node(i);
    return std::none_of(avoid_.begin(), avoid_.end(),
                        [&](double c) { return std::fabs(x - c) <= 2.5 * h_; });
  }

  // 8 nodes on one side of u, skipping the 2 nearest.
  SideFit fit(double u, int dir) const {
    std::vector<double> xs, ys, zs;
    long i;
    if (dir < 0) {
      i = static_cast<long>(std::ceil((u + 1.0) / h_)) - 1;
      while (i >= 0 && raw_.node(i) >= u) --i;
    } else {
      i = static_cast<long>(std::floor((u + 1.0) / h_)) + 1;
      while (i <= static_cast<long>(M_) && raw_.node(i) <= u) ++i;
    }
    i += 2 * dir;
    for (int scanned = 0; scanned < 40 && xs.size() < 8; ++scanned, i += dir) {
      if (i < 0 || i > static_cast<long>(M_)) break;
      if (!clear(static_cast<std::size_t>(i))) continue;
      xs.push_back(raw_.node(i));
      ys.push_back(raw_[i]);
      zs.push_back(rest_(raw_.node(i)));
    }
    return window_fit(xs, ys, zs, u);
  }

  double median_interior_rms() const {
    std::vector<double> rms;
    for (std::size_t s = 0; s + 8 <= M_ + 1; s += 8) {
      bool ok = true;
      for (std::size_t i = s; i < s + 8 && ok; ++i) ok = clear(i);
      if (!ok) continue;
      std::vector<double> xs, ys, zs(8, 0.0);
      for (std::size_t i = s; i < s + 8; ++i) {
        xs.push_back(raw_.node(i));
        ys.push_back(raw_[i]);
      }
      rms.push_back(window_fit(xs, ys, zs, xs.front()).rms);
    }
    if (rms.empty()) return 0.0;
    std::nth_element(rms.begin(), rms.begin() + rms.size() / 2, rms.end());
    return rms[rms.size() / 2];
  }

 private:
  const GridFunction& raw_;
  std::vector<double> avoid_;
  std::function<double(double)> rest_;
  std::size_t M_;
  double h_;
};

std::vector<Jump> merge_jumps(const std::vector<Jump>& jumps, double period_tol) {
  std::vector<Jump> sorted = jumps;
  std::sort(sorted.begin(), sorted.end(),
            [](const Jump& a, const Jump& b) { return a.location < b.location; });
  std::vector<Jump> out;
  for (const Jump& j : sorted) {
    if (!out.empty() && std::fabs(j.location - out.back().location) <= period_tol) {
      out.back().amplitude += j.amplitude;
      out.back().index = 0;
    } else {
      out.push_back(j);
    }
  }
  return out;
}

GridFunction derivative_estimate(const GridFunction& r, double& left, double& right) {
  const std::size_t M = r.intervals();
  const std::size_t c = r.center();
  const double h = r.spacing();
  std::vector<double> d(M + 1);
  auto back = [&](std::size_t i) {
    return (11.0 * r[i] - 18.0 * r[i - 1] + 9.0 * r[i - 2] - 2.0 * r[i - 3]) / (6.0 * h);
  };
  auto fwd = [&](std::size_t i) {
    return (-11.0 * r[i] + 18.0 * r[i + 1] - 9.0 * r[i + 2] + 2.0 * r[i + 3]) / (6.0 * h);
  };
  for (std::size_t i = 1; i < M; ++i) d[i] = (r[i + 1] - r[i - 1]) / (2.0 * h);
  d[0] = fwd(0);
  d[M] = back(M);
  left = back(c);
  right = fwd(c);
  d[c] = left;
  return GridFunction(std::move(d), Interpolation::PiecewiseLinear, {c});
}

}  // namespace

DensityDecomposition srb_density(const PiecewiseExpandingMap& map, std::size_t grid_size,
                                 double tol, double period_tol) {
  if (!(tol > 0.0)) throw DomainError("srb_density: tol must be positive");
  const TransferOperator op = build_operator(map, grid_size);
  DensityDecomposition out;
  out.raw = leading_spectrum(op);
  const GridFunction& raw = out.raw.density;
  const std::size_t M = grid_size, n = M + 1;

  constexpr int kCap = 200;
  out.orbit = critical_orbit(map, kCap, period_tol);
  if (out.orbit.period) {
    throw NumericalError("srb_density: periodic turning point, no saltus decomposition");
  }
  const double c1 = out.orbit.points[0];

  // Unit amplitudes a_k = 1/(f^{k-1})'(c_1), truncated below tol.
  std::vector<double> unit;
  for (int k = 0; k < kCap; ++k) {
    const double a = 1.0 / out.orbit.derivative_products[k];
    unit.push_back(a);
    if (std::fabs(a) < tol) break;
  }
  const std::size_t K = unit.size();
  out.truncation_K = static_cast<int>(K);

  std::vector<double> avoid{0.0};
  for (std::size_t k = 1; k < K; ++k) {
    if (std::fabs(unit[k]) > 1e-6) avoid.push_back(out.orbit.points[k]);
  }
  auto rest = [&](double x) {
    double s = 0.0;
    for (std::size_t k = 1; k < K; ++k) s += unit[k] * heaviside(out.orbit.points[k], x);
    return s;
  };
  const JumpFitter fitter(raw, avoid, rest);
  const SideFit lf = fitter.fit(c1, -1);
  SideFit rf = fitter.fit(c1, +1);
  if (c1 >= 1.0 || rf.count < 3) rf = SideFit{};
  out.s1_fit = rf.value - lf.value;
  out.fit_error = std::max(lf.rms, rf.rms);
  const double interior = fitter.median_interior_rms();
  if (out.fit_error > 10.0 * interior + 1e-3 * raw.sup_norm()) {
    throw NumericalError("srb_density: jump fit across c_1 under-resolved");
  }

  // Unit saltus profile S(x) = sum_k a_k H_{c_k}(x). At a node equal to c_1
  // the left limit matches the operator row, which counts both preimages.
  auto profile = [&](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double u = out.orbit.points[k];
      s += unit[k] * (k == 0 && x == u ? heaviside_limit(u, x, Side::Left) : heaviside(u, x));
    }
    return s;
  };
  auto profile_at_fold = [&](Side side) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += unit[k] * heaviside_limit(out.orbit.points[k], 0.0, side);
    return s;
  };
  std::vector<double> S(n), b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    S[i] = profile(GridFunction::node(i, M));
    for (const NodePreimage& p : op.preimages(i)) {
      const double sp = p.y == 0.0 ? profile_at_fold(p.side) : profile(p.y);
      b[i] += p.weight * sp;
    }
  }
  const double S0l = profile_at_fold(Side::Left), S0r = profile_at_fold(Side::Right);
  const double wl = 1.0 / std::fabs(map.derivative(0.0, Side::Left));
  const double wr = 1.0 / std::fabs(map.derivative(0.0, Side::Right));
  double unit_mass = 0.0;
  for (std::size_t k = 0; k < K; ++k) unit_mass -= unit[k] * (out.orbit.points[k] + 1.0);

  const double h = 2.0 / static_cast<double>(M);
  auto trapz = [&](std::span<const double> v) {
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * h;
  };

  double s1 = out.s1_fit;
  std::vector<double> r(n), total(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = raw[i] - s1 * S[i];
  const std::size_t ci = M / 2;
  constexpr int kMaxRefine = 20000;
  int it = 0;
  for (; it < kMaxRefine; ++it) {
    op.apply(r, total);
    simd::axpy(s1, b, total);
    double s1n = -((r[ci] + s1 * S0l) * wl + (r[ci] + s1 * S0r) * wr);
    for (std::size_t i = 0; i < n; ++i) total[i] -= s1n * S[i];
    const double mass = trapz(total) + s1n * unit_mass;
    for (double& v : total) v /= mass;
    s1n /= mass;
    const double dr = simd::max_abs_diff(total, r);
    const double ds = std::fabs(s1n - s1);
    r.swap(total);
    s1 = s1n;
    if (dr <= 1e-14 * std::max(1.0, simd::max_abs(r)) && ds <= 1e-14 * std::max(1.0, std::fabs(s1))) {
      break;
    }
  }
  if (it == kMaxRefine) throw NumericalError("srb_density: refinement did not converge");
  out.refinement_iterations = it + 1;

  for (std::size_t k = 0; k < K; ++k) {
    out.jumps.push_back({out.orbit.points[k], s1 * unit[k], static_cast<int>(k + 1)});
  }
  const double lambda = map.contraction();
  out.tail_bound = std::fabs(out.jumps.back().amplitude) * lambda / (1.0 - lambda);
  out.merged_jumps = merge_jumps(out.jumps, period_tol);
  out.regular = GridFunction(std::move(r));
  out.regular_derivative = derivative_estimate(out.regular, out.regular_derivative_left,
                                               out.regular_derivative_right);
  return out;
}

SaltusDerivativeReport saltus_derivative(const PiecewiseExpandingMap& map,
                                         const DensityDecomposition& rho) {
  SaltusDerivativeReport out;
  const auto& jumps = rho.jumps;
  if (jumps.empty()) return out;
  bool left = false, right = false;
  for (std::size_t k = 0; k + 1 < jumps.size(); ++k) {
    (jumps[k].location < 0.0 ? left : right) = true;
  }
  out.orbit_visits_both_sides = left && right;

  const double d1l = map.derivative(0.0, Side::Left), d1r = map.derivative(0.0, Side::Right);
  const double d2l = map.derivative(0.0, Side::Left, 2), d2r = map.derivative(0.0, Side::Right, 2);
  double above = 0.0;
  for (const Jump& j : jumps) {
    if (j.location > 0.0) above += j.amplitude;
  }
  const double rho_c = rho.regular[rho.regular.center()] - above;
  double sp = -rho.regular_derivative_left / (d1l * d1l) +
              rho.regular_derivative_right / (d1r * d1r) +
              rho_c * (d2l / (d1l * d1l * d1l) - d2r / (d1r * d1r * d1r));
  out.terms.push_back({jumps[0].location, sp});
  for (std::size_t k = 1; k < jumps.size(); ++k) {
    const double c = jumps[k - 1].location;
    const Side side = side_of(c);
    const double d1 = map.derivative(c, side), d2 = map.derivative(c, side, 2);
    sp = sp / (d1 * d1) - jumps[k - 1].amplitude * d2 / (d1 * d1 * d1);
    out.terms.push_back({jumps[k].location, sp});
  }
  return out;
}

}  // namespace saltus
