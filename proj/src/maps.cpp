#include "saltus/maps.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <utility>

#include "saltus/errors.hpp"

namespace saltus {
namespace {

constexpr double kBoundaryTol = 1e-12;

// Root of u(y) = target on [lo, hi] for a strictly monotone u with derivative du.
double monotone_root(const RealFn& u, const RealFn& du, double target, double lo, double hi,
                     double guess) {
  const double ulo = u(lo) - target;
  const double uhi = u(hi) - target;
  if (ulo == 0.0) return lo;
  if (uhi == 0.0) return hi;
  std::uintmax_t iters = 100;
  auto fn = [&](double y) { return std::make_pair(u(y) - target, du(y)); };
  double y = boost::math::tools::newton_raphson_iterate(fn, std::clamp(guess, lo, hi), lo, hi,
                                                        std::numeric_limits<double>::digits - 6,
                                                        iters);
  return std::clamp(y, lo, hi);
}

void check_branch(const Branch& b, const char* which) {
  if (!b.f || !b.d1 || !b.d2 || !b.d3) {
    throw ValidationError(std::string(which) + " branch lacks an evaluator");
  }
}

}  // namespace

PiecewiseExpandingMap::PiecewiseExpandingMap(Branch left, Branch right, std::string name,
                                             std::size_t check_points)
    : left_(std::move(left)), right_(std::move(right)), name_(std::move(name)) {
  check_branch(left_, "left");
  check_branch(right_, "right");
  const double fl = left_.f(-1.0), fr = right_.f(1.0);
  if (std::fabs(fl + 1.0) > kBoundaryTol || std::fabs(fr + 1.0) > kBoundaryTol) {
    throw ValidationError(name_ + ": boundary condition f(-1) = f(1) = -1 violated");
  }
  const double cl = left_.f(0.0), cr = right_.f(0.0);
  if (std::fabs(cl - cr) > kBoundaryTol) {
    throw ValidationError(name_ + ": branches disagree at the turning point");
  }
  critical_value_ = cl;
  if (critical_value_ > 1.0 + kBoundaryTol) throw ValidationError(name_ + ": f(0) > 1");

  if (check_points < 2) check_points = 2;
  double lb = std::numeric_limits<double>::infinity(), sup = 0.0;
  for (std::size_t i = 0; i < check_points; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(check_points - 1);
    const double dl = left_.d1(-1.0 + s), dr = right_.d1(s);
    if (!(dl > 0.0)) throw ValidationError(name_ + ": left branch not increasing");
    if (!(dr < 0.0)) throw ValidationError(name_ + ": right branch not decreasing");
    lb = std::min({lb, dl, -dr});
    sup = std::max({sup, dl, -dr});
  }
  if (!(lb > 1.0)) throw ValidationError(name_ + ": not expanding (min |f'| <= 1)");
  expansion_lower_bound_ = lb;
  derivative_sup_ = sup;
}

double PiecewiseExpandingMap::operator()(double x) const {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("evaluate: x outside [-1, 1]");
  return x < 0.0 ? left_.f(x) : right_.f(x);
}

double PiecewiseExpandingMap::derivative(double x, Side side, int order) const {
  const Branch& b = branch(side);
  switch (order) {
    case 0: return b.f(x);
    case 1: return b.d1(x);
    case 2: return b.d2(x);
    case 3: return b.d3(x);
  }
  throw DomainError("derivative order must be 0..3");
}

double PiecewiseExpandingMap::branch_inverse(Side side, double x) const {
  const Branch& b = branch(side);
  if (b.inverse) {
    // closed forms can round just past the branch ends
    const double y = b.inverse(x);
    return side == Side::Left ? std::clamp(y, -1.0, 0.0) : std::clamp(y, 0.0, 1.0);
  }
  const double span = critical_value_ + 1.0;
  const double s = span > 0 ? (x + 1.0) / span : 0.0;
  if (side == Side::Left) return monotone_root(b.f, b.d1, x, -1.0, 0.0, -1.0 + s);
  return monotone_root(b.f, b.d1, x, 0.0, 1.0, 1.0 - s);
}

double evaluate(const PiecewiseExpandingMap& map, double x) { return map(x); }

std::vector<Preimage> inverse_branches(const PiecewiseExpandingMap& map, double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("inverse_branches: x outside [-1, 1]");
  const double fc = map.critical_value();
  if (x > fc) return {};
  if (x == fc) return {{0.0, BranchTag::Critical}};
  return {{map.branch_inverse(Side::Left, x), BranchTag::Left},
          {map.branch_inverse(Side::Right, x), BranchTag::Right}};
}

PiecewiseExpandingMap skew_tent_map(double a) {
  if (!(a > 1.0 && a <= 2.0)) throw ValidationError("skew_tent: slope must lie in (1, 2]");
  Branch left{[a](double x) { return a - 1.0 + a * x; }, [a](double) { return a; },
              [](double) { return 0.0; }, [](double) { return 0.0; },
              [a](double y) { return (y - a + 1.0) / a; }};
  Branch right{[a](double x) { return a - 1.0 - a * x; }, [a](double) { return -a; },
               [](double) { return 0.0; }, [](double) { return 0.0; },
               [a](double y) { return (a - 1.0 - y) / a; }};
  return PiecewiseExpandingMap(std::move(left), std::move(right),
                               a == 2.0 ? "tent" : "skew_tent");
}

PiecewiseExpandingMap tent_map() { return skew_tent_map(2.0); }

PiecewiseExpandingMap bumped_tent_map(double a, double b) {
  Branch left{[a, b](double x) { return a - 1.0 + a * x + b * (1.0 - x * x); },
              [a, b](double x) { return a - 2.0 * b * x; }, [b](double) { return -2.0 * b; },
              [](double) { return 0.0; }, {}};
  Branch right{[a, b](double x) { return a - 1.0 - a * x + b * (1.0 - x * x); },
               [a, b](double x) { return -a - 2.0 * b * x; }, [b](double) { return -2.0 * b; },
               [](double) { return 0.0; }, {}};
  return PiecewiseExpandingMap(std::move(left), std::move(right), "bumped_tent");
}

PiecewiseExpandingMap named_map(std::string_view name, std::span<const double> params) {
  if (name == "tent") {
    if (!params.empty()) throw ValidationError("tent takes no parameters");
    return tent_map();
  }
  if (name == "skew_tent") {
    if (params.size() != 1) throw ValidationError("skew_tent takes one parameter a");
    return skew_tent_map(params[0]);
  }
  if (name == "bumped_tent") {
    if (params.size() != 2) throw ValidationError("bumped_tent takes parameters a, b");
    return bumped_tent_map(params[0], params[1]);
  }
  throw ValidationError("unknown map '" + std::string(name) + "'");
}

CriticalOrbit critical_orbit(const PiecewiseExpandingMap& map, int K, double period_tol) {
  if (K < 1) throw DomainError("critical_orbit: K must be >= 1");
  CriticalOrbit orbit;
  orbit.truncation_K = K;
  orbit.points.reserve(K);
  orbit.derivative_products.reserve(K);
  double c = map.critical_value();
  double product = 1.0;
  for (int k = 1; k <= K; ++k) {
    orbit.points.push_back(c);
    orbit.derivative_products.push_back(product);
    if (!orbit.period && c == 0.0) orbit.period = k;
    if (c != 0.0 && std::fabs(c) <= period_tol) orbit.near_critical = true;
    if (!orbit.eventual_period) {
      for (int j = 0; j + 1 < k; ++j) {
        if (std::fabs(orbit.points[j] - c) <= period_tol) {
          orbit.preperiod = j + 1;
          orbit.eventual_period = k - (j + 1);
          break;
        }
      }
    }
    product *= map.derivative(c, side_of(c));
    c = map(c);
  }
  return orbit;
}

bool good_condition(const PiecewiseExpandingMap& map, const CriticalOrbit& orbit) {
  if (!orbit.period) return true;
  const int q = *orbit.period;
  const double dq = std::fabs(orbit.derivative_products[q - 1]);
  const double m = std::min(std::fabs(map.derivative(0.0, Side::Left)),
                            std::fabs(map.derivative(0.0, Side::Right)));
  return dq * m > 2.0;
}

// ---- MapFamily --------------------------------------------------------------

MapFamily::MapFamily(FamilyKind kind, PiecewiseExpandingMap base, Smooth g, Smooth r, Smooth X,
                     double t_max)
    : kind_(kind),
      base_(std::move(base)),
      g_(std::move(g)),
      r_(std::move(r)),
      X_(std::move(X)),
      t_max_(t_max) {
  if (!(t_max_ > 0.0)) throw ValidationError("family: t_max must be positive");
  validate();
}

MapFamily MapFamily::conjugation(PiecewiseExpandingMap base, Smooth g, Smooth r, double t_max) {
  return MapFamily(FamilyKind::Conjugation, std::move(base), std::move(g), std::move(r),
                   zero_function(), t_max);
}

MapFamily MapFamily::additive(PiecewiseExpandingMap base, Smooth X, double t_max) {
  return MapFamily(FamilyKind::Additive, std::move(base), zero_function(), zero_function(),
                   std::move(X), t_max);
}

bool MapFamily::fixes_turning_point() const {
  return kind_ == FamilyKind::Additive || (g_(0.0) == 0.0 && r_(0.0) == 0.0);
}

void MapFamily::validate() const {
  constexpr int kT = 10;
  if (kind_ == FamilyKind::Conjugation) {
    for (double e : {-1.0, 1.0}) {
      if (std::fabs(g_(e)) > kBoundaryTol || std::fabs(r_(e)) > kBoundaryTol) {
        throw ValidationError("conjugation family: g and r must vanish at +-1");
      }
    }
    for (int k = 0; k < kT; ++k) {
      const double t = -t_max_ + 2.0 * t_max_ * k / (kT - 1);
      for (int i = 0; i <= 1000; ++i) {
        const double x = -1.0 + 2.0 * i / 1000.0;
        if (!(h_derivative(t, x) > 0.0)) {
          throw ValidationError("conjugation family: h_t not increasing for some |t| <= t_max");
        }
      }
    }
  } else {
    if (std::fabs(X_(-1.0)) > kBoundaryTol) {
      throw ValidationError("additive family: X(-1) must vanish");
    }
  }
  if (!fixes_turning_point()) return;
  for (int k = 0; k < kT; ++k) {
    const double t = -t_max_ + 2.0 * t_max_ * k / (kT - 1);
    (void)family_map(*this, t);
  }
}

double MapFamily::direction(double x, Side side) const {
  const double fx = base_.derivative(x, side, 0);
  if (kind_ == FamilyKind::Additive) return X_(fx);
  return g_(fx) - base_.derivative(x, side) * g_(x);
}

double MapFamily::direction_derivative(double x, Side side) const {
  const double fx = base_.derivative(x, side, 0);
  const double d1 = base_.derivative(x, side, 1);
  if (kind_ == FamilyKind::Additive) return X_.d1(fx) * d1;
  const double d2 = base_.derivative(x, side, 2);
  return g_.d1(fx) * d1 - d2 * g_(x) - d1 * g_.d1(x);
}

double MapFamily::second_t_derivative(double x, Side side) const {
  if (kind_ == FamilyKind::Additive) return 0.0;
  const double fx = base_.derivative(x, side, 0);
  const double d1 = base_.derivative(x, side, 1);
  const double d2 = base_.derivative(x, side, 2);
  const double gx = g_(x);
  return d2 * gx * gx + 2.0 * d1 * (gx * g_.d1(x) - r_(x)) - 2.0 * g_.d1(fx) * d1 * gx +
         2.0 * r_(fx);
}

double MapFamily::h(double t, double x) const { return x + t * g_(x) + t * t * r_(x); }

double MapFamily::h_derivative(double t, double x, int order) const {
  const double base = order == 1 ? 1.0 : 0.0;
  return base + t * g_.derivative(x, order) + t * t * r_.derivative(x, order);
}

double MapFamily::h_inverse(double t, double y) const {
  if (t == 0.0) return y;
  return monotone_root([this, t](double x) { return h(t, x); },
                       [this, t](double x) { return h_derivative(t, x); }, y, -1.0, 1.0, y);
}

namespace {

Branch additive_branch(const Branch& b, const Smooth& X, double t) {
  Branch out;
  out.f = [b, X, t](double x) {
    const double fx = b.f(x);
    return fx + t * X(fx);
  };
  out.d1 = [b, X, t](double x) { return b.d1(x) * (1.0 + t * X.d1(b.f(x))); };
  out.d2 = [b, X, t](double x) {
    const double fx = b.f(x), d1 = b.d1(x);
    return b.d2(x) * (1.0 + t * X.d1(fx)) + t * X.d2(fx) * d1 * d1;
  };
  out.d3 = [b, X, t](double x) {
    const double fx = b.f(x), d1 = b.d1(x), d2 = b.d2(x);
    return b.d3(x) * (1.0 + t * X.d1(fx)) + 3.0 * t * X.d2(fx) * d1 * d2 +
           t * X.d3(fx) * d1 * d1 * d1;
  };
  return out;
}

struct ConjugatedBranch {
  MapFamily family;
  Side side;
  double t;

  // f_t = h o f o K with K = h^{-1}; returns derivatives 0..order by the chain rule.
  std::array<double, 4> jet(double y, int order) const {
    const auto& f = family.base();
    const double K = family.h_inverse(t, y);
    const double h1K = family.h_derivative(t, K, 1);
    const double G = f.derivative(K, side, 0);
    std::array<double, 4> out{family.h(t, G), 0, 0, 0};
    if (order < 1) return out;
    const double K1 = 1.0 / h1K;
    const double f1 = f.derivative(K, side, 1);
    const double G1 = f1 * K1;
    const double hG1 = family.h_derivative(t, G, 1);
    out[1] = hG1 * G1;
    if (order < 2) return out;
    const double h2K = family.h_derivative(t, K, 2);
    const double K2 = -h2K * K1 * K1 * K1;
    const double f2 = f.derivative(K, side, 2);
    const double G2 = f2 * K1 * K1 + f1 * K2;
    const double hG2 = family.h_derivative(t, G, 2);
    out[2] = hG2 * G1 * G1 + hG1 * G2;
    if (order < 3) return out;
    const double h3K = family.h_derivative(t, K, 3);
    const double K3 = -h3K * K1 * K1 * K1 * K1 - 3.0 * h2K * K1 * K1 * K2;
    const double f3 = f.derivative(K, side, 3);
    const double G3 = f3 * K1 * K1 * K1 + 3.0 * f2 * K1 * K2 + f1 * K3;
    const double hG3 = family.h_derivative(t, G, 3);
    out[3] = hG3 * G1 * G1 * G1 + 3.0 * hG2 * G1 * G2 + hG1 * G3;
    return out;
  }
};

Branch conjugated_branch(const MapFamily& family, Side side, double t) {
  auto cb = std::make_shared<ConjugatedBranch>(ConjugatedBranch{family, side, t});
  Branch out;
  out.f = [cb](double y) { return cb->jet(y, 0)[0]; };
  out.d1 = [cb](double y) { return cb->jet(y, 1)[1]; };
  out.d2 = [cb](double y) { return cb->jet(y, 2)[2]; };
  out.d3 = [cb](double y) { return cb->jet(y, 3)[3]; };
  out.inverse = [cb](double x) {
    const auto& fam = cb->family;
    const double u = fam.h_inverse(cb->t, x);
    const double pre = fam.base().branch_inverse(cb->side, u);
    return fam.h(cb->t, pre);
  };
  return out;
}

}  // namespace

PiecewiseExpandingMap family_map(const MapFamily& family, double t) {
  if (std::fabs(t) > family.t_max() * (1.0 + 1e-12)) {
    throw DomainError("family_map: |t| exceeds t_max");
  }
  if (t == 0.0) return family.base();
  const auto& base = family.base();
  if (family.kind() == FamilyKind::Additive) {
    return PiecewiseExpandingMap(additive_branch(base.branch(Side::Left), family.X(), t),
                                 additive_branch(base.branch(Side::Right), family.X(), t),
                                 base.name() + "+tX");
  }
  if (!family.fixes_turning_point()) {
    throw ValidationError("family_map: conjugator moves the turning point off 0 (g(0) or r(0) != 0)");
  }
  return PiecewiseExpandingMap(conjugated_branch(family, Side::Left, t),
                               conjugated_branch(family, Side::Right, t), base.name() + "^h");
}

}  // namespace saltus
