#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saltus/catalog.hpp"

namespace saltus {

// Which branch a point belongs to; at the turning point c = 0 callers say
// which one-sided value they want.
enum class Side { Left, Right };
enum class BranchTag { Left, Right, Critical };

inline Side side_of(double x) noexcept { return x < 0.0 ? Side::Left : Side::Right; }

struct Branch {
  RealFn f, d1, d2, d3;
  RealFn inverse;  // optional closed-form inverse; root finding when empty
};

// Continuous unimodal map of I = [-1, 1] with turning point 0, increasing left
// branch, decreasing right branch, f(-1) = f(1) = -1, f(0) <= 1, |f'| > 1.
class PiecewiseExpandingMap {
 public:
  PiecewiseExpandingMap(Branch left, Branch right, std::string name = "map",
                        std::size_t check_points = 2049);

  double operator()(double x) const;
  double derivative(double x, Side side, int order = 1) const;
  double derivative(double x, int order = 1) const { return derivative(x, side_of(x), order); }

  const Branch& branch(Side side) const { return side == Side::Left ? left_ : right_; }
  const std::string& name() const { return name_; }
  double critical_value() const { return critical_value_; }
  double expansion_lower_bound() const { return expansion_lower_bound_; }
  double derivative_sup() const { return derivative_sup_; }
  double contraction() const { return 1.0 / expansion_lower_bound_; }

  // Preimage of x on one branch (x must lie in [-1, f(0)]).
  double branch_inverse(Side side, double x) const;

 private:
  Branch left_, right_;
  std::string name_;
  double critical_value_ = 0.0;
  double expansion_lower_bound_ = 0.0;
  double derivative_sup_ = 0.0;
};

double evaluate(const PiecewiseExpandingMap& map, double x);

struct Preimage {
  double y;
  BranchTag tag;
};

std::vector<Preimage> inverse_branches(const PiecewiseExpandingMap& map, double x);

PiecewiseExpandingMap tent_map();
PiecewiseExpandingMap skew_tent_map(double a);
// a - 1 - a|x| + b (1 - x^2)
PiecewiseExpandingMap bumped_tent_map(double a, double b);
// "tent", "skew_tent" [a], "bumped_tent" [a, b]
PiecewiseExpandingMap named_map(std::string_view name, std::span<const double> params = {});

struct CriticalOrbit {
  std::vector<double> points;               // c_1 .. c_K
  std::vector<double> derivative_products;  // (f^{k-1})'(c_1), k = 1 .. K
  std::optional<int> period;                // q with c_q = c
  std::optional<int> preperiod;             // first index of the eventual cycle
  std::optional<int> eventual_period;
  bool near_critical = false;               // some c_k within period_tol of c, not equal
  int truncation_K = 0;

  std::size_t size() const { return points.size(); }
};

CriticalOrbit critical_orbit(const PiecewiseExpandingMap& map, int K, double period_tol = 1e-9);

// Boolean report of the derivative condition for a periodic turning point;
// true whenever c is not periodic.
bool good_condition(const PiecewiseExpandingMap& map, const CriticalOrbit& orbit);

enum class FamilyKind { Conjugation, Additive };

// t -> f_t, either h_t o f_0 o h_t^{-1} with h_t = x + t g + t^2 r, or
// f_0 + t X o f_0.
class MapFamily {
 public:
  static MapFamily conjugation(PiecewiseExpandingMap base, Smooth g, Smooth r = zero_function(),
                               double t_max = 0.1);
  static MapFamily additive(PiecewiseExpandingMap base, Smooth X, double t_max = 0.1);

  FamilyKind kind() const { return kind_; }
  const PiecewiseExpandingMap& base() const { return base_; }
  const Smooth& g() const { return g_; }
  const Smooth& r() const { return r_; }
  const Smooth& X() const { return X_; }
  double t_max() const { return t_max_; }

  // Conjugators with g(0) != 0 move the turning point off 0; such f_t are
  // outside the map class, only h_t and f_0 are usable.
  bool fixes_turning_point() const;

  // Derivatives in t at t = 0.
  double direction(double x, Side side) const;             // v
  double direction(double x) const { return direction(x, side_of(x)); }
  double direction_derivative(double x, Side side) const;  // d/dt f_t' = v'
  double second_t_derivative(double x, Side side) const;   // d^2/dt^2 f_t

  double h(double t, double x) const;
  double h_derivative(double t, double x, int order = 1) const;
  double h_inverse(double t, double y) const;

 private:
  MapFamily(FamilyKind kind, PiecewiseExpandingMap base, Smooth g, Smooth r, Smooth X,
            double t_max);
  void validate() const;

  FamilyKind kind_;
  PiecewiseExpandingMap base_;
  Smooth g_, r_, X_;
  double t_max_;
};

PiecewiseExpandingMap family_map(const MapFamily& family, double t);

}  // namespace saltus
