#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "saltus/grid_function.hpp"
#include "saltus/maps.hpp"

namespace saltus {

// ---- horizontality -----------------------------------------------------------

enum class DefectConvention { Printed, TceConsistency };

struct DefectReport {
  double value = 0.0;
  double error_bar = 0.0;  // truncation tail when the critical orbit is infinite
  int terms = 0;
};

// Printed: J = sum_{j < M_f} v(c_j) / (f^j)'(c_1), c_0 = c.
// TceConsistency: alpha(c_1) - v(c) with alpha the bounded series solution;
// this equals -J and vanishes exactly when v is horizontal.
DefectReport horizontality_defect(const PiecewiseExpandingMap& map, const RealFn& v,
                                  DefectConvention convention, double period_tol = 1e-9);

// ---- twisted cohomological equation  v = alpha o f - f' alpha ---------------

enum class TceMethod { Series, PullBack };

struct TCESolution {
  GridFunction alpha;
  double truncation_error_bound = 0.0;
  TceMethod method = TceMethod::Series;
  int iterations_or_terms = 0;
  double residual = 0.0;               // sup over off-critical nodes
  double interpolation_error = 0.0;    // estimate entering the residual allowance
  std::optional<GridFunction> cesaro;  // pull-back only
  // Pointwise evaluation off the grid (series only); empty otherwise.
  std::function<double(double)> evaluator;

  double at(double x) const { return evaluator ? evaluator(x) : alpha(x); }
};

struct SeriesTerms {
  int terms;
  double tail_bound;
};

// Smallest N with sup|v| lambda^N / (1 - lambda) < tol (lambda = 1/inf|f'|), capped.
SeriesTerms series_terms(const PiecewiseExpandingMap& map, double sup_v, double tol,
                         int cap = 4000);

// alpha(x) = -sum_{i < min(N, M(x))} v(f^i x) / (f^{i+1})'(x), alpha(0) = 0.
double tce_series_value(const PiecewiseExpandingMap& map, const RealFn& v, double x, int terms,
                        double period_tol = 1e-9);

TCESolution solve_tce_series(const PiecewiseExpandingMap& map, const RealFn& v,
                             std::size_t grid_size, double tol, double period_tol = 1e-9);

// Piecewise-linear alpha_0 through 0 at -1, c, 1 and the values forced by the
// equation on the first few points of the critical orbit.
GridFunction pullback_initial_guess(const PiecewiseExpandingMap& map, const RealFn& v,
                                    std::size_t grid_size, int orbit_points = 8);

TCESolution solve_tce_pullback(const PiecewiseExpandingMap& map, const RealFn& v,
                               const GridFunction& alpha0, int n_iter);

// Equation for the second t-derivative of the conjugacy,
// w = f'' alpha^2 + 2 (d_t f') alpha + d_tt f.
TCESolution solve_tce_second_order(const MapFamily& family, const TCESolution& alpha,
                                   std::size_t grid_size, double tol);

// sup over off-critical nodes of |v - alpha o f + f' alpha|.
double tce_residual(const PiecewiseExpandingMap& map, const RealFn& v, const GridFunction& alpha);

// ---- Hölder seminorm estimate -----------------------------------------------

struct HolderEstimate {
  double beta = 0.0;
  double constant = 0.0;
  std::size_t pair_budget = 0;
  std::size_t pairs_examined = 0;
};

// Exhaustive below 2000 nodes; otherwise dyadic lag scales, each scanning its
// first pair_budget pairs in (lag, start) order, so budgets give nested sets.
HolderEstimate holder_norm(const GridFunction& u, double beta,
                           std::size_t pair_budget = std::size_t{1} << 20);

}  // namespace saltus
