#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "saltus/grid_function.hpp"
#include "saltus/maps.hpp"
#include "saltus/transfer.hpp"

namespace saltus {

// H_u(x) = -1 for x < u, 0 for x > u, -1/2 at an interior x = u. At the ends
// of I the inward one-sided limit is used (right limit at -1, left limit at 1).
double heaviside(double u, double x);
// One-sided limit of H_u at x.
double heaviside_limit(double u, double x, Side side);

struct Jump {
  double location;
  double amplitude;
  int index = 0;  // k; 0 for merged entries
};

// rho = regular + sum_k s_k H_{c_k}.
struct DensityDecomposition {
  GridFunction regular;
  // d/dx regular: central differences, one-sided 4-point stencils at the
  // ends and at c. The center node holds the left value and is tagged.
  GridFunction regular_derivative;
  double regular_derivative_left = 0.0;   // at c-
  double regular_derivative_right = 0.0;  // at c+
  std::vector<Jump> jumps;
  std::vector<Jump> merged_jumps;
  int truncation_K = 0;
  double tail_bound = 0.0;

  CriticalOrbit orbit;
  SpectralData raw;       // collocation eigenpair before the decomposition
  double s1_fit = 0.0;    // one-sided fit from the raw density
  double fit_error = 0.0; // residual scale of that fit
  int refinement_iterations = 0;

  std::size_t grid_size() const { return regular.intervals(); }
  double s1() const { return jumps.empty() ? 0.0 : jumps.front().amplitude; }

  double saltus(double x) const;
  double value(double x) const { return regular(x) + saltus(x); }
  GridFunction reconstruction() const;
  // Quadrature of the regular part plus exact integrals of the Heaviside terms.
  double integral() const;
  double integrate(const std::function<double(double)>& psi) const;
};

DensityDecomposition srb_density(const PiecewiseExpandingMap& map, std::size_t grid_size,
                                 double tol = 1e-12, double period_tol = 1e-9);

struct SaltusDerivative {
  double location;
  double value;
};

struct SaltusDerivativeReport {
  std::vector<SaltusDerivative> terms;  // (c_k, s'_k), k = 1..K
  bool orbit_visits_both_sides = false;
};

// Jumps s'_k of the derivative of the density: s'_k = E'_k - E_k with
// E'_k = s'_{k-1}/f'(c_{k-1})^2, E_k = s_{k-1} f''(c_{k-1})/f'(c_{k-1})^3.
SaltusDerivativeReport saltus_derivative(const PiecewiseExpandingMap& map,
                                         const DensityDecomposition& rho);

// Integral of psi over [a, b] (adaptive Gauss-Kronrod).
double integrate_interval(const std::function<double(double)>& psi, double a, double b);

}  // namespace saltus
