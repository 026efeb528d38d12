#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "saltus/catalog.hpp"
#include "saltus/conjugacy.hpp"
#include "saltus/density.hpp"
#include "saltus/maps.hpp"

namespace saltus {

struct ResponseReport {
  double formula_value = 0.0;
  double singular_term = 0.0;
  double resolvent_term = 0.0;
  double formula_error = 0.0;  // |value(M) - value(M/2)|
  std::optional<double> fd_value;
  std::optional<double> fd_error;
  std::optional<double> pressure_value;
  std::optional<double> ground_truth;
  std::size_t grid_size = 0;
  double defect = 0.0;      // TceConsistency horizontality defect
  double mean_check = 0.0;  // integral of X' rho + X rho_reg'
  double gap_estimate = 0.0;
  bool good = true;
  bool mixing = true;       // heuristic: gap estimate < 0.95
};

// Derivative at t = 0 of the integral of psi against the SRB measure of f + tX o f.
// ground_truth_g: conjugator whose first-order identity gives the value
// of the integral of psi' g against mu_0.
ResponseReport response_formula(const MapFamily& family, const Smooth& psi, std::size_t grid_size,
                                double tol = 1e-12,
                                const std::optional<Smooth>& ground_truth_g = std::nullopt);

struct FiniteDifferenceReport {
  double value = 0.0;
  double error_bar = 0.0;
  double extrapolation_spread = 0.0;
  double discretization_error = 0.0;
  std::vector<double> deltas;
  std::vector<double> central;  // D(delta)
  std::vector<double> plus, minus;  // R(delta), R(-delta)
  double base_value = 0.0;          // R(0)
  std::optional<double> convergence_ratio;  // (D1 - D2) / (D2 - D3)
  bool non_differentiable = false;          // ratio far below the smooth value
  // |R(t) - R(0)| ~ a t log(1/t) + b t, least squares over the deltas.
  double modulus_log_coefficient = 0.0;
  double modulus_linear_coefficient = 0.0;
};

FiniteDifferenceReport response_finite_difference(const MapFamily& family, const Smooth& psi,
                                                  std::size_t grid_size,
                                                  const std::vector<double>& deltas);

struct ModulusFit {
  double log_coefficient = 0.0;
  double linear_coefficient = 0.0;
};

// Least squares for y = a t log(1/t) + b t, t in (0, 1).
ModulusFit modulus_fit(std::span<const double> t, std::span<const double> y);

struct PressureReport {
  double derivative = 0.0;  // d/ds log lambda_{s,t} at s = 0
  double error_bar = 0.0;
  std::vector<double> s_values, lambdas;
  double integral_weighted = 0.0;     // nu_t(psi o h_t rho) / nu_t(rho)
  double integral_conjugation = 0.0;  // integral of psi o h_t against mu_0
};

PressureReport pressure_derivative(const MapFamily& family, const Smooth& psi, double t,
                                   const std::vector<double>& s_deltas, std::size_t grid_size);

struct BirkhoffEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n_orbits = 0;
};

// Orbits from uniform random starts with a 1e-13 uniform kick per step
// (reflected at the ends): exact-arithmetic tent orbits collapse onto -1
// after about 53 steps in binary floating point.
BirkhoffEstimate birkhoff_average(const PiecewiseExpandingMap& map, const RealFn& psi,
                                  std::size_t n_orbits, std::size_t orbit_len,
                                  std::size_t burn_in, std::uint64_t seed,
                                  double noise = 1e-13);

struct CcclaimReport {
  double residual = 0.0;  // sup away from merged jumps, lhs projected to mean zero
  double literal_residual = 0.0;  // same without the projection
  double lhs_mean = 0.0;          // integral of the unprojected lhs
  double scale = 0.0;             // sup of the right-hand side
  std::size_t excluded_nodes = 0;
  GridFunction lhs, rhs;
};

// -alpha rho_reg' + R (I - P)(M rho) against -R (I - P)(X' rho + X rho_reg'),
// R the resolvent, P the spectral projector, M the derivative operator. The
// two sides differ by rho times the integral of alpha rho_reg', so the left
// side is compared after removing its rho component.
CcclaimReport ccclaim_check(const MapFamily& family, std::size_t grid_size);

// X with X o f = g o f - f' g for a symmetric piecewise-linear base (slopes
// a, -a) and odd g: the additive direction tangent to the conjugation by g.
Smooth companion_direction(double slope, const Smooth& g);

// L1 distance of two decompositions, piecewise-exact between nodes and jumps.
double l1_distance(const DensityDecomposition& a, const DensityDecomposition& b);

struct TangentPairReport {
  std::vector<double> t_values, distances;
  double exponent = 0.0;  // least-squares slope of log distance against log t
};

TangentPairReport tangent_pair_distance(const MapFamily& additive, const MapFamily& conjugation,
                                        const std::vector<double>& t_values,
                                        std::size_t grid_size);

// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace saltus
