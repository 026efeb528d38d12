#pragma once

#include <span>
#include <vector>

#include "saltus/grid_function.hpp"

namespace saltus {

// sup over ordered subsequences of (sum |increment|^p)^(1/p), p >= 1.
double var_p(std::span<const double> values, double p);

// var_p of the node values with 0 prepended and appended (support in I).
double bvp_norm(const GridFunction& u, double p);

// Subsequence of local extrema (endpoints kept, plateaus merged). An optimal
// var_p subset can always be chosen among these points.
std::vector<double> extrema_subsequence(std::span<const double> values);

// Exhaustive search over all subsets; exponential, for validation only.
double var_p_bruteforce(std::span<const double> values, double p);

}  // namespace saltus
