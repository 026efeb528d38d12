#include <algorithm>
#include <cmath>

#include "saltus/conjugacy.hpp"
#include "saltus/errors.hpp"
#include "saltus/simd.hpp"

namespace saltus {

HolderEstimate holder_norm(const GridFunction& u, double beta, std::size_t pair_budget) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("holder_norm: beta must lie in (0, 1)");
  const std::size_t n = u.size();
  const double h = u.spacing();
  const auto vals = u.values();
  HolderEstimate est{beta, 0.0, pair_budget, 0};
  auto scan = [&](std::size_t lag, std::size_t count) {
    const double d = simd::max_abs_lag_diff(vals, lag, 0, count);
    est.constant = std::max(est.constant, d / std::pow(static_cast<double>(lag) * h, beta));
    est.pairs_examined += count;
  };
  if (n <= 2000) {
    for (std::size_t lag = 1; lag < n; ++lag) scan(lag, n - lag);
    return est;
  }
  for (std::size_t lo = 1; lo < n; lo *= 2) {
    const std::size_t hi = std::min(2 * lo, n);
    std::size_t remaining = pair_budget;
    for (std::size_t lag = lo; lag < hi && remaining > 0; ++lag) {
      const std::size_t count = std::min(remaining, n - lag);
      scan(lag, count);
      remaining -= count;
    }
  }
  return est;
}

}  // namespace saltus
