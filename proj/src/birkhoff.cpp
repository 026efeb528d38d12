#include <cmath>
#include <random>

#include "saltus/errors.hpp"
#include "saltus/response.hpp"

namespace saltus {

BirkhoffEstimate birkhoff_average(const PiecewiseExpandingMap& map, const RealFn& psi,
                                  std::size_t n_orbits, std::size_t orbit_len,
                                  std::size_t burn_in, std::uint64_t seed, double noise) {
  if (orbit_len <= burn_in) throw DomainError("birkhoff_average: orbit_len must exceed burn_in");
  if (n_orbits == 0) throw DomainError("birkhoff_average: n_orbits must be positive");
  std::vector<double> means(n_orbits);
  for (std::size_t k = 0; k < n_orbits; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double x = U(rng), s = 0.0;
    for (std::size_t i = 0; i < orbit_len; ++i) {
      if (i >= burn_in) s += psi(x);
      x = map(x) + noise * U(rng);
      if (x > 1.0) x = 2.0 - x;
      if (x < -1.0) x = -2.0 - x;
    }
    means[k] = s / static_cast<double>(orbit_len - burn_in);
  }
  BirkhoffEstimate est;
  est.n_orbits = n_orbits;
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(n_orbits);
  est.mean = m;
  if (n_orbits > 1) {
    double ss = 0.0;
    for (double v : means) ss += (v - m) * (v - m);
    est.standard_error = std::sqrt(ss / static_cast<double>(n_orbits - 1) / n_orbits);
  }
  return est;
}

}  // namespace saltus
