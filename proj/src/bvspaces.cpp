#include "saltus/bvspaces.hpp"

#include <algorithm>
#include <cmath>

#include "saltus/errors.hpp"
#include "saltus/simd.hpp"

namespace saltus {

std::vector<double> extrema_subsequence(std::span<const double> values) {
  std::vector<double> dedup;
  dedup.reserve(values.size());
  for (double v : values) {
    if (dedup.empty() || v != dedup.back()) dedup.push_back(v);
  }
  if (dedup.size() <= 2) return dedup;
  std::vector<double> out{dedup.front()};
  for (std::size_t i = 1; i + 1 < dedup.size(); ++i) {
    const double l = dedup[i] - dedup[i - 1], r = dedup[i + 1] - dedup[i];
    if ((l > 0) != (r > 0)) out.push_back(dedup[i]);
  }
  out.push_back(dedup.back());
  return out;
}

double var_p(std::span<const double> values, double p) {
  if (!(p >= 1.0)) throw DomainError("var_p: p must be >= 1");
  if (values.empty()) throw DomainError("var_p: empty sequence");
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) s += std::fabs(values[i] - values[i - 1]);
    return s;
  }
  const std::vector<double> x = extrema_subsequence(values);
  const std::size_t n = x.size();
  std::vector<double> best(n, 0.0);
  const bool integer_p = p == std::floor(p) && p <= 16.0;
  double top = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    double b;
    if (integer_p) {
      b = simd::varp_relax(std::span(best).first(i), std::span(x).first(i), x[i],
                           static_cast<int>(p));
    } else {
      b = 0.0;
      for (std::size_t j = 0; j < i; ++j) b = std::max(b, best[j] + std::pow(std::fabs(x[i] - x[j]), p));
    }
    best[i] = b;
    top = std::max(top, b);
  }
  return std::pow(top, 1.0 / p);
}

double bvp_norm(const GridFunction& u, double p) {
  std::vector<double> seq;
  seq.reserve(u.size() + 2);
  seq.push_back(0.0);
  seq.insert(seq.end(), u.values().begin(), u.values().end());
  seq.push_back(0.0);
  return var_p(seq, p);
}

double var_p_bruteforce(std::span<const double> values, double p) {
  if (!(p >= 1.0)) throw DomainError("var_p: p must be >= 1");
  const std::size_t n = values.size();
  if (n > 24) throw DomainError("var_p_bruteforce: sequence too long");
  double top = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    double s = 0.0, prev = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      if (!first) s += std::pow(std::fabs(values[i] - prev), p);
      prev = values[i];
      first = false;
    }
    top = std::max(top, s);
  }
  return std::pow(top, 1.0 / p);
}

}  // namespace saltus
