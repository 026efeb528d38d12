#include "saltus/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "saltus/errors.hpp"
#include "saltus/simd.hpp"

namespace saltus {

GridFunction::GridFunction(std::vector<double> values, Interpolation interpolation,
                           std::vector<std::size_t> jump_tags)
    : values_(std::move(values)), interpolation_(interpolation) {
  if (values_.size() < 2) throw ValidationError("GridFunction needs at least two nodes");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("GridFunction values must be finite");
  }
  set_jump_tags(std::move(jump_tags));
}

void GridFunction::set_jump_tags(std::vector<std::size_t> tags) {
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  if (!tags.empty() && tags.back() > intervals()) {
    throw ValidationError("GridFunction jump tag outside the grid");
  }
  jump_tags_ = std::move(tags);
}

bool GridFunction::is_tagged(std::size_t i) const {
  return std::binary_search(jump_tags_.begin(), jump_tags_.end(), i);
}

CellLocation locate(double x, std::size_t intervals) {
  const double u = (std::clamp(x, -1.0, 1.0) + 1.0) * 0.5 * static_cast<double>(intervals);
  std::size_t j = static_cast<std::size_t>(u);
  if (j >= intervals) j = intervals - 1;
  return {j, u - static_cast<double>(j)};
}

double GridFunction::operator()(double x) const {
  const auto [j, theta] = locate(x, intervals());
  const double a = values_[j], b = values_[j + 1];
  if (interpolation_ == Interpolation::PiecewiseConstant) return theta < 1.0 ? a : b;
  if (!jump_tags_.empty()) {
    // A tagged node carries a one-sided value; do not interpolate through it.
    const bool ta = is_tagged(j), tb = is_tagged(j + 1);
    if (ta && !tb) return theta == 0.0 ? a : b;
    if (tb && !ta) return theta == 1.0 ? b : a;
  }
  return a + theta * (b - a);
}

double GridFunction::integral() const {
  const auto n = values_.size();
  double s = 0.5 * (values_.front() + values_.back());
  for (std::size_t i = 1; i + 1 < n; ++i) s += values_[i];
  return s * spacing();
}

double GridFunction::sup_norm() const { return simd::max_abs(values_); }

namespace {
void check_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size()) throw ValidationError("GridFunction grids differ");
}
}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  check_same_grid(a, b);
  std::vector<double> v(a.values().begin(), a.values().end());
  simd::axpy(1.0, b.values(), v);
  return GridFunction(std::move(v), a.interpolation(), a.jump_tags());
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  check_same_grid(a, b);
  std::vector<double> v(a.values().begin(), a.values().end());
  simd::axpy(-1.0, b.values(), v);
  return GridFunction(std::move(v), a.interpolation(), a.jump_tags());
}

GridFunction operator*(double s, const GridFunction& a) {
  std::vector<double> v(a.values().begin(), a.values().end());
  for (double& x : v) x *= s;
  return GridFunction(std::move(v), a.interpolation(), a.jump_tags());
}

GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
  check_same_grid(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  return GridFunction(std::move(v), a.interpolation(), a.jump_tags());
}

double interpolation_error_estimate(const GridFunction& u) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    if (u.is_tagged(i - 1) || u.is_tagged(i) || u.is_tagged(i + 1)) continue;
    m = std::max(m, std::fabs(u[i + 1] - 2.0 * u[i] + u[i - 1]));
  }
  return 0.5 * m;
}

}  // namespace saltus
