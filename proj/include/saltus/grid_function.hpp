#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "saltus/catalog.hpp"

namespace saltus {

enum class Interpolation { PiecewiseLinear, PiecewiseConstant };

// Values at the uniform nodes x_i = -1 + 2i/M, i = 0..M, of [-1, 1].
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(std::vector<double> values,
                        Interpolation interpolation = Interpolation::PiecewiseLinear,
                        std::vector<std::size_t> jump_tags = {});

  template <class F>
  static GridFunction sample(std::size_t intervals, F&& f,
                             Interpolation interpolation = Interpolation::PiecewiseLinear) {
    std::vector<double> v(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) v[i] = f(node(i, intervals));
    return GridFunction(std::move(v), interpolation);
  }
  static GridFunction zeros(std::size_t intervals) {
    return GridFunction(std::vector<double>(intervals + 1, 0.0));
  }

  static double node(std::size_t i, std::size_t intervals) {
    // Exact at i = 0, M/2 and M.
    return (2.0 * static_cast<double>(i) - static_cast<double>(intervals)) /
           static_cast<double>(intervals);
  }

  std::size_t intervals() const { return values_.empty() ? 0 : values_.size() - 1; }
  std::size_t size() const { return values_.size(); }
  double spacing() const { return 2.0 / static_cast<double>(intervals()); }
  double node(std::size_t i) const { return node(i, intervals()); }
  std::size_t center() const { return intervals() / 2; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  Interpolation interpolation() const { return interpolation_; }
  const std::vector<std::size_t>& jump_tags() const { return jump_tags_; }
  bool is_tagged(std::size_t i) const;
  void set_jump_tags(std::vector<std::size_t> tags);

  // Interpolated value; x is clamped to [-1, 1].
  double operator()(double x) const;

  double integral() const;  // trapezoid
  double sup_norm() const;

 private:
  std::vector<double> values_;
  Interpolation interpolation_ = Interpolation::PiecewiseLinear;
  std::vector<std::size_t> jump_tags_;
};

// Cell index j and offset theta in [0, 1] with x = x_j + theta h, j <= M - 1.
struct CellLocation {
  std::size_t cell;
  double theta;
};
CellLocation locate(double x, std::size_t intervals);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);

// Max |second difference| / 2: a crude estimate of the linear-interpolation error.
double interpolation_error_estimate(const GridFunction& u);

}  // namespace saltus
