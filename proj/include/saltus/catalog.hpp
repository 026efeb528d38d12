#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace saltus {

using RealFn = std::function<double(double)>;

// A closed-form C^3 function with its first three derivatives.
struct Smooth {
  std::string name;
  RealFn f, d1, d2, d3;

  double operator()(double x) const { return f(x); }
  double derivative(double x, int order) const;
};

Smooth zero_function();
Smooth constant_function(double c);
Smooth linear_combination(double a, const Smooth& u, double b, const Smooth& v);

// Named catalog:
//   zero                  0
//   const c               c
//   bump c                c (1 - x^2)               (c defaults to 1/4)
//   cospi2 c              c cos(pi x / 2)           (c defaults to 1)
//   sinpi c               c sin(pi x)               (c defaults to 1)
//   odd_cubic c           c x (1 - x^2)             (c defaults to 1/4)
//   poly a0 a1 ...        sum a_k x^k
//   monomial k            x^k
Smooth catalog_function(std::string_view name, std::span<const double> params = {});
std::vector<std::string> catalog_function_names();

}  // namespace saltus
