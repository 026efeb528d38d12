#include "saltus/catalog.hpp"

#include <cmath>
#include <numbers>

#include "saltus/errors.hpp"

namespace saltus {
namespace {

using std::numbers::pi;

double param(std::span<const double> p, std::size_t i, double fallback) {
  return i < p.size() ? p[i] : fallback;
}

Smooth polynomial(std::vector<double> a, std::string name) {
  auto eval = [a](double x, int order) {
    double s = 0.0;
    for (std::size_t k = a.size(); k-- > static_cast<std::size_t>(order);) {
      double c = a[k];
      for (int j = 0; j < order; ++j) c *= static_cast<double>(k - j);
      s = s * x + c;
    }
    return s;
  };
  return Smooth{std::move(name), [eval](double x) { return eval(x, 0); },
                [eval](double x) { return eval(x, 1); }, [eval](double x) { return eval(x, 2); },
                [eval](double x) { return eval(x, 3); }};
}

}  // namespace

double Smooth::derivative(double x, int order) const {
  switch (order) {
    case 0: return f(x);
    case 1: return d1(x);
    case 2: return d2(x);
    case 3: return d3(x);
  }
  throw DomainError("derivative order must be 0..3");
}

Smooth zero_function() { return constant_function(0.0); }

Smooth constant_function(double c) {
  auto z = [](double) { return 0.0; };
  return Smooth{c == 0.0 ? "zero" : "const", [c](double) { return c; }, z, z, z};
}

Smooth linear_combination(double a, const Smooth& u, double b, const Smooth& v) {
  auto comb = [a, b](RealFn p, RealFn q) {
    return [a, b, p = std::move(p), q = std::move(q)](double x) { return a * p(x) + b * q(x); };
  };
  return Smooth{"combination", comb(u.f, v.f), comb(u.d1, v.d1), comb(u.d2, v.d2),
                comb(u.d3, v.d3)};
}

Smooth catalog_function(std::string_view name, std::span<const double> params) {
  if (name == "zero") return zero_function();
  if (name == "const") return constant_function(param(params, 0, 0.0));
  if (name == "bump") {
    const double c = param(params, 0, 0.25);
    return Smooth{"bump", [c](double x) { return c * (1.0 - x * x); },
                  [c](double x) { return -2.0 * c * x; }, [c](double) { return -2.0 * c; },
                  [](double) { return 0.0; }};
  }
  if (name == "cospi2") {
    const double c = param(params, 0, 1.0);
    const double w = pi / 2;
    return Smooth{"cospi2", [c, w](double x) { return c * std::cos(w * x); },
                  [c, w](double x) { return -c * w * std::sin(w * x); },
                  [c, w](double x) { return -c * w * w * std::cos(w * x); },
                  [c, w](double x) { return c * w * w * w * std::sin(w * x); }};
  }
  if (name == "sinpi") {
    const double c = param(params, 0, 1.0);
    return Smooth{"sinpi", [c](double x) { return c * std::sin(pi * x); },
                  [c](double x) { return c * pi * std::cos(pi * x); },
                  [c](double x) { return -c * pi * pi * std::sin(pi * x); },
                  [c](double x) { return -c * pi * pi * pi * std::cos(pi * x); }};
  }
  if (name == "odd_cubic") {
    const double c = param(params, 0, 0.25);
    return Smooth{"odd_cubic", [c](double x) { return c * x * (1.0 - x * x); },
                  [c](double x) { return c * (1.0 - 3.0 * x * x); },
                  [c](double x) { return -6.0 * c * x; }, [c](double) { return -6.0 * c; }};
  }
  if (name == "poly") {
    if (params.empty()) throw ValidationError("poly needs at least one coefficient");
    return polynomial(std::vector<double>(params.begin(), params.end()), "poly");
  }
  if (name == "monomial") {
    const double k = param(params, 0, 1.0);
    if (k < 0 || k != std::floor(k) || k > 32) throw ValidationError("monomial degree must be 0..32");
    std::vector<double> a(static_cast<std::size_t>(k) + 1, 0.0);
    a.back() = 1.0;
    return polynomial(std::move(a), "monomial");
  }
  throw ValidationError("unknown catalog function '" + std::string(name) + "'");
}

std::vector<std::string> catalog_function_names() {
  return {"zero", "const", "bump", "cospi2", "sinpi", "odd_cubic", "poly", "monomial"};
}

}  // namespace saltus
