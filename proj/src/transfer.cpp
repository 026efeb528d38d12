#include "saltus/transfer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "saltus/errors.hpp"
#include "saltus/simd.hpp"

namespace saltus {

WeightFn default_weight(const PiecewiseExpandingMap& map) {
  return [map](double y, Side side) { return 1.0 / std::fabs(map.derivative(y, side)); };
}

TransferOperator::TransferOperator(PiecewiseExpandingMap map, WeightFn weight,
                                   std::size_t grid_size, bool default_weight)
    : map_(std::move(map)),
      weight_(std::move(weight)),
      grid_size_(grid_size),
      default_weight_(default_weight) {
  if (grid_size_ < 64 || grid_size_ % 2) {
    throw DomainError("build_operator: grid_size must be even and >= 64");
  }
  const std::size_t n = size();
  preimages_.resize(n);
  counts_.assign(n, 0);
  cols_.assign(kSlots * n, 0);
  coef_.assign(kSlots * n, 0.0);
  const double fc = map_.critical_value();
  snap_distance_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = GridFunction::node(i, grid_size_);
    snap_distance_ = std::min(snap_distance_, std::fabs(x - fc));
    std::uint8_t k = 0;
    for (const Preimage& p : inverse_branches(map_, x)) {
      if (p.tag == BranchTag::Critical) {
        preimages_[i][k++] = {0.0, Side::Left, weight_(0.0, Side::Left)};
        preimages_[i][k++] = {0.0, Side::Right, weight_(0.0, Side::Right)};
      } else {
        const Side s = p.tag == BranchTag::Left ? Side::Left : Side::Right;
        preimages_[i][k++] = {p.y, s, weight_(p.y, s)};
      }
    }
    counts_[i] = k;
    for (std::uint8_t m = 0; m < k; ++m) {
      const auto& pre = preimages_[i][m];
      const auto [j, th] = locate(pre.y, grid_size_);
      cols_[(2 * m) * n + i] = static_cast<std::int32_t>(j);
      coef_[(2 * m) * n + i] = pre.weight * (1.0 - th);
      cols_[(2 * m + 1) * n + i] = static_cast<std::int32_t>(j + 1);
      coef_[(2 * m + 1) * n + i] = pre.weight * th;
    }
  }
}

void TransferOperator::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = size();
  if (in.size() != n || out.size() != n) throw DomainError("apply: size mismatch");
  simd::kernels().gather_apply(cols_.data(), coef_.data(), kSlots, n, in.data(), out.data());
}

GridFunction TransferOperator::apply(const GridFunction& phi) const {
  std::vector<double> out(size());
  apply(phi.values(), out);
  return GridFunction(std::move(out));
}

void TransferOperator::apply_transpose(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = size();
  if (in.size() != n || out.size() != n) throw DomainError("apply_transpose: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < kSlots; ++k) {
    for (std::size_t i = 0; i < n; ++i) out[cols_[k * n + i]] += coef_[k * n + i] * in[i];
  }
}

std::vector<double> TransferOperator::dense_row_major() const {
  const std::size_t n = size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t k = 0; k < kSlots; ++k) {
    for (std::size_t i = 0; i < n; ++i) a[i * n + cols_[k * n + i]] += coef_[k * n + i];
  }
  return a;
}

TransferOperator build_operator(const PiecewiseExpandingMap& map, std::size_t grid_size) {
  return TransferOperator(map, default_weight(map), grid_size, true);
}

TransferOperator build_operator(const PiecewiseExpandingMap& map, WeightFn weight,
                                std::size_t grid_size) {
  return TransferOperator(map, std::move(weight), grid_size, false);
}

// ---- spectrum -----------------------------------------------------------------

double SpectralData::pairing(std::span<const double> w) const {
  return simd::dot(dual, w) / simd::dot(dual, density.values());
}

GridFunction SpectralData::complement(const GridFunction& w) const {
  std::vector<double> v(w.values().begin(), w.values().end());
  simd::axpy(-pairing(w.values()), density.values(), v);
  return GridFunction(std::move(v), w.interpolation(), w.jump_tags());
}

namespace {

double trapezoid(std::span<const double> v, double h) {
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

double positive_sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Growth rate of A restricted to the complement of (rho, dual).
double deflated_rate(const TransferOperator& op, std::span<const double> rho,
                     std::span<const double> dual) {
  const std::size_t n = op.size();
  const double norm = simd::dot(dual, rho);
  std::mt19937_64 rng(0x5a17u);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> x(n), y(n);
  for (double& v : x) v = U(rng);
  auto project = [&](std::vector<double>& z) { simd::axpy(-simd::dot(dual, z) / norm, rho, z); };
  project(x);
  constexpr int kWarm = 200, kMeasure = 200;
  double log_growth = 0.0;
  for (int it = 0; it < kWarm + kMeasure; ++it) {
    const double nx = simd::max_abs(x);
    if (nx == 0.0) return 0.0;
    for (double& v : x) v /= nx;
    op.apply(x, y);
    project(y);
    const double ny = simd::max_abs(y);
    if (ny == 0.0) return 0.0;
    if (it >= kWarm) log_growth += std::log(ny);
    x.swap(y);
  }
  return std::exp(log_growth / kMeasure);
}

}  // namespace

SpectralData leading_spectrum(const TransferOperator& op, double tol, int max_iter) {
  if (!(tol > 0.0)) throw DomainError("leading_spectrum: tol must be positive");
  const std::size_t n = op.size();
  const double h = 2.0 / static_cast<double>(op.grid_size());
  std::vector<double> u(n, 1.0), y(n);
  double lambda = 0.0, prev = -1.0, residual = INFINITY;
  int it = 0;
  const double target = std::max(1e-10, 10.0 * tol);
  for (; it < max_iter; ++it) {
    op.apply(u, y);
    lambda = positive_sum(y) / positive_sum(u);
    for (std::size_t i = 0; i < n; ++i) u[i] *= lambda;
    residual = simd::max_abs_diff(y, u) / std::max(simd::max_abs(u), 1e-300);
    const double mass = trapezoid(y, h);
    for (std::size_t i = 0; i < n; ++i) u[i] = y[i] / mass;
    if (std::fabs(lambda - prev) < tol && residual <= target) break;
    prev = lambda;
  }
  SpectralData sd;
  sd.iterations = it + 1;
  if (it == max_iter) {
    sd.leading_eigenvalue = lambda;
    throw NumericalError("leading_spectrum: no convergence after " + std::to_string(max_iter) +
                         " iterations (spectral gap too small?)");
  }
  sd.leading_eigenvalue = lambda;
  sd.residual = residual;

  std::vector<double> d(n, 1.0 / static_cast<double>(n)), e(n);
  for (int k = 0; k < max_iter; ++k) {
    op.apply_transpose(d, e);
    const double s = positive_sum(e);
    for (double& v : e) v /= s;
    const double change = simd::max_abs_diff(d, e);
    d.swap(e);
    if (change <= tol * simd::max_abs(d)) break;
  }
  sd.density = GridFunction(std::move(u));
  sd.dual = std::move(d);
  sd.gap_estimate = deflated_rate(op, sd.density.values(), sd.dual) / lambda;
  return sd;
}

TransferOperator weighted_operator(const MapFamily& family, double s, double t, const Smooth& psi,
                                   std::size_t grid_size) {
  if (family.kind() != FamilyKind::Conjugation) {
    throw ValidationError("weighted_operator: needs a conjugation family (explicit h_t)");
  }
  if (std::fabs(t) > family.t_max() * (1.0 + 1e-12)) {
    throw DomainError("weighted_operator: |t| exceeds t_max");
  }
  const auto& f = family.base();
  WeightFn w = [family, f, s, t, psi](double y, Side side) {
    const double fy = f.derivative(y, side, 0);
    // f_t'(h_t y) = h_t'(f y) f'(y) / h_t'(y)
    const double dft = family.h_derivative(t, fy) * f.derivative(y, side) / family.h_derivative(t, y);
    const double tilt = s == 0.0 ? 1.0 : std::exp(s * psi(family.h(t, y)));
    return tilt / std::fabs(dft);
  };
  return TransferOperator(f, std::move(w), grid_size, s == 0.0 && t == 0.0);
}

TransferOperator derivative_operator(const MapFamily& family, const TCESolution& alpha,
                                     std::size_t grid_size) {
  const auto& f = family.base();
  auto a = std::make_shared<TCESolution>(alpha);
  WeightFn w = [family, f, a](double y, Side side) {
    const double d1 = f.derivative(y, side);
    const double al = y == 0.0 ? 0.0 : a->at(y);
    return -(f.derivative(y, side, 2) * al + family.direction_derivative(y, side)) /
           (std::fabs(d1) * d1);
  };
  return TransferOperator(f, std::move(w), grid_size, false);
}

// ---- matrix dump --------------------------------------------------------------

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto b = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(b.begin(), b.end());
    os.write(b.data(), b.size());
  } else {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
T get_le(std::ifstream& is) {
  std::array<char, sizeof(T)> b{};
  is.read(b.data(), b.size());
  if (!is) throw ValidationError("matrix dump: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  return std::bit_cast<T>(b);
}

}  // namespace

void write_matrix_dump(const TransferOperator& op, std::ostream& os) {
  os.write("XFER", 4);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(op.grid_size()));
  put_le<std::uint32_t>(os, op.has_default_weight() ? 0u : 1u);
  put_le<std::uint32_t>(os, 0u);
  for (double v : op.dense_row_major()) put_le<double>(os, v);
  if (!os) throw ValidationError("matrix dump: write failed");
}

void write_matrix_dump(const TransferOperator& op, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("matrix dump: cannot open " + path.string());
  write_matrix_dump(op, os);
}

MatrixDump read_matrix_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("matrix dump: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "XFER", 4) != 0) throw ValidationError("matrix dump: bad magic");
  MatrixDump d;
  d.grid_size = get_le<std::uint32_t>(is);
  d.flags = get_le<std::uint32_t>(is);
  (void)get_le<std::uint32_t>(is);
  const std::size_t n = std::size_t{d.grid_size} + 1;
  d.data.resize(n * n);
  for (double& v : d.data) v = get_le<double>(is);
  return d;
}

}  // namespace saltus
