#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "saltus/conjugacy.hpp"
#include "saltus/grid_function.hpp"
#include "saltus/maps.hpp"

namespace saltus {

// Weight g(y) on I \ {0}; the side selects the branch (matters only at y = 0).
using WeightFn = std::function<double(double y, Side side)>;

WeightFn default_weight(const PiecewiseExpandingMap& map);

struct NodePreimage {
  double y;
  Side side;
  double weight;
};

// Collocation of (L phi)(x) = sum_{f(y) = x} g(y) phi(y) at the nodes, phi
// replaced by its piecewise-linear interpolant. Each row has at most two
// preimages (a critical preimage counts once per side), hence at most four
// nonzeros; they are stored slot-major for the gather kernel.
class TransferOperator {
 public:
  static constexpr std::size_t kSlots = 4;

  TransferOperator(PiecewiseExpandingMap map, WeightFn weight, std::size_t grid_size,
                   bool default_weight);

  const PiecewiseExpandingMap& map() const { return map_; }
  const WeightFn& weight() const { return weight_; }
  std::size_t grid_size() const { return grid_size_; }
  std::size_t size() const { return grid_size_ + 1; }
  bool has_default_weight() const { return default_weight_; }
  // Distance from f(0) to the nearest node.
  double snap_distance() const { return snap_distance_; }

  std::span<const NodePreimage> preimages(std::size_t i) const {
    return std::span(preimages_[i].data(), counts_[i]);
  }

  void apply(std::span<const double> in, std::span<double> out) const;
  GridFunction apply(const GridFunction& phi) const;
  void apply_transpose(std::span<const double> in, std::span<double> out) const;

  std::vector<double> dense_row_major() const;

 private:
  PiecewiseExpandingMap map_;
  WeightFn weight_;
  std::size_t grid_size_;
  bool default_weight_;
  double snap_distance_ = 0.0;
  std::vector<std::array<NodePreimage, 2>> preimages_;
  std::vector<std::uint8_t> counts_;
  std::vector<std::int32_t> cols_;
  std::vector<double> coef_;
};

TransferOperator build_operator(const PiecewiseExpandingMap& map, std::size_t grid_size);
TransferOperator build_operator(const PiecewiseExpandingMap& map, WeightFn weight,
                                std::size_t grid_size);

struct SpectralData {
  double leading_eigenvalue = 0.0;
  GridFunction density;      // right eigenvector, trapezoid integral 1
  std::vector<double> dual;  // left eigenvector, entries sum to 1
  double gap_estimate = 0.0;
  int iterations = 0;
  double residual = 0.0;

  // dual(w) / dual(density): the dual functional scaled so density maps to 1.
  double pairing(std::span<const double> w) const;
  // w - density * pairing(w)
  GridFunction complement(const GridFunction& w) const;
};

SpectralData leading_spectrum(const TransferOperator& op, double tol = 1e-13,
                              int max_iter = 20000);

// Operator of the base map with weight exp(s psi(h_t y)) / |f_t'(h_t y)|.
TransferOperator weighted_operator(const MapFamily& family, double s, double t, const Smooth& psi,
                                   std::size_t grid_size);

// Weight -(f'' alpha + v') / (|f'| f'): the t-derivative of the conjugated operator.
TransferOperator derivative_operator(const MapFamily& family, const TCESolution& alpha,
                                     std::size_t grid_size);

// (I - A/lambda)^{-1} on the complement of the leading eigenvector, through a
// dense LU of I - A/lambda + density * dual^T. Requires |lambda - 1| <= 1e-3.
class Resolvent {
 public:
  Resolvent(const TransferOperator& op, const SpectralData& spectral);

  GridFunction solve(const GridFunction& w, double tol = 1e-9, double mean_tol = 1e-8) const;
  const SpectralData& spectral() const { return spectral_; }

 private:
  TransferOperator op_;
  SpectralData spectral_;
  double scale_ = 1.0;
  std::vector<double> dual_hat_;
  std::vector<double> lu_;  // column-major
  std::vector<int> pivots_;
};

GridFunction resolvent_solve(const TransferOperator& op, const SpectralData& spectral,
                             const GridFunction& w, double tol = 1e-9);

// Binary dump: "XFER", u32 M, u32 flags, u32 reserved, then (M+1)^2 doubles,
// little-endian, row-major. flags bit 0: non-default weight.
struct MatrixDump {
  std::uint32_t grid_size = 0;
  std::uint32_t flags = 0;
  std::vector<double> data;
};

void write_matrix_dump(const TransferOperator& op, std::ostream& os);
void write_matrix_dump(const TransferOperator& op, const std::filesystem::path& path);
MatrixDump read_matrix_dump(const std::filesystem::path& path);

}  // namespace saltus
