#include <algorithm>
#include <cmath>
#include <cstddef>

#include "saltus/errors.hpp"
#include "saltus/simd.hpp"
#include "saltus/transfer.hpp"

extern "C" {
void dgetrf_(const int* m, const int* n, double* a, const int* lda, int* ipiv, int* info);
void dgetrs_(const char* trans, const int* n, const int* nrhs, const double* a, const int* lda,
             const int* ipiv, double* b, const int* ldb, int* info, std::size_t trans_len);
}

namespace saltus {

Resolvent::Resolvent(const TransferOperator& op, const SpectralData& spectral)
    : op_(op), spectral_(spectral) {
  // Collocation conserves mass only up to O(h) when jumps fall inside cells,
  // so A is rescaled by its leading eigenvalue.
  if (std::fabs(spectral_.leading_eigenvalue - 1.0) > 1e-3) {
    throw NumericalError("resolvent: leading eigenvalue is not 1");
  }
  scale_ = 1.0 / spectral_.leading_eigenvalue;
  const std::size_t n = op_.size();
  const auto rho = spectral_.density.values();
  const double norm = simd::dot(spectral_.dual, rho);
  dual_hat_.resize(n);
  for (std::size_t i = 0; i < n; ++i) dual_hat_[i] = spectral_.dual[i] / norm;

  const std::vector<double> a = op_.dense_row_major();
  lu_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      lu_[j * n + i] = (i == j ? 1.0 : 0.0) - scale_ * a[i * n + j] + rho[i] * dual_hat_[j];
    }
  }
  pivots_.resize(n);
  const int N = static_cast<int>(n);
  int info = 0;
  dgetrf_(&N, &N, lu_.data(), &N, pivots_.data(), &info);
  if (info != 0) throw NumericalError("resolvent: singular LU factorization");
}

GridFunction Resolvent::solve(const GridFunction& w, double tol, double mean_tol) const {
  const std::size_t n = op_.size();
  if (w.size() != n) throw DomainError("resolvent: size mismatch");
  const auto wv = w.values();
  const double mean = spectral_.pairing(wv);
  if (std::fabs(mean) > mean_tol * std::max(1.0, simd::max_abs(wv))) {
    throw ValidationError("resolvent: right-hand side is not mean-zero");
  }
  const int N = static_cast<int>(n), one = 1;
  const char trans = 'N';
  int info = 0;
  auto lu_solve = [&](std::vector<double>& b) {
    dgetrs_(&trans, &N, &one, lu_.data(), &N, pivots_.data(), b.data(), &N, &info, 1);
    if (info != 0) throw NumericalError("resolvent: dgetrs failed");
  };
  // residual r = w - (I - A / lambda + rho dual_hat^T) u
  auto residual = [&](const std::vector<double>& u) {
    std::vector<double> au(n), r(n);
    op_.apply(u, au);
    const double m = simd::dot(dual_hat_, u);
    const auto rho = spectral_.density.values();
    for (std::size_t i = 0; i < n; ++i) r[i] = wv[i] - (u[i] - scale_ * au[i] + rho[i] * m);
    return r;
  };
  std::vector<double> u(wv.begin(), wv.end());
  lu_solve(u);
  std::vector<double> r = residual(u);
  lu_solve(r);
  simd::axpy(1.0, r, u);
  r = residual(u);
  const double res = simd::max_abs(r);
  if (res > tol * std::max(1.0, simd::max_abs(wv))) {
    throw NumericalError("resolvent: residual " + std::to_string(res) + " above tolerance");
  }
  return GridFunction(std::move(u));
}

GridFunction resolvent_solve(const TransferOperator& op, const SpectralData& spectral,
                             const GridFunction& w, double tol) {
  return Resolvent(op, spectral).solve(w, tol);
}

}  // namespace saltus
