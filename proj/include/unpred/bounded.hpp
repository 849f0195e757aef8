#pragma once

#include <vector>

#include "unpred/signals.hpp"
#include "unpred/spectral.hpp"

namespace unpred {

/// Horizon T = ln(8 M K / (alpha tol)) / alpha at which the neglected tail
/// 2 M K e^{-alpha T} / alpha of either convolution integral equals tol / 4.
/// Returns 0 when the tail is already below tol / 4 at T = 0.
double truncation_horizon(double K, double alpha, double M, double tol);

/// Tail bound 2 M K e^{-alpha T} / alpha left after truncating at T.
double tail_bound(double K, double alpha, double M, double T);

struct BoundedOptions {
  double tol = 1e-6;
  /// Requested integrator step; refined by halving until the stability guard
  /// holds for each block. Should divide 1 so that integer times (where
  /// Omega jumps) are grid points.
  double step = 1e-3;
  /// Output spacing is step * record_stride.
  std::size_t record_stride = 1;
  /// Horizons are capped here; the certificate reports the resulting tail.
  double max_horizon = 1e4;
  /// Added to both computed horizons (uniqueness checks).
  double horizon_padding = 0.0;
};

struct BoundedCertificate {
  double T_minus = 0.0;
  double T_plus = 0.0;
  double h_minus = 0.0;
  double h_plus = 0.0;
  double K = 1.0;
  double alpha = 0.0;
  double M = 0.0;  // sup bound of B^{-1} g
  double tail_bound = 0.0;
  bool horizon_capped = false;
  double max_residual = -1.0;  // filled by residual_certificate; -1 = not computed
  std::size_t residual_points = 0;
  std::size_t residual_skipped = 0;
  double T() const noexcept { return T_minus > T_plus ? T_minus : T_plus; }
};

/// The bounded solution of x' = A x + g(t) on a window, stored on the
/// uniform output grid t_lo + k * spacing and evaluable in between by cubic
/// Hermite interpolation (node slopes from the vector field).
class BoundedSolution {
 public:
  std::size_t dimension() const noexcept { return dim_; }
  double t_lo() const noexcept { return t_lo_; }
  double t_hi() const noexcept { return t_lo_ + spacing_ * static_cast<double>(count_ - 1); }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return count_; }
  double time(std::size_t k) const noexcept { return t_lo_ + spacing_ * static_cast<double>(k); }
  std::span<const double> value(std::size_t k) const { return {values_.data() + k * dim_, dim_}; }

  /// phi(t) for t in [t_lo, t_hi]; throws DomainError elsewhere.
  Vector evaluate(double t) const;
  void evaluate(double t, std::span<double> out) const;

  /// ||phi(t)|| <= ||B|| 2 K M / alpha, the a-priori envelope.
  double envelope() const;

  const SpectralSplit& split() const noexcept { return split_; }
  const VectorSignal& forcing() const noexcept { return g_; }
  const BoundedCertificate& certificate() const noexcept { return cert_; }
  BoundedCertificate& certificate() noexcept { return cert_; }
  double tol() const noexcept { return tol_; }

 private:
  friend BoundedSolution bounded_solution(const SpectralSplit&, const VectorSignal&, double, double,
                                          const BoundedOptions&);
  BoundedSolution(SpectralSplit split, VectorSignal g) : split_(std::move(split)), g_(std::move(g)) {}
  SpectralSplit split_;
  VectorSignal g_;
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  double t_lo_ = 0.0;
  double spacing_ = 0.0;
  double tol_ = 0.0;
  std::vector<double> values_;
  BoundedCertificate cert_;
};

/// Computes phi = B (phi_-, phi_+) on [t_lo, t_hi]:
///  - phi_- integrates y' = A_- y + f_-(s) forward from t_lo - T_- with y = 0,
///  - phi_+ integrates y' = A_+ y + f_+(s) backward from t_hi + T_+ with y = 0,
/// where f = B^{-1} g and T_-/T_+ are the truncation horizons of each block.
///
/// Throws DomainError if g does not cover [t_lo - T_-, t_hi + T_+] and
/// NumericalError if the stability guard would need a step below 1e-9.
BoundedSolution bounded_solution(const SpectralSplit& split, const VectorSignal& g, double t_lo, double t_hi,
                                 const BoundedOptions& options = {});

struct ResidualReport {
  double max_residual = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;  // stencils straddling a derivative jump of g
};

/// Max over interior grid points t of
///   || (phi(t + h) - phi(t - h)) / (2 h) - A phi(t) - g(t) ||
/// with h = grid_step. Also stores the result in the solution's certificate.
ResidualReport residual_certificate(BoundedSolution& sol, double grid_step);

}  // namespace unpred
