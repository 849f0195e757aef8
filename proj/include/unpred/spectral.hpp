#pragma once

#include <complex>
#include <vector>

#include "unpred/matrix.hpp"

namespace unpred {

struct SignResult {
  Matrix sign;
  int iterations = 0;
  double residual = 0.0;  // ||S^2 - I||_F at exit
};

/// Matrix sign function by the Newton iteration S <- (S + S^{-1}) / 2,
/// started from S = A. Throws NumericalError when the iteration does not
/// reach ||S^2 - I|| <= 1e-12 (relative to max(1, ||S||^2)) within
/// `max_iterations`, or when an iterate becomes singular: both mean an
/// eigenvalue sits on (or too close to) the imaginary axis.
SignResult matrix_sign(const Matrix& a, int max_iterations = 100);

/// Exponential dichotomy constants for the split blocks:
///   ||e^{A_- t}|| <= K e^{-alpha t},  t >= 0
///   ||e^{A_+ t}|| <= K e^{ alpha t},  t <= 0
struct DichotomyConstants {
  double K = 1.0;          // sampled maximum inflated by 1.1, at least 1
  double K_sampled = 1.0;  // before inflation
  double alpha = 0.0;      // 0.99 * min |Re lambda| over both blocks
  double alpha_minus = 0.0;  // same, restricted to the stable block
  double alpha_plus = 0.0;   // same, restricted to the unstable block
};

/// Block decomposition x = B y with B^{-1} A B = diag(A_minus, A_plus).
struct SpectralSplit {
  Matrix A;
  Matrix B;
  Matrix Binv;
  Matrix Aminus;  // q x q, eigenvalues in the open left half-plane
  Matrix Aplus;   // (n-q) x (n-q), eigenvalues in the open right half-plane
  std::size_t q = 0;
  std::vector<std::complex<double>> eig_minus;
  std::vector<std::complex<double>> eig_plus;
  DichotomyConstants constants;
  int sign_iterations = 0;

  std::size_t dimension() const noexcept { return A.rows(); }
  double K() const noexcept { return constants.K; }
  double alpha() const noexcept { return constants.alpha; }
};

inline constexpr double kDefaultGapTol = 1e-10;
inline constexpr double kDefaultDichotomyHorizon = 20.0;

/// Splits a hyperbolic matrix into stable and unstable blocks through the
/// spectral projector (I - sign(A)) / 2. The first q columns of B are an
/// orthonormal basis of the stable subspace and the remaining columns an
/// orthonormal basis of the unstable one.
///
/// Throws NumericalError ("not hyperbolic") if the sign iteration fails or
/// if some block eigenvalue has |Re lambda| < gap_tol.
SpectralSplit spectral_split(const Matrix& a, double gap_tol = kDefaultGapTol,
                             double dichotomy_horizon = kDefaultDichotomyHorizon);

/// Samples ||e^{A_- t}|| e^{alpha_- t} and ||e^{-A_+ t}|| e^{alpha_+ t} on
/// geometric grids over [0, H] and returns the smallest K that covers the
/// samples, then inflated by 1.1. H is sample_horizon or, for non-normal
/// blocks, far enough out to pass the peak of the polynomial factor.
DichotomyConstants dichotomy_constants(const SpectralSplit& split, double sample_horizon);

/// Violations of the structural split invariants, for diagnostics and tests.
struct SplitDefects {
  double inverse_defect = 0.0;    // ||B Binv - I|| / (||B|| ||Binv||)
  double off_block_defect = 0.0;  // ||off-diagonal blocks of Binv A B|| / ||A||
};
SplitDefects split_defects(const SpectralSplit& split);

}  // namespace unpred
