#pragma once

#include <complex>
#include <vector>

#include "unpred/matrix.hpp"

namespace unpred {

/// Partial-pivoted LU factorization, P A = L U.
///
/// A pivot whose magnitude falls below `relative_pivot_tol * ||A||_inf`
/// makes the constructor throw SingularMatrixError carrying the offending
/// pivot index.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& a, double relative_pivot_tol = 1e-12);

  std::size_t size() const noexcept { return lu_.rows(); }
  Vector solve(std::span<const double> rhs) const;
  Matrix solve(const Matrix& rhs) const;
  Matrix inverse() const;
  double determinant() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

Vector solve_linear(const Matrix& m, std::span<const double> rhs);
Matrix invert(const Matrix& m);

/// e^{M t} by scaling and squaring around a diagonal [6/6] Pade core. The
/// scaling power is chosen so that ||M t||_1 / 2^s <= 0.5.
Matrix expm(const Matrix& m, double t = 1.0);

/// Coefficients c_0..c_n of det(lambda I - M) = sum c_k lambda^k (c_n = 1),
/// by the Faddeev-LeVerrier recursion. Intended for n <= 4.
std::vector<double> characteristic_polynomial(const Matrix& m);

/// Roots of a real polynomial given by ascending coefficients.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

/// Eigenvalues of a square matrix, sorted by real part then imaginary part.
/// n <= 4 goes through the characteristic polynomial; larger matrices use a
/// Hessenberg-QR eigensolver.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

double spectral_radius(const Matrix& m);

}  // namespace unpred
