#include "unpred/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "unpred/errors.hpp"

namespace unpred {

LuDecomposition::LuDecomposition(const Matrix& a, double relative_pivot_tol) : lu_(a) {
  require(a.is_square(), "linalg", "LU factorization needs a square matrix");
  const std::size_t n = a.rows();
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double threshold = relative_pivot_tol * norm_inf(a);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(lu_(r, k)) > best) {
        best = std::abs(lu_(r, k));
        p = r;
      }
    }
    if (best <= threshold || best == 0.0) {
      throw SingularMatrixError("linalg: matrix is singular at pivot " + std::to_string(k) +
                                    " (|pivot| = " + std::to_string(best) + ")",
                                k);
    }
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const double pivot = lu_(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = lu_(r, k) / pivot;
      lu_(r, k) = f;
      if (f == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
    }
  }
}

Vector LuDecomposition::solve(std::span<const double> rhs) const {
  const std::size_t n = size();
  require(rhs.size() == n, "linalg", "right-hand side has the wrong length");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
    x[i] /= lu_(i, i);
  }
  return x;
}

Matrix LuDecomposition::solve(const Matrix& rhs) const {
  Matrix out(rhs.rows(), rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) out.set_column(c, solve(rhs.column(c)));
  return out;
}

Matrix LuDecomposition::inverse() const { return solve(Matrix::identity(size())); }

double LuDecomposition::determinant() const {
  double d = sign_;
  for (std::size_t i = 0; i < size(); ++i) d *= lu_(i, i);
  return d;
}

Vector solve_linear(const Matrix& m, std::span<const double> rhs) { return LuDecomposition(m).solve(rhs); }

Matrix invert(const Matrix& m) { return LuDecomposition(m).inverse(); }

Matrix expm(const Matrix& m, double t) {
  require(m.is_square(), "linalg", "expm needs a square matrix");
  const std::size_t n = m.rows();
  Matrix a = m * t;
  const double norm = norm_1(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  if (squarings > 0) a *= std::ldexp(1.0, -squarings);

  constexpr int kDegree = 6;
  Matrix num = Matrix::identity(n);
  Matrix den = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  double c = 1.0;
  for (int k = 1; k <= kDegree; ++k) {
    c *= static_cast<double>(kDegree - k + 1) / static_cast<double>(k * (2 * kDegree - k + 1));
    power = power * a;
    num += power * c;
    den += power * ((k % 2) ? -c : c);
  }
  Matrix r = LuDecomposition(den, 0.0).solve(num);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

std::vector<double> characteristic_polynomial(const Matrix& m) {
  require(m.is_square(), "linalg", "characteristic polynomial needs a square matrix");
  const std::size_t n = m.rows();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Matrix mk(n, n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix next = m * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    const Matrix am = m * mk;
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    c[n - k] = -tr / static_cast<double>(k);
  }
  return c;
}

namespace {

using cd = std::complex<double>;

cd horner(const std::vector<double>& a, cd z) {
  cd v = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * z + a[i];
  return v;
}

cd horner_derivative(const std::vector<double>& a, cd z) {
  cd v = 0.0;
  for (std::size_t i = a.size(); i-- > 1;) v = v * z + a[i] * static_cast<double>(i);
  return v;
}

std::vector<cd> quadratic_roots(double b, double c) {
  // z^2 + b z + c with the cancellation-free formulation.
  const double disc = 0.25 * b * b - c;
  if (disc >= 0.0) {
    const double r = -0.5 * b - std::copysign(std::sqrt(disc), b);
    if (r == 0.0) return {0.0, 0.0};
    return {cd(r), cd(c / r)};
  }
  const double im = std::sqrt(-disc);
  return {cd(-0.5 * b, -im), cd(-0.5 * b, im)};
}

void sort_spectrum(std::vector<cd>& v) {
  std::sort(v.begin(), v.end(), [](cd a, cd b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  std::vector<double> a = coeffs;
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  const std::size_t deg = a.size() - 1;
  if (deg == 0) return {};
  const double lead = a.back();
  for (double& x : a) x /= lead;
  if (deg == 1) return {cd(-a[0])};
  if (deg == 2) {
    auto r = quadratic_roots(a[1], a[0]);
    sort_spectrum(r);
    return r;
  }

  // Aberth-Ehrlich simultaneous iteration, starting on a circle sized by
  // the Cauchy bound.
  double bound = 0.0;
  for (std::size_t i = 0; i < deg; ++i) bound = std::max(bound, std::abs(a[i]));
  bound += 1.0;
  std::vector<cd> z(deg);
  for (std::size_t k = 0; k < deg; ++k) {
    const double ang = 2.0 * M_PI * (static_cast<double>(k) + 0.25) / static_cast<double>(deg) + 0.4;
    z[k] = std::polar(0.5 * bound, ang);
  }
  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < deg; ++k) {
      const cd p = horner(a, z[k]);
      const cd dp = horner_derivative(a, z[k]);
      if (p == 0.0) continue;
      const cd ratio = p / dp;
      cd sum = 0.0;
      for (std::size_t j = 0; j < deg; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cd step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (max_step < 1e-16) break;
  }
  // Newton polish and conjugate-pair cleanup.
  for (cd& r : z) {
    for (int i = 0; i < 3; ++i) {
      const cd dp = horner_derivative(a, r);
      if (std::abs(dp) == 0.0) break;
      r -= horner(a, r) / dp;
    }
    if (std::abs(r.imag()) <= 1e-14 * std::max(1.0, std::abs(r))) r = cd(r.real(), 0.0);
  }
  sort_spectrum(z);
  return z;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  require(m.is_square(), "linalg", "eigenvalues need a square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return {};
  if (n == 1) return {cd(m(0, 0))};
  if (n == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    auto r = quadratic_roots(-tr, det);
    sort_spectrum(r);
    return r;
  }
  if (n <= 4) return polynomial_roots(characteristic_polynomial(m));

  Eigen::MatrixXd em(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) em(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(em, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("linalg: eigenvalue iteration did not converge");
  std::vector<cd> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
  sort_spectrum(out);
  return out;
}

double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& z : eigenvalues(m)) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace unpred
