#include "unpred/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "unpred/errors.hpp"
#include "unpred/linalg.hpp"

namespace unpred {

namespace {

constexpr double kSignTol = 1e-12;
// Pivot threshold used inside the sign iteration. The iterates of a stiff
// but hyperbolic matrix can be extremely ill-conditioned (Example: eigenvalues
// -5e4 and 3e-8), so only numerically zero pivots count as singular.
constexpr double kSignPivotTol = 64.0 * std::numeric_limits<double>::epsilon();

double sign_residual(const Matrix& s) {
  Matrix r = s * s;
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) -= 1.0;
  return norm_fro(r);
}

// Orthonormal basis of the range of `p` with `k` columns, by modified
// Gram-Schmidt with column pivoting on the remaining norms.
Matrix orthonormal_range(const Matrix& p, std::size_t k) {
  const std::size_t n = p.rows();
  std::vector<Vector> cols;
  cols.reserve(p.cols());
  for (std::size_t c = 0; c < p.cols(); ++c) cols.push_back(p.column(c));
  std::vector<bool> used(cols.size(), false);

  Matrix basis(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t best = cols.size();
    double best_norm = -1.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (used[c]) continue;
      const double nrm = vec_norm(cols[c]);
      if (nrm > best_norm) {
        best_norm = nrm;
        best = c;
      }
    }
    if (best == cols.size() || best_norm <= 0.0)
      throw NumericalError("linalg: spectral projector has lower rank than its trace (not hyperbolic)");
    used[best] = true;
    Vector v = cols[best];
    // Re-orthogonalize against the accepted basis once more.
    for (std::size_t i = 0; i < j; ++i) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += basis(r, i) * v[r];
      for (std::size_t r = 0; r < n; ++r) v[r] -= dot * basis(r, i);
    }
    const double nrm = vec_norm(v);
    for (double& x : v) x /= nrm;
    basis.set_column(j, v);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (used[c]) continue;
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += v[r] * cols[c][r];
      for (std::size_t r = 0; r < n; ++r) cols[c][r] -= dot * v[r];
    }
  }
  return basis;
}

double min_abs_real(const std::vector<std::complex<double>>& eig) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& z : eig) m = std::min(m, std::abs(z.real()));
  return m;
}

// log ||e^{M t}|| + alpha t, evaluated without overflowing e^{alpha t}.
double scaled_log_norm(const Matrix& m, double t, double alpha) {
  const double nrm = norm_2(expm(m, t));
  return std::log(nrm) + alpha * std::abs(t);
}

}  // namespace

SignResult matrix_sign(const Matrix& a, int max_iterations) {
  require(a.is_square() && !a.empty(), "linalg", "matrix sign needs a non-empty square matrix");
  require(a.all_finite(), "linalg", "matrix entries must be finite");
  Matrix s = a;
  SignResult out;
  double previous_change = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= max_iterations; ++k) {
    Matrix sinv;
    try {
      sinv = LuDecomposition(s, kSignPivotTol).inverse();
    } catch (const SingularMatrixError&) {
      throw NumericalError("linalg: not hyperbolic (singular iterate in the sign iteration at step " +
                           std::to_string(k) + ")");
    }
    Matrix next = (s + sinv) * 0.5;
    const double change = norm_fro(next - s);
    const double scale = std::max(1.0, norm_fro(next));
    s = std::move(next);
    const double residual = sign_residual(s);
    if (!std::isfinite(residual)) break;
    const bool converged = residual <= kSignTol * scale * scale;
    // Rounding floor for ill-conditioned eigenbases: the update has stopped
    // shrinking and the residual is already small.
    const bool stagnated = change >= previous_change && change <= 1e-10 * scale &&
                           residual <= 1e-9 * scale * scale;
    if (converged || stagnated) {
      out.sign = std::move(s);
      out.iterations = k;
      out.residual = residual;
      return out;
    }
    previous_change = change;
  }
  throw NumericalError("linalg: not hyperbolic (sign iteration did not converge in " +
                       std::to_string(max_iterations) + " steps; an eigenvalue is too close to the imaginary axis)");
}

SpectralSplit spectral_split(const Matrix& a, double gap_tol, double dichotomy_horizon) {
  require(a.is_square() && !a.empty(), "linalg", "spectral split needs a non-empty square matrix");
  require(a.rows() <= 64, "linalg", "spectral split is limited to n <= 64");
  require(gap_tol >= 0.0, "linalg", "gap tolerance must be non-negative");
  const std::size_t n = a.rows();

  const SignResult sign = matrix_sign(a);
  const Matrix identity = Matrix::identity(n);
  const Matrix p_minus = (identity - sign.sign) * 0.5;
  const Matrix p_plus = (identity + sign.sign) * 0.5;

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += p_minus(i, i);
  const double rounded = std::round(trace);
  if (std::abs(trace - rounded) > 1e-6 || rounded < 0.0 || rounded > static_cast<double>(n))
    throw NumericalError("linalg: not hyperbolic (stable projector trace " + std::to_string(trace) +
                         " is not an integer)");
  const auto q = static_cast<std::size_t>(rounded);

  SpectralSplit split;
  split.A = a;
  split.q = q;
  split.sign_iterations = sign.iterations;
  split.B = Matrix(n, n);
  if (q > 0) split.B.set_block(0, 0, orthonormal_range(p_minus, q));
  if (q < n) split.B.set_block(0, q, orthonormal_range(p_plus, n - q));
  split.Binv = invert(split.B);

  const Matrix t = split.Binv * a * split.B;
  split.Aminus = t.block(0, 0, q, q);
  split.Aplus = t.block(q, q, n - q, n - q);
  split.eig_minus = eigenvalues(split.Aminus);
  split.eig_plus = eigenvalues(split.Aplus);

  for (const auto& z : split.eig_minus)
    if (!(z.real() < -gap_tol))
      throw NumericalError("linalg: not hyperbolic (stable-block eigenvalue with real part " +
                           std::to_string(z.real()) + " inside the gap tolerance)");
  for (const auto& z : split.eig_plus)
    if (!(z.real() > gap_tol))
      throw NumericalError("linalg: not hyperbolic (unstable-block eigenvalue with real part " +
                           std::to_string(z.real()) + " inside the gap tolerance)");

  split.constants = dichotomy_constants(split, dichotomy_horizon);
  return split;
}

DichotomyConstants dichotomy_constants(const SpectralSplit& split, double sample_horizon) {
  require(sample_horizon > 0.0, "linalg", "dichotomy sample horizon must be positive");
  constexpr double kMargin = 0.01;
  constexpr double kInflation = 1.1;
  constexpr int kSamples = 240;

  DichotomyConstants dc;
  const double inf = std::numeric_limits<double>::infinity();
  dc.alpha_minus = split.eig_minus.empty() ? inf : (1.0 - kMargin) * min_abs_real(split.eig_minus);
  dc.alpha_plus = split.eig_plus.empty() ? inf : (1.0 - kMargin) * min_abs_real(split.eig_plus);
  dc.alpha = std::min(dc.alpha_minus, dc.alpha_plus);

  // Geometric grid per block from H * 1e-7 up to H; t = 0 contributes
  // exactly 1. A Jordan-type factor t^m e^{-margin |Re lambda| t} peaks at
  // t = m / (margin |Re lambda|), so each block's horizon reaches past that.
  double log_k = 0.0;
  auto sample = [&](const Matrix& block, double alpha_block, double direction) {
    const double decay = alpha_block / (1.0 - kMargin);
    const double horizon =
        std::max(sample_horizon, static_cast<double>(block.rows()) / (kMargin * decay));
    const double t_min = horizon * 1e-7;
    const double ratio = std::pow(horizon / t_min, 1.0 / (kSamples - 1));
    double t = t_min;
    for (int i = 0; i < kSamples; ++i, t *= ratio)
      log_k = std::max(log_k, scaled_log_norm(block, direction * t, alpha_block));
  };
  if (split.q > 0) sample(split.Aminus, dc.alpha_minus, 1.0);
  if (split.q < split.dimension()) sample(split.Aplus, dc.alpha_plus, -1.0);
  dc.K_sampled = std::exp(log_k);
  dc.K = std::max(1.0, kInflation * dc.K_sampled);
  return dc;
}

SplitDefects split_defects(const SpectralSplit& split) {
  const std::size_t n = split.dimension();
  const std::size_t q = split.q;
  SplitDefects d;
  Matrix bb = split.B * split.Binv;
  for (std::size_t i = 0; i < n; ++i) bb(i, i) -= 1.0;
  d.inverse_defect = norm_2(bb) / (norm_2(split.B) * norm_2(split.Binv));

  const Matrix t = split.Binv * split.A * split.B;
  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i < q) != (j < q)) off += t(i, j) * t(i, j);
  d.off_block_defect = std::sqrt(off) / norm_2(split.A);
  return d;
}

}  // namespace unpred
