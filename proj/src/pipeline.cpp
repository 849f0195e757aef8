#include "unpred/pipeline.hpp"

#include <cmath>

#include "unpred/errors.hpp"

namespace unpred {

ThetaSource make_theta_source(const ThetaParams& p) {
  require(p.burn_in >= 0.0, "signals", "burn-in must be non-negative");
  require(p.orbit_length > 0, "signals", "orbit length must be positive");
  ThetaSource src;
  src.orbit = std::make_shared<const LogisticOrbit>(logistic_iterate(p.seed, p.mu, p.orbit_length));
  src.theta = std::make_shared<const ThetaSignal>(theta_build(src.orbit, p.gamma));
  src.burn_in = p.burn_in;
  return src;
}

double bounded_envelope(const SpectralSplit& split, double g_sup) {
  const double km = split.K() * norm_2(split.Binv) * g_sup;
  double e = 0.0;
  if (split.q > 0) e += km / split.constants.alpha_minus;
  if (split.q < split.dimension()) e += km / split.constants.alpha_plus;
  return norm_2(split.B) * e;
}

namespace {

/// Horizon used by bounded_solution for one block (before rounding to cells).
double block_horizon(const SpectralSplit& split, double alpha, double M, const BoundedOptions& o) {
  if (!std::isfinite(alpha)) return 0.0;
  return std::min(truncation_horizon(split.K(), alpha, M, o.tol), o.max_horizon) + o.horizon_padding;
}

}  // namespace

DetectTarget target_from_bounded(const SpectralSplit& split, const VectorSignal& g, const BoundedOptions& options) {
  require(g.dimension() == split.dimension(), "bounded", "forcing dimension must match the system dimension");
  const double M = norm_2(split.Binv) * g.sup_bound();
  const double tm = split.q > 0 ? block_horizon(split, split.constants.alpha_minus, M, options) : 0.0;
  const double tp = split.q < split.dimension() ? block_horizon(split, split.constants.alpha_plus, M, options) : 0.0;
  // One output cell of slack each side for the rounding of horizons to cells.
  const double slack = 1.0;

  DetectTarget t;
  t.dim = split.dimension();
  t.domain = Domain{g.domain().lo + tm + slack, g.domain().hi - tp - slack};
  t.sup_bound = bounded_envelope(split, g.sup_bound());
  t.description = "bounded solution of x' = A x + " + g.description;
  t.sample = [split, g, options](double t0, double step, std::size_t count, std::span<double> out) {
    const std::size_t n = split.dimension();
    BoundedOptions o = options;
    const double ratio = step / options.step;
    const double stride = std::round(ratio);
    const bool aligned = stride >= 1.0 && std::abs(ratio - stride) <= 1e-9 * ratio;
    o.record_stride = aligned ? static_cast<std::size_t>(stride) : 1;
    const double t1 = t0 + static_cast<double>(count - 1) * step;
    const BoundedSolution sol = bounded_solution(split, g, t0, count > 1 ? t1 : t0, o);
    Vector v(n);
    for (std::size_t k = 0; k < count; ++k) {
      if (aligned && k < sol.size()) {
        const auto x = sol.value(k);
        for (std::size_t c = 0; c < n; ++c) out[c * count + k] = x[c];
      } else {
        sol.evaluate(std::min(t0 + static_cast<double>(k) * step, sol.t_hi()), v);
        for (std::size_t c = 0; c < n; ++c) out[c * count + k] = v[c];
      }
    }
  };
  return t;
}

Matrix example1_matrix() { return Matrix{{-2.0, 2.0}, {1.0, -3.0}}; }

Vector example1_x0() { return {0.18, 0.01}; }

Matrix example2_matrix() { return Matrix{{-52098.0, 0.0}, {9.5, 3.25e-8}}; }

}  // namespace unpred
