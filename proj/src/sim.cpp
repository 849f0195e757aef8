#include "unpred/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unpred/errors.hpp"
#include "unpred/linalg.hpp"

namespace unpred {

double stable_step_limit(const Matrix& a) {
  const double rho = spectral_radius(a);
  return rho > 0.0 ? 0.5 / rho : std::numeric_limits<double>::infinity();
}

namespace detail {

void rk4_run(const Matrix& a, const Forcing& forcing, double t0, std::span<const double> x0, double h,
             std::size_t steps, std::size_t record_stride, const Sink& sink) {
  const std::size_t n = x0.size();
  Vector x(x0.begin(), x0.end());
  Vector k1(n), k2(n), k3(n), k4(n), tmp(n), g(n);

  auto field = [&](double t, std::span<const double> state, std::span<double> out) {
    forcing(t, g);
    multiply_into(a, state, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += g[i];
  };

  sink(0, t0, x);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const double t_next = t0 + static_cast<double>(k + 1) * h;
    const double t_mid = t + 0.5 * h;
    field(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    field(t_mid, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    field(t_mid, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    field(t_next, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if ((k + 1) % record_stride == 0) sink(k + 1, t_next, x);
  }
}

}  // namespace detail

Trajectory rk4_integrate(const Matrix& a, const VectorSignal& g, double t0, std::span<const double> x0, double h,
                         std::size_t steps, std::size_t record_stride) {
  require(a.is_square() && !a.empty(), "sim", "system matrix must be square");
  require(a.rows() == x0.size() && g.dimension() == x0.size(), "sim",
          "dimensions of A, x0 and the forcing must agree");
  require(h > 0.0 && std::isfinite(h), "sim", "step h must be positive");
  require(record_stride > 0, "sim", "record stride must be positive");
  const double limit = stable_step_limit(a);
  if (h > limit)
    throw NumericalError("sim: stability guard violated (h = " + std::to_string(h) +
                         " exceeds 0.5 / spectral radius = " + std::to_string(limit) + ")");
  const double t_end = t0 + static_cast<double>(steps) * h;
  if (!g.domain().covers(t0, t_end))
    throw DomainError("sim: forcing domain [" + std::to_string(g.domain().lo) + ", " +
                      std::to_string(g.domain().hi) + "] does not cover the integration range [" +
                      std::to_string(t0) + ", " + std::to_string(t_end) + "]");

  Trajectory traj;
  traj.t0 = t0;
  traj.spacing = h * static_cast<double>(record_stride);
  traj.dim = x0.size();
  traj.x0.assign(x0.begin(), x0.end());
  traj.states.reserve((steps / record_stride + 1) * traj.dim);
  detail::rk4_run(
      a, [&g](double t, std::span<double> out) { g.evaluate_unchecked(t, out); }, t0, x0, h, steps, record_stride,
      [&traj](std::size_t, double, std::span<const double> x) {
        traj.states.insert(traj.states.end(), x.begin(), x.end());
      });
  if (!std::all_of(traj.states.begin(), traj.states.end(), [](double v) { return std::isfinite(v); }))
    throw NumericalError("sim: trajectory became non-finite");
  traj.description = "x' = A x + " + g.description;
  return traj;
}

ContractionTable contraction_probe(const Matrix& a, const VectorSignal& g, std::span<const double> x0a,
                                   std::span<const double> x0b, double t0, double h, std::size_t steps,
                                   std::size_t record_stride) {
  require(x0a.size() == x0b.size(), "sim", "probe initial states must have equal dimension");
  for (const auto& z : eigenvalues(a))
    if (!(z.real() < 0.0))
      throw NumericalError("sim: contraction probe needs a Hurwitz matrix (eigenvalue with real part " +
                           std::to_string(z.real()) + ")");
  const Trajectory ta = rk4_integrate(a, g, t0, x0a, h, steps, record_stride);
  const Trajectory tb = rk4_integrate(a, g, t0, x0b, h, steps, record_stride);
  ContractionTable table;
  table.times.reserve(ta.size());
  table.gaps.reserve(ta.size());
  Vector d(ta.dim);
  for (std::size_t k = 0; k < ta.size(); ++k) {
    const auto xa = ta.state(k);
    const auto xb = tb.state(k);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = xa[i] - xb[i];
    table.times.push_back(ta.time(k));
    table.gaps.push_back(vec_norm(d));
  }
  return table;
}

VectorSignal trajectory_signal(const Trajectory& traj, const Matrix& a, const VectorSignal& g) {
  require(traj.size() >= 2, "sim", "trajectory interpolation needs at least two records");
  require(a.rows() == traj.dim && g.dimension() == traj.dim, "sim", "trajectory, matrix and forcing dimensions differ");
  const std::size_t n = traj.dim;
  auto values = std::make_shared<std::vector<double>>(traj.states);
  auto slopes = std::make_shared<std::vector<double>>(traj.states.size());
  Vector gv(n);
  double sup = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    g.evaluate(traj.time(k), gv);
    std::span<double> out(slopes->data() + k * n, n);
    multiply_into(a, traj.state(k), out);
    for (std::size_t i = 0; i < n; ++i) out[i] += gv[i];
    sup = std::max(sup, vec_norm(traj.state(k)));
  }
  const double t0 = traj.t0;
  const double dt = traj.spacing;
  const std::size_t last = traj.size() - 1;
  // Hermite overshoot between nodes is bounded by dt/8 * max slope; fold it
  // into the declared bound.
  double max_slope = 0.0;
  for (std::size_t k = 0; k <= last; ++k) max_slope = std::max(max_slope, vec_norm({slopes->data() + k * n, n}));
  VectorSignal s(
      n,
      [values, slopes, t0, dt, last, n](double t, std::span<double> out) {
        const double u = (t - t0) / dt;
        auto k = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(last)));
        if (k == last) k = last - 1;
        const double s = u - static_cast<double>(k);
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        const double* x0 = values->data() + k * n;
        const double* x1 = x0 + n;
        const double* d0 = slopes->data() + k * n;
        const double* d1 = d0 + n;
        for (std::size_t i = 0; i < n; ++i)
          out[i] = h00 * x0[i] + h10 * dt * d0[i] + h01 * x1[i] + h11 * dt * d1[i];
      },
      sup + dt / 8.0 * max_slope, Domain{traj.t0, traj.end_time()}, std::nullopt, g.kink_spacing());
  s.description = "trajectory";
  return s;
}

}  // namespace unpred
