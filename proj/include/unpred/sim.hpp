#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "unpred/matrix.hpp"
#include "unpred/signals.hpp"

namespace unpred {

/// States of x' = A x + g(t) recorded on the uniform grid t0 + k * spacing.
struct Trajectory {
  double t0 = 0.0;
  double spacing = 0.0;  // integrator step times the record stride
  std::size_t dim = 0;
  std::vector<double> states;  // row-major, record k at [k * dim, (k + 1) * dim)
  Vector x0;
  std::string description;

  std::size_t size() const noexcept { return dim ? states.size() / dim : 0; }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * spacing; }
  std::span<const double> state(std::size_t k) const { return {states.data() + k * dim, dim}; }
  double end_time() const noexcept { return size() ? time(size() - 1) : t0; }
};

/// Largest step allowed by the stability guard h * rho(A) <= 0.5.
double stable_step_limit(const Matrix& a);

/// Classical four-stage Runge-Kutta with fixed step h > 0 over `steps`
/// steps, recording every `record_stride`-th state (the first and, when
/// aligned, the last state are always on the record grid).
///
/// Throws NumericalError when h violates the stability guard and
/// DomainError when g does not cover [t0, t0 + steps * h].
Trajectory rk4_integrate(const Matrix& a, const VectorSignal& g, double t0, std::span<const double> x0, double h,
                         std::size_t steps, std::size_t record_stride = 1);

namespace detail {

using Forcing = std::function<void(double t, std::span<double> out)>;
using Sink = std::function<void(std::size_t step, double t, std::span<const double> x)>;

/// Unchecked RK4 core shared with the bounded solver. `h` may be negative
/// (backward integration). Times are t0 + k * h, never accumulated.
void rk4_run(const Matrix& a, const Forcing& forcing, double t0, std::span<const double> x0, double h,
             std::size_t steps, std::size_t record_stride, const Sink& sink);

}  // namespace detail

struct ContractionTable {
  std::vector<double> times;
  std::vector<double> gaps;  // ||x_a(t) - x_b(t)||
};

/// Integrates two solutions of the same Hurwitz system and tabulates their
/// distance. Throws NumericalError if A has an eigenvalue with Re >= 0.
ContractionTable contraction_probe(const Matrix& a, const VectorSignal& g, std::span<const double> x0a,
                                   std::span<const double> x0b, double t0, double h, std::size_t steps,
                                   std::size_t record_stride = 1);

/// Cubic Hermite interpolant of a recorded trajectory, using the vector
/// field A x + g(t) for the node derivatives. The result covers
/// [traj.t0, traj.end_time()].
VectorSignal trajectory_signal(const Trajectory& traj, const Matrix& a, const VectorSignal& g);

}  // namespace unpred
