#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unpred/matrix.hpp"

namespace unpred {

/// Orbit psi_0 .. psi_{N-1} of the logistic map psi_{i+1} = mu psi_i (1 - psi_i).
class LogisticOrbit {
 public:
  double mu() const noexcept { return mu_; }
  double seed() const noexcept { return values_.empty() ? 0.0 : values_.front(); }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  friend LogisticOrbit logistic_iterate(double seed, double mu, std::size_t count);
  double mu_ = 0.0;
  std::vector<double> values_;
};

/// Iterates the logistic map `count` times from `seed` (the seed is psi_0).
/// Requires 0 < seed < 1 and 0 < mu <= 4 so that the orbit stays in [0, 1].
LogisticOrbit logistic_iterate(double seed, double mu, std::size_t count);

/// Omega(t) = psi_i for t in [i, i + 1).
class StepSignal {
 public:
  explicit StepSignal(std::shared_ptr<const LogisticOrbit> orbit);
  double operator()(double t) const;
  /// Omega is defined on [0, size()).
  double domain_end() const noexcept { return static_cast<double>(orbit_->size()); }
  const LogisticOrbit& orbit() const noexcept { return *orbit_; }
  std::shared_ptr<const LogisticOrbit> shared_orbit() const noexcept { return orbit_; }

 private:
  std::shared_ptr<const LogisticOrbit> orbit_;
};

/// Theta(t) = theta0 e^{-gamma t} + int_0^t e^{-gamma (t - s)} Omega(s) ds,
/// the one-sided version of the smoothed logistic signal. Node values
/// Theta(i) are cached through the exact recursion
///   Theta(i+1) = e^{-gamma} Theta(i) + psi_i (1 - e^{-gamma}) / gamma.
class ThetaSignal {
 public:
  double operator()(double t) const;
  double node(std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  double decay() const noexcept { return decay_; }
  double theta0() const noexcept { return nodes_.front(); }
  /// Theta is defined on [0, domain_end()] with domain_end() = orbit length.
  double domain_end() const noexcept { return static_cast<double>(nodes_.size() - 1); }
  /// Tight a-priori bound max(theta0, max psi / gamma).
  double sup_bound() const noexcept { return sup_; }
  const StepSignal& step() const noexcept { return step_; }

 private:
  friend ThetaSignal theta_build(std::shared_ptr<const LogisticOrbit>, double, std::optional<double>);
  explicit ThetaSignal(StepSignal step) : step_(std::move(step)) {}
  StepSignal step_;
  double decay_ = 2.0;
  double node_decay_ = 0.0;  // e^{-gamma}
  double node_gain_ = 0.0;   // (1 - e^{-gamma}) / gamma
  double sup_ = 0.0;
  std::vector<double> nodes_;
};

/// Builds Theta from an orbit. `theta0` defaults to psi_0 / decay.
ThetaSignal theta_build(std::shared_ptr<const LogisticOrbit> orbit, double decay = 2.0,
                        std::optional<double> theta0 = std::nullopt);

/// Throws DomainError outside [0, theta.domain_end()].
double theta_eval(const ThetaSignal& theta, double t);

struct Domain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
  bool covers(double a, double b) const noexcept { return a >= lo && b <= hi; }
};

/// Vector-valued signal g : [lo, hi] -> R^n with a declared bound M on its
/// Euclidean norm.
///
/// `kink_spacing`, when set, marks a lattice (multiples of the spacing)
/// where the first derivative may jump; consumers that difference the
/// signal avoid stencils straddling those points.
class VectorSignal {
 public:
  using Evaluator = std::function<void(double t, std::span<double> out)>;

  VectorSignal(std::size_t dim, Evaluator eval, double sup_bound, Domain domain = {},
               std::optional<double> period = std::nullopt, std::optional<double> kink_spacing = std::nullopt);

  std::size_t dimension() const noexcept { return dim_; }
  double sup_bound() const noexcept { return sup_; }
  const Domain& domain() const noexcept { return domain_; }
  std::optional<double> period() const noexcept { return period_; }
  std::optional<double> kink_spacing() const noexcept { return kink_spacing_; }

  /// Checked evaluation; throws DomainError outside the domain.
  void evaluate(double t, std::span<double> out) const;
  Vector operator()(double t) const;
  /// Unchecked evaluation for hot loops that validated the range up front.
  void evaluate_unchecked(double t, std::span<double> out) const { eval_(t, out); }

  std::string description;

 private:
  std::size_t dim_;
  Evaluator eval_;
  double sup_;
  Domain domain_;
  std::optional<double> period_;
  std::optional<double> kink_spacing_;
};

VectorSignal zero_signal(std::size_t dim);
VectorSignal constant_signal(std::span<const double> value);

/// Wraps a scalar Theta as a one-component signal t -> Theta(t + offset).
VectorSignal theta_signal(std::shared_ptr<const ThetaSignal> theta, double offset = 0.0);

/// Embeds scalar components into R^n: component i is `scalars[i]` (empty
/// entries are identically zero).
VectorSignal stack(std::span<const std::optional<VectorSignal>> scalars);

/// f(t) = B^{-1} g(t). The sup bound becomes ||B^{-1}|| M. Throws
/// SingularMatrixError when B is singular at the 1e-12 pivot tolerance.
VectorSignal linear_transform(const VectorSignal& g, const Matrix& b);

/// h(t) = g(t) + p(t) where p has a declared period T. Periodicity is
/// verified on a 1000-point grid to 1e-12.
VectorSignal add_periodic(const VectorSignal& g, const VectorSignal& p);

/// Largest ||p(t + T) - p(t)|| over `points` grid points of one period.
double periodicity_defect(const VectorSignal& p, int points = 1000);

/// Maximum sampled norm on [a, b] at the given step.
double sampled_sup(const VectorSignal& g, double a, double b, double step);

}  // namespace unpred
