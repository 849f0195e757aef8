#include "unpred/signals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unpred/errors.hpp"
#include "unpred/linalg.hpp"

namespace unpred {

LogisticOrbit logistic_iterate(double seed, double mu, std::size_t count) {
  require(seed > 0.0 && seed < 1.0, "signals", "logistic seed must lie in (0, 1)");
  require(mu > 0.0 && mu <= 4.0, "signals", "logistic parameter mu must lie in (0, 4]");
  require(count > 0, "signals", "logistic orbit length must be positive");
  LogisticOrbit orbit;
  orbit.mu_ = mu;
  orbit.values_.resize(count);
  double x = seed;
  for (std::size_t i = 0; i < count; ++i) {
    orbit.values_[i] = x;
    x = mu * x * (1.0 - x);
  }
  return orbit;
}

StepSignal::StepSignal(std::shared_ptr<const LogisticOrbit> orbit) : orbit_(std::move(orbit)) {
  require(orbit_ && orbit_->size() > 0, "signals", "step signal needs a non-empty orbit");
}

double StepSignal::operator()(double t) const {
  if (!(t >= 0.0 && t < domain_end()))
    throw DomainError("signals: Omega evaluated at t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(domain_end()) + ")");
  return (*orbit_)[static_cast<std::size_t>(t)];
}

ThetaSignal theta_build(std::shared_ptr<const LogisticOrbit> orbit, double decay, std::optional<double> theta0) {
  require(decay > 0.0 && std::isfinite(decay), "signals", "Theta decay rate must be positive");
  ThetaSignal theta{StepSignal(std::move(orbit))};
  const auto psi = theta.step_.orbit().values();
  const double psi_max = *std::max_element(psi.begin(), psi.end());
  const double start = theta0.value_or(psi.front() / decay);
  require(start >= 0.0 && start <= psi_max / decay * (1.0 + 1e-12), "signals",
          "theta0 must lie in [0, max psi / decay]");

  theta.decay_ = decay;
  theta.node_decay_ = std::exp(-decay);
  theta.node_gain_ = -std::expm1(-decay) / decay;
  theta.sup_ = std::max(start, psi_max / decay);
  theta.nodes_.resize(psi.size() + 1);
  theta.nodes_[0] = start;
  for (std::size_t i = 0; i < psi.size(); ++i)
    theta.nodes_[i + 1] = theta.node_decay_ * theta.nodes_[i] + psi[i] * theta.node_gain_;
  return theta;
}

double ThetaSignal::operator()(double t) const {
  const double end = domain_end();
  // Grid times t0 + k h may overshoot an endpoint by a few ulps.
  const double slack = 1e-12 * std::max(1.0, end);
  if (t > end && t <= end + slack) t = end;
  if (t < 0.0 && t >= -slack) t = 0.0;
  if (!(t >= 0.0 && t <= end))
    throw DomainError("signals: Theta evaluated at t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(end) + "]");
  if (t == end) return nodes_.back();
  const double fl = std::floor(t);
  const auto i = static_cast<std::size_t>(fl);
  const double tau = t - fl;
  if (tau == 0.0) return nodes_[i];
  // e^{-g tau} Theta(i) + psi_i (1 - e^{-g tau}) / g
  const double gain = -std::expm1(-decay_ * tau);
  return (1.0 - gain) * nodes_[i] + step_.orbit()[i] * gain / decay_;
}

double theta_eval(const ThetaSignal& theta, double t) { return theta(t); }

VectorSignal::VectorSignal(std::size_t dim, Evaluator eval, double sup_bound, Domain domain,
                           std::optional<double> period, std::optional<double> kink_spacing)
    : dim_(dim),
      eval_(std::move(eval)),
      sup_(sup_bound),
      domain_(domain),
      period_(period),
      kink_spacing_(kink_spacing) {
  require(dim_ > 0, "signals", "signal dimension must be positive");
  require(sup_ >= 0.0, "signals", "signal sup bound must be non-negative");
  require(domain_.lo <= domain_.hi, "signals", "signal domain is empty");
  require(!period_ || *period_ > 0.0, "signals", "signal period must be positive");
}

void VectorSignal::evaluate(double t, std::span<double> out) const {
  if (!domain_.contains(t))
    throw DomainError("signals: signal evaluated at t = " + std::to_string(t) + " outside its domain [" +
                      std::to_string(domain_.lo) + ", " + std::to_string(domain_.hi) + "]");
  eval_(t, out);
}

Vector VectorSignal::operator()(double t) const {
  Vector v(dim_);
  evaluate(t, v);
  return v;
}

VectorSignal zero_signal(std::size_t dim) {
  VectorSignal s(
      dim, [](double, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); }, 0.0);
  s.description = "0";
  return s;
}

VectorSignal constant_signal(std::span<const double> value) {
  Vector v(value.begin(), value.end());
  const double m = vec_norm(v);
  VectorSignal s(
      v.size(), [v](double, std::span<double> out) { std::copy(v.begin(), v.end(), out.begin()); }, m);
  s.description = "constant";
  return s;
}

VectorSignal theta_signal(std::shared_ptr<const ThetaSignal> theta, double offset) {
  require(theta != nullptr, "signals", "theta signal needs a Theta");
  const Domain dom{-offset, theta->domain_end() - offset};
  const double sup = theta->sup_bound();
  VectorSignal s(
      1, [theta = std::move(theta), offset](double t, std::span<double> out) { out[0] = (*theta)(t + offset); }, sup,
      dom, std::nullopt, 1.0);
  s.description = "theta";
  return s;
}

VectorSignal stack(std::span<const std::optional<VectorSignal>> scalars) {
  require(!scalars.empty(), "signals", "cannot stack zero components");
  std::vector<std::optional<VectorSignal>> parts(scalars.begin(), scalars.end());
  Domain dom;
  double sup2 = 0.0;
  std::optional<double> kink;
  for (const auto& p : parts) {
    if (!p) continue;
    require(p->dimension() == 1, "signals", "stacked components must be scalar signals");
    dom.lo = std::max(dom.lo, p->domain().lo);
    dom.hi = std::min(dom.hi, p->domain().hi);
    sup2 += p->sup_bound() * p->sup_bound();
    if (p->kink_spacing()) kink = p->kink_spacing();
  }
  VectorSignal s(
      parts.size(),
      [parts](double t, std::span<double> out) {
        double v = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          if (parts[i]) {
            parts[i]->evaluate_unchecked(t, std::span<double>(&v, 1));
            out[i] = v;
          } else {
            out[i] = 0.0;
          }
        }
      },
      std::sqrt(sup2), dom, std::nullopt, kink);
  s.description = "stack";
  return s;
}

VectorSignal linear_transform(const VectorSignal& g, const Matrix& b) {
  require(b.is_square() && b.rows() == g.dimension(), "signals",
          "linear transform matrix must be square and match the signal dimension");
  const Matrix binv = invert(b);
  const std::size_t n = g.dimension();
  VectorSignal out(
      n,
      [g, binv, n](double t, std::span<double> y) {
        double buf[64];
        std::vector<double> heap;
        std::span<double> x(buf, n);
        if (n > 64) {
          heap.resize(n);
          x = heap;
        }
        g.evaluate_unchecked(t, x);
        multiply_into(binv, x, y);
      },
      norm_2(binv) * g.sup_bound(), g.domain(), g.period(), g.kink_spacing());
  out.description = "inv(B)*(" + g.description + ")";
  return out;
}

double periodicity_defect(const VectorSignal& p, int points) {
  require(p.period().has_value(), "signals", "signal has no declared period");
  const double period = *p.period();
  const double t0 = std::isfinite(p.domain().lo) ? p.domain().lo : 0.0;
  require(p.domain().covers(t0, t0 + 2.0 * period), "signals", "periodic signal domain shorter than two periods");
  Vector a(p.dimension()), b(p.dimension());
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = t0 + period * static_cast<double>(k) / static_cast<double>(points);
    p.evaluate(t, a);
    p.evaluate(t + period, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

VectorSignal add_periodic(const VectorSignal& g, const VectorSignal& p) {
  require(g.dimension() == p.dimension(), "signals", "periodic term dimension does not match the signal");
  require(p.period().has_value(), "signals", "periodic term must declare its period");
  const double defect = periodicity_defect(p);
  require(defect <= 1e-12, "signals",
          "periodic term failed the periodicity check (defect " + std::to_string(defect) + " > 1e-12)");
  const std::size_t n = g.dimension();
  Domain dom{std::max(g.domain().lo, p.domain().lo), std::min(g.domain().hi, p.domain().hi)};
  VectorSignal out(
      n,
      [g, p, n](double t, std::span<double> y) {
        double buf[64];
        std::vector<double> heap;
        std::span<double> z(buf, n);
        if (n > 64) {
          heap.resize(n);
          z = heap;
        }
        g.evaluate_unchecked(t, y);
        p.evaluate_unchecked(t, z);
        for (std::size_t i = 0; i < n; ++i) y[i] += z[i];
      },
      g.sup_bound() + p.sup_bound(), dom, std::nullopt, g.kink_spacing());
  out.description = "(" + g.description + ")+(" + p.description + ")";
  return out;
}

double sampled_sup(const VectorSignal& g, double a, double b, double step) {
  Vector v(g.dimension());
  double best = 0.0;
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    g.evaluate(a + static_cast<double>(k) * step, v);
    best = std::max(best, vec_norm(v));
  }
  return best;
}

}  // namespace unpred
