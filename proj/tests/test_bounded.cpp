#include <cmath>
#include <numbers>

#include "doctest.h"
#include "unpred/bounded.hpp"
#include "unpred/errors.hpp"
#include "unpred/forcing.hpp"
#include "unpred/pipeline.hpp"
#include "unpred/sim.hpp"

using namespace unpred;

namespace {

double max_gap(const BoundedSolution& a, const BoundedSolution& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) s += std::pow(a.value(k)[i] - b.value(k)[i], 2);
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

BoundedOptions opts(double tol, double step = 1e-3, std::size_t stride = 1) {
  BoundedOptions o;
  o.tol = tol;
  o.step = step;
  o.record_stride = stride;
  return o;
}

}  // namespace

TEST_CASE("truncation horizon") {
  CHECK(truncation_horizon(1, 1, 1, 8 / std::exp(10.0)) == doctest::Approx(10.0).epsilon(1e-14));
  const double t1 = truncation_horizon(2, 0.5, 3, 1e-6);
  const double t2 = truncation_horizon(2, 0.5, 3, 2e-6);
  CHECK(t1 - t2 == doctest::Approx(std::log(2.0) / 0.5).epsilon(1e-12));
  const double T = truncation_horizon(1, 1, 131, 1e-6);
  CHECK(T == doctest::Approx(std::log(1.048e9)).epsilon(1e-4));
  CHECK(T == doctest::Approx(20.77).epsilon(1e-3));
  // The tail integral of 2 M K e^{-alpha s} from T to infinity, numerically.
  double tail = 0.0;
  const double ds = 1e-3;
  for (double s = T; s < T + 40; s += ds) tail += 2 * 131 * (std::exp(-s) + std::exp(-(s + ds))) / 2 * ds;
  CHECK(tail <= 1e-6 / 4 * (1 + 1e-6));
  CHECK(tail_bound(1, 1, 131, T) == doctest::Approx(1e-6 / 4));
  CHECK(truncation_horizon(1, 1, 0, 1e-6) == 0.0);
  CHECK(truncation_horizon(1, 1, 1e-9, 1e-6) == 0.0);
  CHECK_THROWS_AS(truncation_horizon(0.5, 1, 1, 1e-6), ConfigError);
  CHECK_THROWS_AS(truncation_horizon(1, 0, 1, 1e-6), ConfigError);
  CHECK_THROWS_AS(truncation_horizon(1, 1, 1, 0), ConfigError);
}

TEST_CASE("steady state of a stable scalar system") {
  const Vector one{1.0};
  BoundedSolution sol = bounded_solution(spectral_split(Matrix{{-1.0}}), constant_signal(one), 0.0, 5.0, opts(1e-9));
  for (std::size_t k = 0; k < sol.size(); ++k) REQUIRE(std::abs(sol.value(k)[0] - 1.0) <= 1e-8);
  CHECK(residual_certificate(sol, 1e-3).max_residual <= 1e-10);
  CHECK(sol.certificate().residual_points > 0);
  CHECK(sol.certificate().T_plus == 0.0);
  CHECK(sol.certificate().T_minus > 0.0);
}

TEST_CASE("steady state of an unstable scalar system") {
  const Vector one{1.0};
  BoundedSolution sol = bounded_solution(spectral_split(Matrix{{1.0}}), constant_signal(one), 0.0, 5.0, opts(1e-9));
  for (std::size_t k = 0; k < sol.size(); ++k) REQUIRE(std::abs(sol.value(k)[0] + 1.0) <= 1e-8);
  CHECK(sol.certificate().T_minus == 0.0);
  CHECK(sol.certificate().T_plus > 0.0);
}

TEST_CASE("steady state of a saddle") {
  // x' = A x + c with phi = -A^{-1} c
  const Matrix a{{1.0, 2.0}, {0.5, -3.0}};
  const Vector c{1.0, -2.0};
  const Vector expect = {-(-3.0 * 1.0 - 2.0 * -2.0) / -4.0, -(-0.5 * 1.0 + 1.0 * -2.0) / -4.0};
  BoundedSolution sol = bounded_solution(spectral_split(a), constant_signal(c), 0.0, 2.0, opts(1e-9));
  for (std::size_t k = 0; k < sol.size(); k += 50) {
    REQUIRE(std::abs(sol.value(k)[0] - expect[0]) <= 1e-8);
    REQUIRE(std::abs(sol.value(k)[1] - expect[1]) <= 1e-8);
  }
}

TEST_CASE("harmonic response") {
  const VectorSignal g = build_forcing("sin(10*t)", {});
  BoundedSolution sol = bounded_solution(spectral_split(Matrix{{-2.0}}), g, 0.0, 10.0, opts(1e-8));
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.size(); ++k) {
    const double t = sol.time(k);
    worst = std::max(worst, std::abs(sol.value(k)[0] - (std::sin(10 * t) - 5 * std::cos(10 * t)) / 52));
  }
  CHECK(worst <= 1e-6);
  // between grid points through the interpolant
  for (double t = 0.0005; t < 10.0; t += 0.0137)
    REQUIRE(std::abs(sol.evaluate(t)[0] - (std::sin(10 * t) - 5 * std::cos(10 * t)) / 52) <= 1e-6);
  const ResidualReport r = residual_certificate(sol, 1e-3);
  CHECK(r.max_residual <= 1e-4);
  CHECK(r.skipped == 0);
  CHECK_THROWS_AS(sol.evaluate(10.5), DomainError);
}

TEST_CASE("horizon robustness and superposition") {
  const Matrix a{{-1.0, 4.0}, {0.0, 0.5}};
  const SpectralSplit split = spectral_split(a);
  const VectorSignal g1 = build_forcing("sin(3*t), cos(t)", {});
  const VectorSignal g2 = build_forcing("2, -sin(7*t)", {});
  const VectorSignal g12 = build_forcing("sin(3*t) + 2, cos(t) - sin(7*t)", {});
  const double tol = 1e-6;
  const BoundedSolution base = bounded_solution(split, g12, 0.0, 10.0, opts(tol, 1e-3, 10));
  BoundedOptions padded = opts(tol, 1e-3, 10);
  padded.horizon_padding = 5.0;
  const BoundedSolution longer = bounded_solution(split, g12, 0.0, 10.0, padded);
  CHECK(longer.certificate().T_minus == doctest::Approx(base.certificate().T_minus + 5.0));
  CHECK(max_gap(base, longer) <= tol);

  const BoundedSolution s1 = bounded_solution(split, g1, 0.0, 10.0, opts(tol, 1e-3, 10));
  const BoundedSolution s2 = bounded_solution(split, g2, 0.0, 10.0, opts(tol, 1e-3, 10));
  double worst = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k)
    worst = std::max(worst, std::hypot(s1.value(k)[0] + s2.value(k)[0] - base.value(k)[0],
                                       s1.value(k)[1] + s2.value(k)[1] - base.value(k)[1]));
  CHECK(worst <= 2 * tol);
}

TEST_CASE("periodic forcing gives a periodic response") {
  const double tol = 1e-6;
  const VectorSignal g = build_forcing("sin(10*t), cos(10*t)", {});
  const BoundedSolution sol = bounded_solution(spectral_split(example1_matrix()), g, 0.0, 5.0, opts(tol));
  const double p = 2 * std::numbers::pi / 10;
  double worst = 0.0;
  for (double t = 0.0; t + p <= 5.0; t += 0.01) {
    const Vector a = sol.evaluate(t), b = sol.evaluate(t + p);
    worst = std::max(worst, std::hypot(a[0] - b[0], a[1] - b[1]));
  }
  CHECK(worst <= 10 * tol);
}

TEST_CASE("solutions are attracted to the bounded solution") {
  const Matrix a = example1_matrix();
  const SpectralSplit split = spectral_split(a);
  const VectorSignal g = build_forcing("sin(10*t) + 3, cos(4*t)", {});
  const BoundedSolution sol = bounded_solution(split, g, 0.0, 10.0, opts(1e-9, 1e-3, 10));
  const Vector x0{2.0, -1.5};
  const Trajectory tr = rk4_integrate(a, g, 0.0, x0, 1e-3, 10000, 10);
  REQUIRE(tr.size() == sol.size());
  const double d0 = std::hypot(x0[0] - sol.value(0)[0], x0[1] - sol.value(0)[1]);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double d = std::hypot(tr.state(k)[0] - sol.value(k)[0], tr.state(k)[1] - sol.value(k)[1]);
    REQUIRE(d <= split.K() * std::exp(-split.alpha() * tr.time(k)) * d0 * 1.01);
  }
  CHECK(sol.envelope() >= 0.0);
}

TEST_CASE("theta-driven system: residual, envelope, domain") {
  ThetaParams p;
  p.orbit_length = 400;
  const ThetaSource src = make_theta_source(p);
  const VectorSignal g = build_forcing(kExample1Forcing, ForcingContext{src.theta, src.burn_in});
  const SpectralSplit split = spectral_split(example1_matrix());
  BoundedSolution sol = bounded_solution(split, g, 0.0, 50.0, opts(1e-6));
  const ResidualReport r = residual_certificate(sol, 1e-3);
  CHECK(r.max_residual <= 1e-2);
  CHECK(r.skipped >= 49);
  double sup = 0.0;
  for (std::size_t k = 0; k < sol.size(); ++k) sup = std::max(sup, vec_norm(sol.value(k)));
  CHECK(sup <= sol.envelope());
  CHECK(sol.envelope() == doctest::Approx(bounded_envelope(split, g.sup_bound())));
  // The burn-in covers the stable horizon, but not a window starting earlier.
  CHECK_THROWS_AS(bounded_solution(split, g, -95.0, 0.0, opts(1e-6)), DomainError);
  CHECK_THROWS_AS(bounded_solution(split, g, 250.0, 301.0, opts(1e-6)), DomainError);
}

TEST_CASE("capped horizon is reported") {
  BoundedOptions o = opts(1e-6, 1e-3, 10);
  o.max_horizon = 50.0;
  const Vector c{1.0, 1.0};
  const BoundedSolution sol = bounded_solution(spectral_split(Matrix{{-1.0, 0.0}, {0.0, 0.01}}), constant_signal(c),
                                               0.0, 1.0, o);
  CHECK(sol.certificate().horizon_capped);
  CHECK(sol.certificate().T_plus == doctest::Approx(50.0));
  CHECK(sol.certificate().tail_bound > 1e-6);
  // The backward run starts at t_hi + T = 51.
  CHECK(sol.value(0)[1] == doctest::Approx(-100.0 * (1 - std::exp(-0.51))).epsilon(1e-6));
}

TEST_CASE("stiffness guard refines the step or gives up") {
  const Vector c{1.0};
  const BoundedSolution sol =
      bounded_solution(spectral_split(Matrix{{-5000.0}}), constant_signal(c), 0.0, 0.1, opts(1e-8, 1e-3));
  CHECK(sol.certificate().h_minus * 5000.0 <= 0.5);
  CHECK(sol.value(0)[0] == doctest::Approx(1.0 / 5000.0).epsilon(1e-8));
  CHECK_THROWS_AS(bounded_solution(spectral_split(Matrix{{-1e10}}), constant_signal(c), 0.0, 0.1, opts(1e-6)),
                  NumericalError);
}

TEST_CASE("input validation") {
  const Vector c{1.0};
  const SpectralSplit split = spectral_split(Matrix{{-1.0}});
  CHECK_THROWS_AS(bounded_solution(split, constant_signal(c), 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(bounded_solution(split, zero_signal(2), 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(bounded_solution(split, constant_signal(c), 0.0, 1.0, opts(0.0)), ConfigError);
  BoundedSolution tiny = bounded_solution(split, constant_signal(c), 0.0, 0.001, opts(1e-6));
  CHECK_THROWS_AS(residual_certificate(tiny, 1e-3), ConfigError);
}
