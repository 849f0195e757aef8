#include <cmath>
#include <numbers>

#include "doctest.h"
#include "unpred/detect.hpp"
#include "unpred/errors.hpp"
#include "unpred/forcing.hpp"
#include "unpred/pipeline.hpp"

using namespace unpred;

namespace {

constexpr double kPi = std::numbers::pi;

DetectTarget sine_target(double lo = 0.0, double hi = 1e5) {
  VectorSignal s(1, [](double t, std::span<double> out) { out[0] = std::sin(t); }, 1.0, Domain{lo, hi});
  return target_from_signal(s);
}

std::vector<std::size_t> naive_returns(const LogisticOrbit& o, std::size_t window, double tol, std::size_t count) {
  std::vector<std::size_t> out;
  for (std::size_t m = 1; m + window <= o.size() && out.size() < count; ++m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < window; ++i) worst = std::max(worst, std::abs(o[i + m] - o[i]));
    if (worst <= tol) out.push_back(m);
  }
  return out;
}

}  // namespace

TEST_CASE("return shifts: stable fixed point") {
  const LogisticOrbit o = logistic_iterate(0.6, 2.5, 200);
  const auto s = find_return_shifts(o, 50, 1e-12, 5);
  CHECK(s == std::vector<std::size_t>{1, 2, 3, 4, 5});
}

TEST_CASE("return shifts: period-2 orbit") {
  const LogisticOrbit o = logistic_iterate(0.5, 3.2, 3000);
  ShiftSearch search;
  search.first_index = 1000;  // past the transient
  search.window_len = 50;
  search.return_tol = 1e-9;
  search.count = 6;
  const auto r = find_return_shifts(o, search);
  CHECK(r.shifts == std::vector<std::size_t>{2, 4, 6, 8, 10, 12});
}

TEST_CASE("return shifts: chaotic orbit against an exhaustive scan") {
  const LogisticOrbit o = logistic_iterate(0.5, 3.91, 200000);
  const auto fast = find_return_shifts(o, 5, 1e-3, 5);
  const auto slow = naive_returns(o, 5, 1e-3, 5);
  CHECK(fast == slow);
  // Frozen regression values for seed 0.5, mu 3.91.
  CHECK(fast == std::vector<std::size_t>{1022, 1241, 1928, 2281, 2990});
}

TEST_CASE("return shifts: 50-long windows in 1e6 iterates") {
  const LogisticOrbit o = logistic_iterate(0.5, 3.91, 1000000);
  const auto s = find_return_shifts(o, 50, 1e-3, 5);
  CHECK(s == naive_returns(o, 50, 1e-3, 5));
  // Frozen regression values: only two qualify.
  CHECK(s == std::vector<std::size_t>{120684, 909560});

  // At a tolerance nothing reaches, the search reports its best near-miss.
  ShiftSearch search;
  search.return_tol = 1e-5;
  const ShiftSearchResult r = find_return_shifts(o, search);
  CHECK(r.shifts.empty());
  CHECK(r.best_shift > 0);
  CHECK(r.best_error > 1e-5);
  CHECK(r.examined == 1000000 - 50);
  CHECK(r.diagnostic.find("near-miss") != std::string::npos);
}

TEST_CASE("return shifts: period filter and shift limits") {
  const LogisticOrbit o = logistic_iterate(0.6, 2.5, 2000);
  ShiftSearch search;
  search.window_len = 10;
  search.return_tol = 1e-9;
  search.count = 3;
  search.period = kPi / 5;
  search.period_tol = 1e-2;
  const auto r = find_return_shifts(o, search);
  REQUIRE(r.shifts.size() == 3);
  for (std::size_t m : r.shifts) {
    const double k = std::round(static_cast<double>(m) / (kPi / 5));
    CHECK(std::abs(static_cast<double>(m) - k * kPi / 5) <= 1e-2);
  }
  search.period.reset();
  search.min_shift = 7;
  search.max_shift = 8;
  search.count = 5;
  CHECK(find_return_shifts(o, search).shifts == std::vector<std::size_t>{7, 8});
}

TEST_CASE("poisson check: periodic signal and identity shift") {
  const DetectTarget s = sine_target();
  const std::vector<double> shifts{2 * kPi, 4 * kPi, 6 * kPi, 8 * kPi};
  const PoissonResult r = poisson_check(s, shifts, 0.0, 10.0, 1e-2);
  for (double d : r.divergences) CHECK(d <= 1e-12);
  CHECK(r.pass);
  CHECK(r.passing == 4);
  const std::vector<double> zero{0.0};
  const PoissonResult z = poisson_check(s, zero, 0.0, 10.0, 1e-2);
  CHECK(z.divergences == std::vector<double>{0.0});
  const std::vector<double> bad{1.0, 2.0};
  const PoissonResult f = poisson_check(s, bad, 0.0, 10.0, 1e-2);
  CHECK_FALSE(f.pass);
  CHECK(f.running_min[1] <= f.running_min[0]);
  CHECK_THROWS_AS(poisson_check(sine_target(0.0, 20.0), shifts, 0.0, 10.0, 1e-2), DomainError);
}

TEST_CASE("poisson check: Theta inherits orbit returns with filter gain 1/2") {
  ThetaParams p;
  p.orbit_length = 300000;
  const ThetaSource src = make_theta_source(p);
  const VectorSignal g = theta_signal(src.theta, src.burn_in);
  // Shifts of the orbit that match on the indices feeding Theta on [0, 1].
  ShiftSearch search;
  search.first_index = 90;
  search.window_len = 12;
  search.return_tol = 1e-2;
  search.count = 3;
  const auto r = find_return_shifts(*src.orbit, search);
  REQUIRE(r.shifts.size() == 3);
  std::vector<double> shifts(r.shifts.begin(), r.shifts.end());
  const PoissonResult pr = poisson_check(target_from_signal(g), shifts, 0.0, 1.0, 1e-3);
  // Older differences decay like e^{-2 * 10}.
  for (double d : pr.divergences) CHECK(d <= 1e-2 / 2 + 0.5 * std::exp(-2.0 * 10));
}

TEST_CASE("separation scan: sine shifted by pi") {
  const DetectTarget s = sine_target();
  const std::vector<double> shifts{kPi};
  const std::vector<double> deltas{kPi / 4};
  const SeparationResult r = separation_scan(s, shifts, 0.0, 2 * kPi, deltas, kPi / 400);
  CHECK(r.epsilon0 >= std::sqrt(2.0) * (1 - 1e-6));
  CHECK(r.delta == kPi / 4);
  const double u = std::fmod(r.u[0], kPi);
  CHECK(u == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(r.pass);
}

TEST_CASE("separation scan: constants never separate, periods neither") {
  const Vector c{0.7};
  const DetectTarget k = target_from_signal(constant_signal(c));
  const std::vector<double> shifts{3.0, 5.0, 9.0};
  const std::vector<double> deltas{0.05, 0.1, 0.25, 0.5};
  const SeparationResult r = separation_scan(k, shifts, 0.0, 100.0, deltas, 1e-2);
  CHECK(r.epsilon0 == 0.0);
  CHECK_FALSE(r.pass);
  const std::vector<double> none;
  CHECK_THROWS_AS(separation_scan(k, none, 0.0, 100.0, deltas, 1e-2), ConfigError);
  const std::vector<double> wide{30.0};
  CHECK_THROWS_AS(separation_scan(k, shifts, 0.0, 100.0, wide, 1e-2), ConfigError);
}

TEST_CASE("u_n lies in the n-th sub-window") {
  const DetectTarget s = sine_target();
  const std::vector<double> shifts{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> deltas{0.1};
  const SeparationResult r = separation_scan(s, shifts, 0.0, 40.0, deltas, 1e-2);
  REQUIRE(r.u.size() == 4);
  for (std::size_t n = 0; n < 4; ++n) {
    CHECK(r.u[n] - 0.1 >= 10.0 * static_cast<double>(n) - 1e-9);
    CHECK(r.u[n] + 0.1 <= 10.0 * static_cast<double>(n + 1) + 1e-9);
  }
  for (std::size_t n = 0; n < 4; ++n) CHECK(r.separation[n] >= r.epsilon0);
}

TEST_CASE("verify_unpredictable: periodic signal passes Poisson, fails separation") {
  DetectConfig c;
  c.explicit_shifts = {2 * kPi, 4 * kPi, 6 * kPi};
  c.window_length = 100.0;
  c.lipschitz_budget = 1.01;
  const DetectionReport rep = verify_unpredictable(sine_target(), nullptr, c);
  CHECK(rep.poisson.pass);
  CHECK_FALSE(rep.separation.pass);
  CHECK(rep.bounded_pass);
  CHECK(rep.continuity_pass);
  CHECK_FALSE(rep.unpredictable());
  CHECK_THROWS_AS(verify_unpredictable(sine_target(), nullptr, DetectConfig{}), ConfigError);
}

TEST_CASE("verify_unpredictable: Theta, Lemma 1 invariance and grid refinement") {
  ThetaParams p;
  p.orbit_length = 400000;
  const ThetaSource src = make_theta_source(p);
  const VectorSignal th = theta_signal(src.theta, src.burn_in);
  const std::optional<VectorSignal> parts[2] = {th, std::nullopt};
  const VectorSignal g = stack(parts);
  DetectConfig c;
  c.orbit_time_offset = src.burn_in;
  c.window_length = 2000.0;
  c.lipschitz_budget = 2.0;
  const DetectionReport base = verify_unpredictable(target_from_signal(g), src.orbit.get(), c);
  REQUIRE(base.shifts.size() == 5);
  CHECK(base.poisson.pass);
  CHECK(base.separation.pass);
  CHECK(base.unpredictable());
  for (std::size_t i = 1; i < base.shifts.size(); ++i) CHECK(base.shifts[i] > base.shifts[i - 1]);

  const Matrix b{{2.0, 1.0}, {1.0, 3.0}};
  DetectConfig same = c;
  same.explicit_shifts = base.shifts;
  const DetectionReport tr = verify_unpredictable(target_from_signal(linear_transform(g, b)), nullptr, same);
  CHECK(tr.poisson.pass == base.poisson.pass);
  CHECK(tr.separation.pass == base.separation.pass);
  const double slack = c.lipschitz_budget * c.sample_step;
  CHECK(tr.separation.epsilon0 >= base.separation.epsilon0 / norm_2(b) - slack);

  DetectConfig fine = same;
  fine.sample_step = c.sample_step / 2;
  const DetectionReport rf = verify_unpredictable(target_from_signal(g), nullptr, fine);
  CHECK(rf.separation.epsilon0 <= base.separation.epsilon0 + base.lipschitz_estimate * c.sample_step);
}

TEST_CASE("verify_unpredictable: domain room and lookback") {
  ThetaParams p;
  p.orbit_length = 2000;
  const ThetaSource src = make_theta_source(p);
  const DetectTarget t = target_from_signal(theta_signal(src.theta, src.burn_in));
  DetectConfig c;
  c.orbit_time_offset = src.burn_in;
  CHECK_THROWS_AS(verify_unpredictable(t, src.orbit.get(), c), DomainError);
  c.window_length = 100.0;
  c.orbit_time_offset = 2.0;
  CHECK_THROWS_AS(verify_unpredictable(t, src.orbit.get(), c), ConfigError);
}
