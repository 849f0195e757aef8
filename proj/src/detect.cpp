#include "unpred/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "unpred/errors.hpp"
#include "unpred/kernels.hpp"

namespace unpred {

DetectTarget target_from_signal(const VectorSignal& g) {
  DetectTarget t;
  t.dim = g.dimension();
  t.domain = g.domain();
  t.sup_bound = g.sup_bound();
  t.description = g.description;
  t.sample = [g](double t0, double step, std::size_t count, std::span<double> out) {
    const std::size_t n = g.dimension();
    Vector v(n);
    for (std::size_t k = 0; k < count; ++k) {
      g.evaluate_unchecked(t0 + static_cast<double>(k) * step, v);
      for (std::size_t c = 0; c < n; ++c) out[c * count + k] = v[c];
    }
  };
  return t;
}

// ---------------------------------------------------------------------------

ShiftSearchResult find_return_shifts(const LogisticOrbit& orbit, const ShiftSearch& s) {
  require(s.window_len > 0, "detect", "return window length must be positive");
  require(s.return_tol >= 0.0, "detect", "return tolerance must be non-negative");
  require(s.count > 0, "detect", "shift count must be positive");
  require(s.min_shift > 0, "detect", "shifts must be positive");
  require(!s.period || (*s.period > 0.0 && s.period_tol >= 0.0), "detect",
          "period filter needs a positive period and a non-negative tolerance");
  const std::size_t n = orbit.size();
  require(s.first_index + s.window_len <= n, "detect", "orbit shorter than the comparison window");

  std::size_t upper = n - s.first_index - s.window_len;  // largest m keeping the shifted window in range
  if (s.max_shift) upper = std::min(upper, s.max_shift);

  ShiftSearchResult r;
  r.best_error = std::numeric_limits<double>::infinity();
  const auto psi = orbit.values();
  const double* base = psi.data() + s.first_index;
  for (std::size_t m = s.min_shift; m <= upper && r.shifts.size() < s.count; ++m) {
    if (s.period) {
      const double rem = std::fmod(static_cast<double>(m), *s.period);
      if (std::min(rem, *s.period - rem) > s.period_tol) continue;
    }
    ++r.examined;
    // Stop as soon as the error exceeds both the tolerance and the best
    // near-miss so far; completed scans are exact maxima.
    const double cutoff = std::max(s.return_tol, r.best_error);
    double err = 0.0;
    std::size_t i = 0;
    for (; i < s.window_len; ++i) {
      err = std::max(err, std::abs(base[i + m] - base[i]));
      if (err > cutoff) break;
    }
    if (i < s.window_len) continue;
    if (err < r.best_error) {
      r.best_error = err;
      r.best_shift = m;
    }
    if (err <= s.return_tol) r.shifts.push_back(m);
  }
  if (r.shifts.empty()) {
    std::ostringstream msg;
    msg << "no shift in [" << s.min_shift << ", " << upper << "] returns within " << s.return_tol << " over "
        << s.window_len << " iterates (" << r.examined << " candidates)";
    if (std::isfinite(r.best_error))
      msg << "; best near-miss m = " << r.best_shift << " with max deviation " << r.best_error;
    r.diagnostic = msg.str();
  }
  return r;
}

std::vector<std::size_t> find_return_shifts(const LogisticOrbit& orbit, std::size_t window_len, double return_tol,
                                            std::size_t count) {
  ShiftSearch s;
  s.window_len = window_len;
  s.return_tol = return_tol;
  s.count = count;
  return find_return_shifts(orbit, s).shifts;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t grid_count(double a, double b, double step) {
  return static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
}

void check_covered(const DetectTarget& target, double a, double b) {
  if (!target.domain.covers(a, b))
    throw DomainError("detect: signal domain [" + std::to_string(target.domain.lo) + ", " +
                      std::to_string(target.domain.hi) + "] does not cover the shifted window [" + std::to_string(a) +
                      ", " + std::to_string(b) + "]");
}

/// Statistics of the unshifted samples, accumulated across windows.
struct SampleStats {
  double sup = 0.0;
  double lipschitz = 0.0;

  void add(const kernels::KernelTable& kt, const std::vector<double>& x, std::size_t dim, std::size_t count,
           double step) {
    std::vector<double> buf(count);
    kt.pointwise_norm(x.data(), dim, count, count, buf.data());
    sup = std::max(sup, kt.max_value(buf.data(), count));
    if (count < 2) return;
    kt.pointwise_distance(x.data() + 1, x.data(), dim, count, count - 1, buf.data());
    lipschitz = std::max(lipschitz, kt.max_value(buf.data(), count - 1) / step);
  }
};

struct PoissonRaw {
  std::vector<double> d;
};

PoissonRaw poisson_raw(const DetectTarget& target, std::span<const double> shifts, double a, double b, double step,
                       SampleStats* stats) {
  require(step > 0.0, "detect", "sample step must be positive");
  require(b >= a, "detect", "Poisson window must satisfy a <= b");
  check_covered(target, a, b);
  for (double s : shifts) check_covered(target, a + s, b + s);
  const auto& kt = kernels::active_kernels();
  const std::size_t count = grid_count(a, b, step);
  const std::size_t dim = target.dim;
  std::vector<double> base(dim * count), moved(dim * count), dist(count);
  target.sample(a, step, count, base);
  if (stats) stats->add(kt, base, dim, count, step);
  PoissonRaw raw;
  for (double s : shifts) {
    target.sample(a + s, step, count, moved);
    kt.pointwise_distance(moved.data(), base.data(), dim, count, count, dist.data());
    raw.d.push_back(kt.max_value(dist.data(), count));
  }
  return raw;
}

PoissonResult poisson_finish(const PoissonRaw& raw, double pass_tol, std::size_t min_passing) {
  PoissonResult r;
  r.divergences = raw.d;
  r.threshold = pass_tol;
  double m = std::numeric_limits<double>::infinity();
  for (double d : raw.d) {
    m = std::min(m, d);
    r.running_min.push_back(m);
    if (d <= pass_tol) ++r.passing;
  }
  r.pass = !raw.d.empty() && r.running_min.back() <= pass_tol && r.passing >= min_passing;
  return r;
}

struct SeparationRaw {
  std::vector<double> deltas;
  // [delta index][shift index]
  std::vector<std::vector<double>> best_min;
  std::vector<std::vector<double>> best_u;
};

SeparationRaw separation_raw(const DetectTarget& target, std::span<const double> shifts, double a, double b,
                             std::span<const double> delta_grid, double step, SampleStats* stats) {
  require(!shifts.empty(), "detect", "separation scan needs at least one shift");
  require(!delta_grid.empty(), "detect", "delta grid must not be empty");
  require(step > 0.0, "detect", "sample step must be positive");
  require(b > a, "detect", "separation window must satisfy a < b");
  for (double d : delta_grid) require(d > 0.0, "detect", "delta values must be positive");
  const std::size_t nshift = shifts.size();
  const double sub_len = (b - a) / static_cast<double>(nshift);
  const double max_delta = *std::max_element(delta_grid.begin(), delta_grid.end());
  require(sub_len >= 2.0 * max_delta, "detect",
          "sub-windows of the separation range are shorter than 2 * delta; enlarge the window");
  check_covered(target, a, b);
  for (double s : shifts) check_covered(target, a + s, b + s);

  const auto& kt = kernels::active_kernels();
  const std::size_t dim = target.dim;
  SeparationRaw raw;
  raw.deltas.assign(delta_grid.begin(), delta_grid.end());
  raw.best_min.assign(delta_grid.size(), std::vector<double>(nshift, 0.0));
  raw.best_u.assign(delta_grid.size(), std::vector<double>(nshift, 0.0));

  for (std::size_t n = 0; n < nshift; ++n) {
    const double lo = a + static_cast<double>(n) * sub_len;
    const std::size_t count = grid_count(lo, lo + sub_len, step);
    std::vector<double> base(dim * count), moved(dim * count), dist(count), smin(count);
    target.sample(lo, step, count, base);
    target.sample(lo + shifts[n], step, count, moved);
    if (stats) stats->add(kt, base, dim, count, step);
    kt.pointwise_distance(moved.data(), base.data(), dim, count, count, dist.data());
    for (std::size_t di = 0; di < delta_grid.size(); ++di) {
      const auto w = static_cast<std::size_t>(std::floor(delta_grid[di] / step + 1e-9));
      kernels::sliding_min(kt, dist.data(), count, w, smin.data());
      const std::size_t first = w, len = count - 2 * w;
      const double best = kt.max_value(smin.data() + first, len);
      std::size_t k = first;
      while (smin[k] != best) ++k;
      raw.best_min[di][n] = best;
      raw.best_u[di][n] = lo + static_cast<double>(k) * step;
    }
  }
  return raw;
}

SeparationResult separation_finish(const SeparationRaw& raw, double epsilon_min) {
  SeparationResult r;
  r.threshold = epsilon_min;
  std::size_t best = 0;
  for (std::size_t di = 0; di < raw.deltas.size(); ++di) {
    const double e = *std::min_element(raw.best_min[di].begin(), raw.best_min[di].end());
    r.epsilon_by_delta.push_back(e);
    if (e > r.epsilon_by_delta[best]) best = di;
  }
  r.delta = raw.deltas[best];
  r.epsilon0 = r.epsilon_by_delta[best];
  r.u = raw.best_u[best];
  r.separation = raw.best_min[best];
  r.pass = r.epsilon0 >= epsilon_min;
  return r;
}

}  // namespace

PoissonResult poisson_check(const DetectTarget& target, std::span<const double> shifts, double a, double b,
                            double sample_step, double pass_tol, std::size_t min_passing) {
  return poisson_finish(poisson_raw(target, shifts, a, b, sample_step, nullptr), pass_tol, min_passing);
}

SeparationResult separation_scan(const DetectTarget& target, std::span<const double> shifts, double a, double b,
                                 std::span<const double> delta_grid, double sample_step, double epsilon_min) {
  return separation_finish(separation_raw(target, shifts, a, b, delta_grid, sample_step, nullptr), epsilon_min);
}

DetectionReport verify_unpredictable(const DetectTarget& target, const LogisticOrbit* orbit, const DetectConfig& c) {
  require(c.sample_step > 0.0, "detect", "sample step must be positive");
  require(c.poisson_length >= 0.0 && c.window_length > 0.0, "detect", "window lengths must be positive");
  require(c.pass_tol > 0.0 && c.epsilon_min > 0.0, "detect", "thresholds must be positive");
  require(c.shift_count > 0 && c.min_shifts <= c.shift_count, "detect", "need 0 < min_shifts <= shift_count");
  require(c.lipschitz_budget > 0.0, "detect", "Lipschitz budget must be positive");

  DetectionReport rep;
  rep.config = c;
  rep.description = target.description;
  const double p_lo = c.poisson_start, p_hi = c.poisson_start + c.poisson_length;
  const double w_lo = c.window_start, w_hi = c.window_start + c.window_length;

  if (!c.explicit_shifts.empty()) {
    rep.shifts = c.explicit_shifts;
    for (std::size_t i = 1; i < rep.shifts.size(); ++i)
      require(rep.shifts[i] > rep.shifts[i - 1], "detect", "explicit shifts must increase strictly");
  } else {
    require(orbit != nullptr, "detect", "shift search needs an orbit (or explicit shifts)");
    const double first = std::floor(p_lo + c.orbit_time_offset) - static_cast<double>(c.lookback);
    require(first >= 0.0, "detect", "lookback reaches before the start of the orbit; increase the burn-in");
    ShiftSearch s;
    s.first_index = static_cast<std::size_t>(first);
    s.window_len = static_cast<std::size_t>(std::floor(p_hi + c.orbit_time_offset) - first) + 1;
    s.return_tol = c.return_tol;
    s.count = c.shift_count;
    s.period = c.period;
    s.period_tol = c.period_tol;
    const double room = target.domain.hi - std::max(p_hi, w_hi);
    if (std::isfinite(room)) {
      if (room < 1.0) throw DomainError("detect: signal domain leaves no room for shifts");
      s.max_shift = static_cast<std::size_t>(std::floor(room));
    }
    rep.search = find_return_shifts(*orbit, s);
    for (std::size_t m : rep.search.shifts) rep.shifts.push_back(static_cast<double>(m));
  }

  SampleStats stats;
  const PoissonRaw praw = poisson_raw(target, rep.shifts, p_lo, p_hi, c.sample_step, &stats);
  SeparationRaw sraw;
  if (!rep.shifts.empty()) sraw = separation_raw(target, rep.shifts, w_lo, w_hi, c.delta_grid, c.sample_step, &stats);

  rep.sampled_sup = stats.sup;
  rep.lipschitz_estimate = stats.lipschitz;
  rep.scale = c.threshold_scale == ThresholdScale::sup_norm ? stats.sup : 1.0;
  rep.poisson = poisson_finish(praw, c.pass_tol * rep.scale, c.min_shifts);
  if (!rep.shifts.empty()) {
    rep.separation = separation_finish(sraw, c.epsilon_min * rep.scale);
  } else {
    rep.separation.threshold = c.epsilon_min * rep.scale;
  }
  rep.bounded_pass = stats.sup <= target.sup_bound * (1.0 + 1e-9) + 1e-12;
  rep.continuity_pass = stats.lipschitz <= c.lipschitz_budget;
  return rep;
}

}  // namespace unpred
