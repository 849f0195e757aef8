#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unpred/signals.hpp"

namespace unpred {

/// A signal as seen by the detector: something that can be sampled on
/// uniform grids. Samples are written component-major: component c of
/// sample k goes to out[c * count + k].
struct DetectTarget {
  using Sampler = std::function<void(double t0, double step, std::size_t count, std::span<double> out)>;

  std::size_t dim = 1;
  Domain domain;
  double sup_bound = 0.0;
  Sampler sample;
  std::string description;
};

/// Samples a VectorSignal point by point.
DetectTarget target_from_signal(const VectorSignal& g);

// ---------------------------------------------------------------------------
// Return shifts of a discrete orbit

struct ShiftSearch {
  std::size_t window_len = 50;
  double return_tol = 1e-3;
  std::size_t count = 5;
  /// Compare psi_{first_index + i + m} with psi_{first_index + i}.
  std::size_t first_index = 0;
  std::size_t min_shift = 1;
  /// Largest admissible shift (0 = limited by the orbit length only).
  std::size_t max_shift = 0;
  /// Keep only shifts within period_tol of a multiple of `period`, so a
  /// periodic summand with that period is also nearly invariant.
  std::optional<double> period;
  double period_tol = 0.0;
};

struct ShiftSearchResult {
  std::vector<std::size_t> shifts;
  /// Best candidate seen (smallest window error), reported when nothing
  /// qualifies.
  std::size_t best_shift = 0;
  double best_error = 0.0;
  std::size_t examined = 0;
  std::string diagnostic;
};

ShiftSearchResult find_return_shifts(const LogisticOrbit& orbit, const ShiftSearch& search);

/// Shifts m with max_{0 <= i < window_len} |psi_{i+m} - psi_i| <= return_tol.
std::vector<std::size_t> find_return_shifts(const LogisticOrbit& orbit, std::size_t window_len, double return_tol,
                                            std::size_t count);

// ---------------------------------------------------------------------------
// Poisson stability and separation

struct PoissonResult {
  std::vector<double> divergences;  // d_n
  std::vector<double> running_min;
  std::size_t passing = 0;  // number of d_n <= threshold
  double threshold = 0.0;
  bool pass = false;
};

/// d_n = max over t = a + k step in [a, b] of ||theta(t + t_n) - theta(t)||.
/// Passes when the running minimum of d_n ends at or below pass_tol and at
/// least `min_passing` shifts have d_n <= pass_tol.
PoissonResult poisson_check(const DetectTarget& target, std::span<const double> shifts, double a, double b,
                            double sample_step, double pass_tol = 1e-2, std::size_t min_passing = 1);

struct SeparationResult {
  std::vector<double> u;           // u_n, one per shift
  std::vector<double> separation;  // measured min over [u_n - delta, u_n + delta]
  double epsilon0 = 0.0;
  double delta = 0.0;
  /// epsilon0 obtained for each entry of the delta grid.
  std::vector<double> epsilon_by_delta;
  double threshold = 0.0;
  bool pass = false;
};

/// For every delta in the grid and every shift t_n, finds the u in the n-th
/// of N equal sub-windows of [a, b] that maximizes the sampled minimum of
/// ||theta(t + t_n) - theta(t)|| over [u - delta, u + delta]; epsilon0(delta)
/// is the minimum over n. Returns the delta with the largest epsilon0.
/// Throws ConfigError for an empty shift list or sub-windows shorter than
/// 2 delta.
SeparationResult separation_scan(const DetectTarget& target, std::span<const double> shifts, double a, double b,
                                 std::span<const double> delta_grid, double sample_step, double epsilon_min = 1e-3);

// ---------------------------------------------------------------------------
// Composite verification

enum class ThresholdScale {
  absolute,  // pass_tol and epsilon_min are absolute
  sup_norm,  // both are multiplied by the sampled sup norm of the target
};

struct DetectConfig {
  // Shift search on the driving orbit.
  double return_tol = 1e-2;
  std::size_t shift_count = 5;
  std::size_t min_shifts = 3;
  /// Orbit indices compared before the start of the Poisson window; covers
  /// the memory of the smoothing filter / the system.
  std::size_t lookback = 4;
  std::optional<double> period;
  double period_tol = 0.0;
  /// Signal time t corresponds to orbit index t + orbit_time_offset.
  double orbit_time_offset = 0.0;
  /// Used instead of the orbit search when non-empty.
  std::vector<double> explicit_shifts;

  // Windows (signal time).
  double poisson_start = 0.0;
  double poisson_length = 1.0;
  double window_start = 0.0;
  double window_length = 1e4;
  double sample_step = 1e-2;

  // Thresholds.
  double pass_tol = 1e-2;
  double epsilon_min = 1e-3;
  std::vector<double> delta_grid{0.05, 0.1, 0.25, 0.5};
  ThresholdScale threshold_scale = ThresholdScale::absolute;
  /// Uniform-continuity surrogate: largest admissible sampled difference
  /// quotient (infinite = not checked).
  double lipschitz_budget = std::numeric_limits<double>::infinity();
};

struct DetectionReport {
  std::vector<double> shifts;
  ShiftSearchResult search;
  PoissonResult poisson;
  SeparationResult separation;
  double scale = 1.0;  // threshold multiplier
  double sampled_sup = 0.0;
  double lipschitz_estimate = 0.0;
  bool bounded_pass = false;
  bool continuity_pass = false;
  DetectConfig config;
  std::string description;

  bool unpredictable() const noexcept {
    return poisson.pass && separation.pass && bounded_pass && continuity_pass;
  }
};

/// find_return_shifts -> poisson_check -> separation_scan, plus boundedness
/// and continuity surrogates. `orbit` may be null when explicit shifts are
/// configured.
DetectionReport verify_unpredictable(const DetectTarget& target, const LogisticOrbit* orbit,
                                     const DetectConfig& config);

}  // namespace unpred
