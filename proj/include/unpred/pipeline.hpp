#pragma once

#include <memory>

#include "unpred/bounded.hpp"
#include "unpred/detect.hpp"
#include "unpred/signals.hpp"
#include "unpred/spectral.hpp"

namespace unpred {

struct ThetaParams {
  double seed = 0.5;
  double mu = 3.91;
  double gamma = 2.0;
  std::size_t orbit_length = 1000;
  /// Signals use Theta(t + burn_in) so the initialization transient is gone.
  double burn_in = 100.0;
};

struct ThetaSource {
  std::shared_ptr<const LogisticOrbit> orbit;
  std::shared_ptr<const ThetaSignal> theta;
  double burn_in = 0.0;
};

ThetaSource make_theta_source(const ThetaParams& p);

/// Detector view of the bounded solution of x' = A x + g: every sampling
/// request computes the bounded solution on exactly the requested window,
/// so arbitrarily distant shifted windows cost only their own length plus
/// the truncation horizons.
///
/// The sample step should be a multiple of options.step so samples are
/// grid values; other steps fall back to Hermite interpolation.
DetectTarget target_from_bounded(const SpectralSplit& split, const VectorSignal& g, const BoundedOptions& options);

/// ||B|| sum_b K M / alpha_b with M = ||B^{-1}|| sup ||g||.
double bounded_envelope(const SpectralSplit& split, double g_sup);

// Systems of the reproduction set.
Matrix example1_matrix();  // [[-2, 2], [1, -3]]
inline constexpr const char* kExample1Forcing = "259*theta - sin(10*t), -150*theta + cos(10*t)";
Vector example1_x0();      // (0.18, 0.01)
Matrix example2_matrix();  // [[-52098, 0], [9.5, 3.25e-8]]
/// Coefficients of the driven second system: u' = A2 u + (7090 x_2, 0.111 x_1).
inline constexpr double kExample2Gain1 = 7090.0;
inline constexpr double kExample2Gain2 = 0.111;

}  // namespace unpred
