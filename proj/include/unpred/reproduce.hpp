#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "unpred/config.hpp"
#include "unpred/detect.hpp"
#include "unpred/io.hpp"
#include "unpred/pipeline.hpp"

namespace unpred {

/// Detector settings for the bounded solution of the first reproduction
/// system (driven by Theta and a period-pi/5 harmonic). Thresholds are
/// relative to the sampled sup norm of the solution.
DetectConfig example1_detect_config();

/// Orbit length that leaves room for the shift search of
/// example1_detect_config() beyond a separation window of `window_length`.
std::size_t example1_orbit_length(double window_length);

struct ReproduceOptions {
  ThetaParams signal;          // orbit_length 0 = chosen automatically
  double t_end = 200.0;        // simulate and solve on [0, t_end]
  double h = 1e-3;             // first system
  std::size_t stride = 10;     // records every 0.01
  double h_stiff = 8e-6;       // second system, below 0.5 / 52098
  std::size_t stride_stiff = 1250;
  double tol = 1e-6;
  bool run_detector = true;
  std::optional<DetectConfig> detect;  // default: example1_detect_config() on [0, t_end]
  std::filesystem::path out_dir = "out";
  OutputParams output;
};

struct ReproduceResult {
  std::vector<std::filesystem::path> artifacts;
  double envelope = 0.0;        // a-priori bound for the trajectory
  double max_norm = 0.0;        // largest recorded ||x(t)||
  bool within_envelope = false;
  std::optional<DetectionReport> report;
  Json summary;
};

ReproduceResult reproduce_example1(const ReproduceOptions& options);
ReproduceResult reproduce_example2(const ReproduceOptions& options);

}  // namespace unpred
