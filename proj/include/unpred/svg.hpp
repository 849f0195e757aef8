#pragma once

#include <string>
#include <vector>

namespace unpred {

struct SvgSeries {
  std::string label;
  std::vector<double> values;
};

/// Standalone SVG 1.1 line plot of one or more series against `t`.
/// Long series are decimated to about 4000 points per series.
std::string svg_time_series(const std::string& title, const std::vector<double>& t,
                            const std::vector<SvgSeries>& series, const std::string& xlabel = "t");

/// Standalone SVG 1.1 phase portrait (x against y).
std::string svg_phase_portrait(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                               const std::string& xlabel, const std::string& ylabel);

}  // namespace unpred
