#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "unpred/bounded.hpp"
#include "unpred/detect.hpp"
#include "unpred/matrix.hpp"
#include "unpred/signals.hpp"
#include "unpred/sim.hpp"
#include "unpred/spectral.hpp"

namespace unpred {

using Json = nlohmann::ordered_json;

/// Numeric table read from CSV: first column is time (strictly increasing),
/// the rest are data columns.
struct TabulatedData {
  std::vector<std::string> header;  // data column names (time column excluded)
  std::vector<double> times;
  std::vector<std::vector<double>> data;  // data[col][row]

  std::size_t columns() const noexcept { return data.size(); }
  std::size_t rows() const noexcept { return times.size(); }
  double column_max_abs(std::size_t col) const;
  /// Linear interpolation; clamps to the end values outside the table.
  double interpolate(std::size_t col, double t) const;
};

/// Reads a CSV with a header row. Throws ConfigError on I/O failure,
/// malformed numbers, ragged rows or non-increasing times.
TabulatedData read_tabulated_csv(const std::filesystem::path& path);
TabulatedData parse_tabulated_csv(std::string_view text, const std::string& origin = "<memory>");

/// All data columns of a CSV as a piecewise-linear vector signal on
/// [first time, last time].
VectorSignal read_signal_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal representation (dot decimal).
std::string format_double(double v);

/// RFC-4180-style writer: header row, comma separators, LF line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(std::span<const double> values);
  /// Row where NaN entries are written as empty fields.
  void row_with_blanks(std::span<const double> values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

void write_orbit_csv(std::ostream& out, const LogisticOrbit& orbit);
/// Samples t = a + k step, k = 0 .. floor((b - a) / step); header-only when b < a.
void write_signal_csv(std::ostream& out, const VectorSignal& g, double a, double b, double step,
                      const std::vector<std::string>& names = {});
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// Columns t, phi_1..phi_n, residual. The residual is the centered-difference
/// residual at interior grid points (empty at the ends and across kinks).
void write_bounded_csv(std::ostream& out, const BoundedSolution& sol);

/// "[[a,b],[c,d]]" inline syntax, or a path to a CSV file of rows.
Matrix parse_matrix(std::string_view text);
/// "[a,b]" or "a,b".
Vector parse_vector(std::string_view text);

Json to_json(const Matrix& m);
Json to_json(const SpectralSplit& split);
Json to_json(const BoundedCertificate& cert);
/// {shifts, divergences, u_n, epsilon0, delta, verdict, config} plus diagnostics.
Json to_json(const DetectionReport& report);
Json to_json(const DetectConfig& config);

void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace unpred
