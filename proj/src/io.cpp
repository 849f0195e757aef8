#include "unpred/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "unpred/errors.hpp"

namespace unpred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(',', start);
    out.push_back(trim(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

bool parse_number(std::string_view s, double& v) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(v);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("io: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t p = text.find('\n', start);
    if (p == std::string_view::npos) p = text.size();
    const auto line = trim(text.substr(start, p - start));
    if (!line.empty()) lines.push_back(line);
    start = p + 1;
  }
  return lines;
}

}  // namespace

double TabulatedData::column_max_abs(std::size_t col) const {
  double m = 0.0;
  for (double v : data.at(col)) m = std::max(m, std::abs(v));
  return m;
}

double TabulatedData::interpolate(std::size_t col, double t) const {
  const auto& y = data[col];
  if (t <= times.front()) return y.front();
  if (t >= times.back()) return y.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
  const double s = (t - times[k]) / (times[k + 1] - times[k]);
  return y[k] + s * (y[k + 1] - y[k]);
}

TabulatedData parse_tabulated_csv(std::string_view text, const std::string& origin) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ConfigError("io: " + origin + " is empty");
  const auto head = split_fields(lines[0]);
  if (head.size() < 2) throw ConfigError("io: " + origin + " needs a time column and at least one data column");
  TabulatedData tab;
  for (std::size_t c = 1; c < head.size(); ++c) tab.header.emplace_back(head[c]);
  tab.data.resize(head.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != head.size())
      throw ConfigError("io: " + origin + " line " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(head.size()));
    double v = 0.0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_number(fields[c], v))
        throw ConfigError("io: " + origin + " line " + std::to_string(r + 1) + ": '" + std::string(fields[c]) +
                          "' is not a finite number");
      if (c == 0) {
        if (!tab.times.empty() && !(v > tab.times.back()))
          throw ConfigError("io: " + origin + " line " + std::to_string(r + 1) + ": times must increase strictly");
        tab.times.push_back(v);
      } else {
        tab.data[c - 1].push_back(v);
      }
    }
  }
  if (tab.times.size() < 2) throw ConfigError("io: " + origin + " needs at least two data rows");
  return tab;
}

TabulatedData read_tabulated_csv(const std::filesystem::path& path) {
  return parse_tabulated_csv(read_file(path), path.string());
}

VectorSignal read_signal_csv(const std::filesystem::path& path) {
  auto tab = std::make_shared<const TabulatedData>(read_tabulated_csv(path));
  double sup2 = 0.0;
  for (std::size_t c = 0; c < tab->columns(); ++c) sup2 += tab->column_max_abs(c) * tab->column_max_abs(c);
  // Pointwise norms are <= the root of summed squared column maxima.
  const std::size_t n = tab->columns();
  VectorSignal s(
      n,
      [tab, n](double t, std::span<double> out) {
        for (std::size_t c = 0; c < n; ++c) out[c] = tab->interpolate(c, t);
      },
      std::sqrt(sup2), Domain{tab->times.front(), tab->times.back()});
  s.description = "file:" + path.string();
  return s;
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_.put(',');
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, values[i]);
    out_.write(buf, p - buf);
  }
  out_.put('\n');
}

void CsvWriter::row_with_blanks(std::span<const double> values) {
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_.put(',');
    if (std::isnan(values[i])) continue;
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, values[i]);
    out_.write(buf, p - buf);
  }
  out_.put('\n');
}

void write_orbit_csv(std::ostream& out, const LogisticOrbit& orbit) {
  CsvWriter w(out, {"i", "psi"});
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const double r[2] = {static_cast<double>(i), orbit[i]};
    w.row(r);
  }
}

void write_signal_csv(std::ostream& out, const VectorSignal& g, double a, double b, double step,
                      const std::vector<std::string>& names) {
  require(step > 0.0, "io", "sampling step must be positive");
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < g.dimension(); ++i)
    header.push_back(i < names.size() ? names[i] : (g.dimension() == 1 ? "value" : "g" + std::to_string(i + 1)));
  CsvWriter w(out, header);
  if (b < a) return;
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  Vector r(g.dimension() + 1);
  for (std::size_t k = 0; k < count; ++k) {
    r[0] = a + static_cast<double>(k) * step;
    g.evaluate(r[0], std::span<double>(r).subspan(1));
    w.row(r);
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < traj.dim; ++i) header.push_back("x" + std::to_string(i + 1));
  CsvWriter w(out, header);
  Vector r(traj.dim + 1);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    r[0] = traj.time(k);
    const auto x = traj.state(k);
    std::copy(x.begin(), x.end(), r.begin() + 1);
    w.row(r);
  }
}

void write_bounded_csv(std::ostream& out, const BoundedSolution& sol) {
  const std::size_t n = sol.dimension();
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < n; ++i) header.push_back("phi" + std::to_string(i + 1));
  header.emplace_back("residual");
  CsvWriter w(out, header);
  const double h = sol.spacing();
  const auto kink = sol.forcing().kink_spacing();
  Vector r(n + 2), gv(n), ax(n);
  for (std::size_t k = 0; k < sol.size(); ++k) {
    r[0] = sol.time(k);
    const auto x = sol.value(k);
    std::copy(x.begin(), x.end(), r.begin() + 1);
    double res = std::numeric_limits<double>::quiet_NaN();
    const bool interior = k > 0 && k + 1 < sol.size();
    bool straddles = false;
    if (interior && kink) {
      const double lo = (r[0] - h * (1.0 - 1e-9)) / *kink;
      const double hi = (r[0] + h * (1.0 - 1e-9)) / *kink;
      straddles = std::floor(hi) >= std::ceil(lo);
    }
    if (interior && !straddles) {
      sol.forcing().evaluate_unchecked(r[0], gv);
      multiply_into(sol.split().A, x, ax);
      const auto xp = sol.value(k + 1);
      const auto xm = sol.value(k - 1);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = (xp[i] - xm[i]) / (2.0 * h) - ax[i] - gv[i];
        s += e * e;
      }
      res = std::sqrt(s);
    }
    r[n + 1] = res;
    w.row_with_blanks(r);
  }
}

Matrix parse_matrix(std::string_view text) {
  const auto s = trim(text);
  require(!s.empty(), "linalg", "empty matrix specification");
  std::vector<std::vector<double>> rows;
  if (s.front() == '[') {
    Json j;
    try {
      j = Json::parse(s);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("linalg: cannot parse matrix '") + std::string(s) + "': " + e.what());
    }
    require(j.is_array() && !j.empty(), "linalg", "matrix must be a non-empty array of rows");
    for (const auto& row : j) {
      require(row.is_array() && !row.empty(), "linalg", "matrix rows must be non-empty arrays");
      std::vector<double> r;
      for (const auto& v : row) {
        require(v.is_number(), "linalg", "matrix entries must be numbers");
        r.push_back(v.get<double>());
      }
      rows.push_back(std::move(r));
    }
  } else {
    const std::string content = read_file(std::filesystem::path(std::string(s)));
    for (const auto line : lines_of(content)) {
      std::vector<double> r;
      for (const auto f : split_fields(line)) {
        double v = 0.0;
        require(parse_number(f, v), "linalg", "matrix file entry '" + std::string(f) + "' is not a finite number");
        r.push_back(v);
      }
      rows.push_back(std::move(r));
    }
    require(!rows.empty(), "linalg", "matrix file is empty");
  }
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  for (const auto& r : rows) {
    require(r.size() == cols, "linalg", "matrix rows have different lengths");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix::from_row_major(rows.size(), cols, std::move(data));
}

Vector parse_vector(std::string_view text) {
  auto s = trim(text);
  if (!s.empty() && s.front() == '[') {
    require(s.back() == ']', "cli", "unterminated vector '" + std::string(text) + "'");
    s = s.substr(1, s.size() - 2);
  }
  Vector v;
  if (trim(s).empty()) return v;
  for (const auto f : split_fields(s)) {
    double x = 0.0;
    require(parse_number(f, x), "cli", "vector entry '" + std::string(f) + "' is not a finite number");
    v.push_back(x);
  }
  return v;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

namespace {

Json complex_list(const std::vector<std::complex<double>>& zs) {
  Json out = Json::array();
  for (const auto& z : zs) out.push_back(Json::array({z.real(), z.imag()}));
  return out;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const SpectralSplit& split) {
  Json j;
  j["n"] = split.dimension();
  j["q"] = split.q;
  j["A"] = to_json(split.A);
  j["B"] = to_json(split.B);
  j["Binv"] = to_json(split.Binv);
  j["Aminus"] = to_json(split.Aminus);
  j["Aplus"] = to_json(split.Aplus);
  j["eigenvalues_minus"] = complex_list(split.eig_minus);
  j["eigenvalues_plus"] = complex_list(split.eig_plus);
  j["K"] = split.K();
  j["K_sampled"] = split.constants.K_sampled;
  j["alpha"] = finite_or_null(split.alpha());
  j["alpha_minus"] = finite_or_null(split.constants.alpha_minus);
  j["alpha_plus"] = finite_or_null(split.constants.alpha_plus);
  j["sign_iterations"] = split.sign_iterations;
  const auto d = split_defects(split);
  j["inverse_defect"] = d.inverse_defect;
  j["off_block_defect"] = d.off_block_defect;
  return j;
}

Json to_json(const BoundedCertificate& c) {
  Json j;
  j["T"] = c.T();
  j["T_minus"] = c.T_minus;
  j["T_plus"] = c.T_plus;
  j["h"] = std::max(c.h_minus, c.h_plus);
  j["h_minus"] = c.h_minus;
  j["h_plus"] = c.h_plus;
  j["K"] = c.K;
  j["alpha"] = finite_or_null(c.alpha);
  j["M"] = c.M;
  j["tail_bound"] = c.tail_bound;
  j["horizon_capped"] = c.horizon_capped;
  j["max_residual"] = c.max_residual >= 0.0 ? Json(c.max_residual) : Json(nullptr);
  j["residual_points"] = c.residual_points;
  j["residual_skipped"] = c.residual_skipped;
  return j;
}

Json to_json(const DetectConfig& c) {
  Json j;
  j["return_tol"] = c.return_tol;
  j["shift_count"] = c.shift_count;
  j["min_shifts"] = c.min_shifts;
  j["lookback"] = c.lookback;
  j["period"] = c.period ? Json(*c.period) : Json(nullptr);
  j["period_tol"] = c.period_tol;
  j["orbit_time_offset"] = c.orbit_time_offset;
  j["explicit_shifts"] = c.explicit_shifts;
  j["poisson_window"] = Json::array({c.poisson_start, c.poisson_start + c.poisson_length});
  j["separation_window"] = Json::array({c.window_start, c.window_start + c.window_length});
  j["sample_step"] = c.sample_step;
  j["pass_tol"] = c.pass_tol;
  j["epsilon_min"] = c.epsilon_min;
  j["delta_grid"] = c.delta_grid;
  j["threshold_scale"] = c.threshold_scale == ThresholdScale::sup_norm ? "sup_norm" : "absolute";
  j["lipschitz_budget"] = finite_or_null(c.lipschitz_budget);
  return j;
}

Json to_json(const DetectionReport& r) {
  Json j;
  j["shifts"] = r.shifts;
  j["divergences"] = r.poisson.divergences;
  j["u_n"] = r.separation.u;
  j["epsilon0"] = r.separation.epsilon0;
  j["delta"] = r.separation.delta;
  Json v;
  v["poisson_pass"] = r.poisson.pass;
  v["separation_pass"] = r.separation.pass;
  v["bounded_pass"] = r.bounded_pass;
  v["continuity_pass"] = r.continuity_pass;
  v["unpredictable"] = r.unpredictable();
  j["verdict"] = v;
  j["config"] = to_json(r.config);
  Json d;
  d["signal"] = r.description;
  d["running_min"] = r.poisson.running_min;
  d["separations"] = r.separation.separation;
  d["epsilon_by_delta"] = r.separation.epsilon_by_delta;
  d["poisson_threshold"] = r.poisson.threshold;
  d["separation_threshold"] = r.separation.threshold;
  d["threshold_scale_value"] = r.scale;
  d["sampled_sup"] = r.sampled_sup;
  d["lipschitz_estimate"] = r.lipschitz_estimate;
  d["shift_candidates_examined"] = r.search.examined;
  if (!r.search.diagnostic.empty()) d["shift_search"] = r.search.diagnostic;
  d["note"] = "finite-prefix numerical evidence; Poisson criterion = running minimum of d_n below threshold";
  j["diagnostics"] = d;
  return j;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("io: cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("io: write failed for " + path.string());
}

}  // namespace unpred
