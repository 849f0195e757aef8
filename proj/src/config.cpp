#include "unpred/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "unpred/errors.hpp"

namespace unpred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ConfigError("config: " + origin + ":" + std::to_string(line) + ": " + msg);
}

/// Removes a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool parse_double(std::string_view s, double& v) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_string(std::string_view s, std::string& out) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return false;
  s = s.substr(1, s.size() - 2);
  if (s.find('"') != std::string_view::npos) return false;
  out.assign(s);
  return true;
}

ConfigValue parse_value(std::string_view raw, const std::string& origin, std::size_t line) {
  const auto s = trim(raw);
  if (s.empty()) fail(origin, line, "missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  std::string str;
  if (s.front() == '"') {
    if (!parse_string(s, str)) fail(origin, line, "malformed string " + std::string(s));
    return str;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail(origin, line, "unterminated array");
    const auto body = trim(s.substr(1, s.size() - 2));
    std::vector<double> nums;
    std::vector<std::string> strs;
    if (body.empty()) return nums;
    std::size_t start = 0;
    while (start <= body.size()) {
      const std::size_t p = body.find(',', start);
      const auto item = trim(body.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
      if (!item.empty()) {
        double v = 0.0;
        if (parse_string(item, str)) {
          strs.push_back(str);
        } else if (parse_double(item, v)) {
          nums.push_back(v);
        } else {
          fail(origin, line, "array item '" + std::string(item) + "' is neither a number nor a string");
        }
      }
      if (p == std::string_view::npos) break;
      start = p + 1;
    }
    if (!nums.empty() && !strs.empty()) fail(origin, line, "arrays must not mix numbers and strings");
    if (!strs.empty()) return strs;
    return nums;
  }
  double v = 0.0;
  if (!parse_double(s, v)) fail(origin, line, "value '" + std::string(s) + "' is not a number, string or boolean");
  return v;
}

}  // namespace

ConfigDocument parse_config(std::string_view text, const std::string& origin) {
  ConfigDocument doc;
  doc.origin = origin;
  std::string section;
  std::size_t lineno = 0, start = 0;
  while (start <= text.size()) {
    std::size_t p = text.find('\n', start);
    if (p == std::string_view::npos) p = text.size();
    ++lineno;
    const auto line = trim(strip_comment(text.substr(start, p - start)));
    start = p + 1;
    if (line.empty()) {
      if (p == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(origin, lineno, "malformed section header");
      section.assign(trim(line.substr(1, line.size() - 2)));
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) fail(origin, lineno, "expected key = value");
      const auto key = trim(line.substr(0, eq));
      if (key.empty()) fail(origin, lineno, "empty key");
      const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
      if (doc.values.count(full)) fail(origin, lineno, "duplicate key " + full);
      doc.values.emplace(full, parse_value(line.substr(eq + 1), origin, lineno));
    }
    if (p == text.size()) break;
  }
  return doc;
}

ConfigDocument read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

bool OutputParams::wants(std::string_view fmt) const {
  for (const auto& f : formats)
    if (f == fmt) return true;
  return false;
}

namespace {

using Setter = std::function<void(RunConfig&, const ConfigValue&, const std::string& key)>;

template <class T>
const T& expect(const ConfigValue& v, const std::string& key, const char* what) {
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw ConfigError("config: key " + key + " expects " + what);
}

double number(const ConfigValue& v, const std::string& key) { return expect<double>(v, key, "a number"); }

std::size_t count(const ConfigValue& v, const std::string& key) {
  const double d = number(v, key);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) throw ConfigError("config: key " + key + " expects a non-negative integer");
  return static_cast<std::size_t>(d);
}

std::vector<double> numbers(const ConfigValue& v, const std::string& key) {
  // An empty array parses as numbers.
  return expect<std::vector<double>>(v, key, "an array of numbers");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"signal.seed", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.signal.seed = number(v, k); }},
      {"signal.mu", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.signal.mu = number(v, k); }},
      {"signal.gamma", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.signal.gamma = number(v, k); }},
      {"signal.burn_in",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.signal.burn_in = number(v, k); }},
      {"signal.orbit_length",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.signal.orbit_length = count(v, k); }},
      {"signal.t_max", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.t_max = number(v, k); }},
      {"signal.step", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.step = number(v, k); }},
      {"system.matrix",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) {
         c.system.matrix = expect<std::string>(v, k, "a string");
       }},
      {"system.forcing",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) {
         c.system.forcing = expect<std::string>(v, k, "a string");
       }},
      {"system.transform",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) {
         c.system.transform = expect<std::string>(v, k, "a string");
       }},
      {"system.x0",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) {
         c.system.x0 = expect<std::string>(v, k, "a string");
       }},
      {"system.tol", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.system.tol = number(v, k); }},
      {"system.h", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.system.h = number(v, k); }},
      {"system.max_horizon",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.system.max_horizon = number(v, k); }},
      {"detect.return_tol",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.return_tol = number(v, k); }},
      {"detect.shift_count",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.shift_count = count(v, k); }},
      {"detect.min_shifts",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.min_shifts = count(v, k); }},
      {"detect.lookback",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.lookback = count(v, k); }},
      {"detect.period", [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.period = number(v, k); }},
      {"detect.period_tol",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.period_tol = number(v, k); }},
      {"detect.shifts",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.explicit_shifts = numbers(v, k); }},
      {"detect.poisson_start",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.poisson_start = number(v, k); }},
      {"detect.poisson_length",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.poisson_length = number(v, k); }},
      {"detect.window_start",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.window_start = number(v, k); }},
      {"detect.window_length",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.window_length = number(v, k); }},
      {"detect.sample_step",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.sample_step = number(v, k); }},
      {"detect.pass_tol",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.pass_tol = number(v, k); }},
      {"detect.epsilon_min",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.epsilon_min = number(v, k); }},
      {"detect.delta_grid",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.delta_grid = numbers(v, k); }},
      {"detect.threshold_scale",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) {
         const auto& s = expect<std::string>(v, k, "a string");
         if (s == "absolute")
           c.detect.threshold_scale = ThresholdScale::absolute;
         else if (s == "sup_norm")
           c.detect.threshold_scale = ThresholdScale::sup_norm;
         else
           throw ConfigError("config: " + k + " must be \"absolute\" or \"sup_norm\"");
       }},
      {"detect.lipschitz_budget",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) { c.detect.lipschitz_budget = number(v, k); }},
      {"output.dir",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) {
         c.output.dir = expect<std::string>(v, k, "a string");
       }},
      {"output.formats",
       [](RunConfig& c, const ConfigValue& v, const std::string& k) {
         if (const auto* e = std::get_if<std::vector<double>>(&v); e && e->empty()) {
           c.output.formats.clear();
           return;
         }
         c.output.formats = expect<std::vector<std::string>>(v, k, "an array of strings");
       }},
  };
  return table;
}

}  // namespace

RunConfig apply_config(const ConfigDocument& doc, RunConfig base) {
  const auto& table = setters();
  for (const auto& [key, value] : doc.values) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "' in " + doc.origin);
    it->second(base, value, key);
  }
  validate(base);
  return base;
}

void validate(const RunConfig& c) {
  require(c.signal.seed > 0.0 && c.signal.seed < 1.0, "signals", "logistic seed must lie in (0, 1)");
  require(c.signal.mu > 0.0 && c.signal.mu <= 4.0, "signals", "logistic parameter mu must lie in (0, 4]");
  require(c.signal.gamma > 0.0, "signals", "Theta decay rate gamma must be positive");
  require(c.signal.burn_in >= 0.0, "signals", "burn-in must be non-negative");
  require(c.t_max >= 0.0, "signals", "t_max must be non-negative");
  require(c.step > 0.0, "signals", "sampling step must be positive");
  require(c.system.tol > 0.0, "bounded", "tolerance must be positive");
  require(c.system.h > 0.0, "sim", "integrator step h must be positive");
  require(c.system.max_horizon > 0.0, "bounded", "max_horizon must be positive");
  require(c.detect.return_tol >= 0.0, "detect", "return_tol must be non-negative");
  require(c.detect.shift_count > 0, "detect", "shift_count must be positive");
  require(c.detect.min_shifts <= c.detect.shift_count, "detect", "min_shifts must not exceed shift_count");
  require(!c.detect.period || *c.detect.period > 0.0, "detect", "period must be positive");
  require(c.detect.period_tol >= 0.0, "detect", "period_tol must be non-negative");
  require(c.detect.sample_step > 0.0, "detect", "sample_step must be positive");
  require(c.detect.poisson_length >= 0.0, "detect", "poisson_length must be non-negative");
  require(c.detect.window_length > 0.0, "detect", "window_length must be positive");
  require(c.detect.pass_tol > 0.0 && c.detect.epsilon_min > 0.0, "detect", "thresholds must be positive");
  require(!c.detect.delta_grid.empty(), "detect", "delta_grid must not be empty");
  for (double d : c.detect.delta_grid) require(d > 0.0, "detect", "delta_grid entries must be positive");
  require(c.detect.lipschitz_budget > 0.0, "detect", "lipschitz_budget must be positive");
  for (const auto& f : c.output.formats)
    require(f == "csv" || f == "json" || f == "svg", "cli", "unknown output format '" + f + "'");
}

}  // namespace unpred
