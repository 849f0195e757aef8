#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unpred/detect.hpp"
#include "unpred/pipeline.hpp"

namespace unpred {

/// Values of the TOML subset: numbers, quoted strings, booleans and flat
/// arrays of numbers or strings.
using ConfigValue = std::variant<double, std::string, bool, std::vector<double>, std::vector<std::string>>;

/// Parsed `key = value` lines grouped under `[section]` headers; keys are
/// stored as "section.key" (top-level keys have no prefix).
struct ConfigDocument {
  std::map<std::string, ConfigValue> values;
  std::string origin;
};

ConfigDocument parse_config(std::string_view text, const std::string& origin = "<memory>");
ConfigDocument read_config(const std::filesystem::path& path);

struct SystemParams {
  std::string matrix;   // inline "[[..]]" or CSV path; empty = detect the forcing itself
  std::string forcing = "theta";
  std::string transform;  // optional B: the detected signal becomes B^{-1} g
  std::string x0;
  double tol = 1e-6;
  double h = 1e-3;
  double max_horizon = 1e4;
};

struct OutputParams {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "json", "svg"};
  bool wants(std::string_view fmt) const;
};

struct RunConfig {
  /// orbit_length 0 = sized automatically by each command.
  ThetaParams signal{0.5, 3.91, 2.0, 0, 100.0};
  double t_max = 100.0;
  double step = 1e-2;
  SystemParams system;
  DetectConfig detect;
  OutputParams output;
};

/// Overlays the document on `base`. Unknown sections or keys, wrong value
/// types and violated preconditions raise ConfigError.
RunConfig apply_config(const ConfigDocument& doc, RunConfig base = {});

/// Checks the cross-field preconditions of a run configuration.
void validate(const RunConfig& cfg);

}  // namespace unpred
