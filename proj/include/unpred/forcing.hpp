#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "unpred/signals.hpp"

namespace unpred {

// Forcing specification mini-language.
//
//   spec      := component ( ',' component )*        (';' also separates)
//   component := ['+'|'-'] term ( ('+'|'-') term )*
//   term      := number | [number '*'] atom
//   atom      := 'theta' | 'sin(' [number ['*']] 't)' | 'cos(' [number ['*']] 't)'
//              | 'file:' path [ '#' column ]
//
// Example (first system of the reproduction set):
//   "259*theta - sin(10*t), -150*theta + cos(10*t)"

struct ForcingTerm {
  enum class Kind { constant, theta, sine, cosine, file };
  Kind kind = Kind::constant;
  double coef = 1.0;
  double omega = 0.0;
  std::string path;
  std::size_t column = 0;  // 1-based data column for file terms, 0 = component index + 1
};

struct ForcingSpec {
  std::vector<std::vector<ForcingTerm>> components;
  bool uses_theta() const;
};

/// Throws ConfigError naming the offending position on malformed input.
ForcingSpec parse_forcing_spec(std::string_view text);

struct ForcingContext {
  /// Required when the spec contains `theta`.
  std::shared_ptr<const ThetaSignal> theta;
  /// `theta` terms evaluate Theta(t + theta_offset); the offset is the
  /// burn-in that hides the initialization transient.
  double theta_offset = 0.0;
};

VectorSignal build_forcing(const ForcingSpec& spec, const ForcingContext& ctx);

inline VectorSignal build_forcing(std::string_view text, const ForcingContext& ctx) {
  return build_forcing(parse_forcing_spec(text), ctx);
}

}  // namespace unpred
