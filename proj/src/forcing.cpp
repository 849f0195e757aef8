#include "unpred/forcing.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

#include "unpred/errors.hpp"
#include "unpred/io.hpp"

namespace unpred {

bool ForcingSpec::uses_theta() const {
  for (const auto& c : components)
    for (const auto& t : c)
      if (t.kind == ForcingTerm::Kind::theta) return true;
  return false;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  ForcingSpec parse() {
    ForcingSpec spec;
    skip_ws();
    if (at_end()) fail("empty forcing specification");
    while (true) {
      spec.components.push_back(component());
      skip_ws();
      if (at_end()) break;
      if (peek() == ',' || peek() == ';') {
        ++pos_;
        continue;
      }
      fail("expected ',' between components");
    }
    return spec;
  }

 private:
  std::vector<ForcingTerm> component() {
    std::vector<ForcingTerm> terms;
    skip_ws();
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
    }
    while (true) {
      ForcingTerm t = term();
      t.coef *= sign;
      terms.push_back(std::move(t));
      skip_ws();
      if (!at_end() && (peek() == '+' || peek() == '-')) {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        continue;
      }
      return terms;
    }
  }

  ForcingTerm term() {
    skip_ws();
    ForcingTerm t;
    if (number_starts()) {
      t.coef = number();
      skip_ws();
      if (at_end() || peek() != '*') {
        t.kind = ForcingTerm::Kind::constant;
        return t;
      }
      ++pos_;
      skip_ws();
    }
    atom(t);
    return t;
  }

  void atom(ForcingTerm& t) {
    if (consume("theta")) {
      t.kind = ForcingTerm::Kind::theta;
    } else if (consume("sin(")) {
      t.kind = ForcingTerm::Kind::sine;
      t.omega = frequency();
    } else if (consume("cos(")) {
      t.kind = ForcingTerm::Kind::cosine;
      t.omega = frequency();
    } else if (consume("file:")) {
      t.kind = ForcingTerm::Kind::file;
      const std::size_t start = pos_;
      while (!at_end() && peek() != ',' && peek() != ';' && peek() != '#') ++pos_;
      t.path = std::string(s_.substr(start, pos_ - start));
      while (!t.path.empty() && std::isspace(static_cast<unsigned char>(t.path.back()))) t.path.pop_back();
      if (t.path.empty()) fail("file term needs a path");
      if (!at_end() && peek() == '#') {
        ++pos_;
        const double col = number();
        if (col < 1 || col != std::floor(col)) fail("file column must be a positive integer");
        t.column = static_cast<std::size_t>(col);
      }
    } else {
      fail("expected a term (number, theta, sin(w*t), cos(w*t) or file:<csv>)");
    }
  }

  double frequency() {
    skip_ws();
    double w = 1.0;
    if (number_starts()) {
      w = number();
      skip_ws();
      if (!at_end() && peek() == '*') ++pos_;
      skip_ws();
    }
    if (!consume("t")) fail("expected 't' inside the trigonometric term");
    skip_ws();
    if (!consume(")")) fail("expected ')'");
    return w;
  }

  bool number_starts() const {
    if (at_end()) return false;
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || !std::isfinite(v)) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  bool consume(std::string_view word) {
    if (s_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("forcing-spec: " + msg + " at position " + std::to_string(pos_) + " in \"" +
                      std::string(s_) + "\"");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

struct CompiledTerm {
  ForcingTerm::Kind kind;
  double coef;
  double omega;
  std::shared_ptr<const TabulatedData> table;
  std::size_t column;
};

}  // namespace

ForcingSpec parse_forcing_spec(std::string_view text) { return Parser(text).parse(); }

VectorSignal build_forcing(const ForcingSpec& spec, const ForcingContext& ctx) {
  require(!spec.components.empty(), "forcing-spec", "no components");
  const bool needs_theta = spec.uses_theta();
  require(!needs_theta || ctx.theta != nullptr, "forcing-spec", "'theta' term used but no Theta signal configured");

  std::map<std::string, std::shared_ptr<const TabulatedData>> tables;
  std::vector<std::vector<CompiledTerm>> comps;
  Domain dom;
  double sup2 = 0.0;
  bool has_aperiodic = false;
  std::optional<double> omega_common;
  bool omega_mixed = false;

  if (needs_theta) {
    dom.lo = -ctx.theta_offset;
    dom.hi = ctx.theta->domain_end() - ctx.theta_offset;
  }

  for (std::size_t ci = 0; ci < spec.components.size(); ++ci) {
    std::vector<CompiledTerm> out;
    double bound = 0.0;
    for (const ForcingTerm& t : spec.components[ci]) {
      CompiledTerm ct{t.kind, t.coef, t.omega, nullptr, 0};
      switch (t.kind) {
        case ForcingTerm::Kind::constant:
          bound += std::abs(t.coef);
          break;
        case ForcingTerm::Kind::theta:
          bound += std::abs(t.coef) * ctx.theta->sup_bound();
          has_aperiodic = true;
          break;
        case ForcingTerm::Kind::sine:
        case ForcingTerm::Kind::cosine:
          bound += std::abs(t.coef);
          if (t.omega != 0.0) {
            if (omega_common && std::abs(*omega_common - std::abs(t.omega)) > 0.0) omega_mixed = true;
            omega_common = std::abs(t.omega);
          }
          break;
        case ForcingTerm::Kind::file: {
          auto& table = tables[t.path];
          if (!table) table = std::make_shared<const TabulatedData>(read_tabulated_csv(t.path));
          ct.table = table;
          ct.column = t.column ? t.column - 1 : ci;
          require(ct.column < table->columns(), "forcing-spec",
                  "file " + t.path + " has no data column " + std::to_string(ct.column + 1));
          bound += std::abs(t.coef) * table->column_max_abs(ct.column);
          dom.lo = std::max(dom.lo, table->times.front());
          dom.hi = std::min(dom.hi, table->times.back());
          has_aperiodic = true;
          break;
        }
      }
      out.push_back(std::move(ct));
    }
    sup2 += bound * bound;
    comps.push_back(std::move(out));
  }
  require(dom.lo <= dom.hi, "forcing-spec", "terms have disjoint time domains");

  std::optional<double> period;
  if (!has_aperiodic && omega_common && !omega_mixed) period = 2.0 * std::numbers::pi / *omega_common;

  auto theta = ctx.theta;
  const double offset = ctx.theta_offset;
  const std::size_t dim = comps.size();
  VectorSignal s(
      dim,
      [comps = std::move(comps), theta, offset, needs_theta](double t, std::span<double> out) {
        const double th = needs_theta ? (*theta)(t + offset) : 0.0;
        for (std::size_t i = 0; i < comps.size(); ++i) {
          double v = 0.0;
          for (const CompiledTerm& ct : comps[i]) {
            switch (ct.kind) {
              case ForcingTerm::Kind::constant: v += ct.coef; break;
              case ForcingTerm::Kind::theta: v += ct.coef * th; break;
              case ForcingTerm::Kind::sine: v += ct.coef * std::sin(ct.omega * t); break;
              case ForcingTerm::Kind::cosine: v += ct.coef * std::cos(ct.omega * t); break;
              case ForcingTerm::Kind::file: v += ct.coef * ct.table->interpolate(ct.column, t); break;
            }
          }
          out[i] = v;
        }
      },
      std::sqrt(sup2), dom, period, needs_theta ? std::optional<double>(1.0) : std::nullopt);
  s.description = "forcing";
  return s;
}

}  // namespace unpred
