#include "unpred/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "unpred/errors.hpp"

namespace unpred {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr std::size_t kMaxPoints = 4000;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  // Two decimals are plenty for pixel coordinates and keep files small.
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, std::round(v * 100.0) / 100.0);
  return std::string(buf, p);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0, hi = 1;
};

Range range_of(const std::vector<const std::vector<double>*>& vs) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto* v : vs)
    for (double x : *v)
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
  if (!(lo <= hi)) return {0, 1};
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}
  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void header(std::ostringstream& out, const std::string& title, const std::string& xlabel,
              const std::string& ylabel) const {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape(title) << "</text>\n";
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
    out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0 << "\" height=\"" << y1 - y0
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double fx = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double fy = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      out << "<text x=\"" << num(px(fx)) << "\" y=\"" << y1 + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(fx) << "</text>\n";
      out << "<text x=\"" << x0 - 6 << "\" y=\"" << num(py(fy) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(fy) << "</text>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << escape(ylabel) << "</text>\n";
  }

  void polyline(std::ostringstream& out, const std::vector<double>& xs, const std::vector<double>& ys,
                const char* color) const {
    const std::size_t n = std::min(xs.size(), ys.size());
    const std::size_t stride = n > kMaxPoints ? (n + kMaxPoints - 1) / kMaxPoints : 1;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < n; k += stride) out << num(px(xs[k])) << ',' << num(py(ys[k])) << ' ';
    if (n && (n - 1) % stride) out << num(px(xs[n - 1])) << ',' << num(py(ys[n - 1]));
    out << "\"/>\n";
  }

 private:
  static std::string tick(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
  }
  Range x_, y_;
};

}  // namespace

std::string svg_time_series(const std::string& title, const std::vector<double>& t,
                            const std::vector<SvgSeries>& series, const std::string& xlabel) {
  require(!series.empty(), "svg", "time-series plot needs at least one series");
  for (const auto& s : series) require(s.values.size() == t.size(), "svg", "series length differs from time axis");
  std::vector<const std::vector<double>*> ys;
  for (const auto& s : series) ys.push_back(&s.values);
  const Canvas c(range_of({&t}), range_of(ys));
  std::ostringstream out;
  std::string ylabel;
  for (std::size_t i = 0; i < series.size(); ++i) ylabel += (i ? ", " : "") + series[i].label;
  c.header(out, title, xlabel, ylabel);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % 5];
    c.polyline(out, t, series[i].values, color);
    out << "<text x=\"" << kWidth - kRight - 10 << "\" y=\"" << kTop + 16 + 16 * i
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
        << escape(series[i].label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_phase_portrait(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                               const std::string& xlabel, const std::string& ylabel) {
  require(x.size() == y.size() && !x.empty(), "svg", "phase portrait needs equal-length non-empty coordinates");
  const Canvas c(range_of({&x}), range_of({&y}));
  std::ostringstream out;
  c.header(out, title, xlabel, ylabel);
  c.polyline(out, x, y, kColors[0]);
  out << "</svg>\n";
  return out.str();
}

}  // namespace unpred
