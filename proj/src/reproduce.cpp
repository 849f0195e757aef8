#include "unpred/reproduce.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "unpred/bounded.hpp"
#include "unpred/errors.hpp"
#include "unpred/forcing.hpp"
#include "unpred/sim.hpp"
#include "unpred/spectral.hpp"
#include "unpred/svg.hpp"

namespace unpred {

DetectConfig example1_detect_config() {
  DetectConfig c;
  c.return_tol = 1e-2;
  c.shift_count = 5;
  c.min_shifts = 3;
  c.lookback = 7;
  c.period = std::numbers::pi / 5.0;
  // The harmonic response of the system is ~0.1 per unit forcing, so a
  // loose phase match costs little against the sup-norm threshold.
  c.period_tol = 1e-2;
  c.poisson_start = 0.0;
  c.poisson_length = 1.0;
  c.window_start = 0.0;
  c.window_length = 1e4;
  c.sample_step = 1e-2;
  c.threshold_scale = ThresholdScale::sup_norm;
  return c;
}

std::size_t example1_orbit_length(double window_length) {
  return static_cast<std::size_t>(1'500'000 + std::ceil(window_length)) + 1000;
}

namespace {

struct Example1State {
  ThetaSource source;
  VectorSignal g;
  SpectralSplit split;
  Trajectory traj;
};

Example1State simulate_example1(const ReproduceOptions& o, std::size_t orbit_length) {
  require(o.t_end > 0.0, "cli", "reproduction window end must be positive");
  require(o.h > 0.0 && o.stride > 0, "cli", "step and stride must be positive");
  ThetaParams tp = o.signal;
  tp.orbit_length = orbit_length;
  ThetaSource src = make_theta_source(tp);
  VectorSignal g = build_forcing(kExample1Forcing, ForcingContext{src.theta, src.burn_in});
  SpectralSplit split = spectral_split(example1_matrix());
  const auto steps = static_cast<std::size_t>(std::llround(o.t_end / o.h));
  Trajectory traj = rk4_integrate(split.A, g, 0.0, example1_x0(), o.h, steps, o.stride);
  return {std::move(src), std::move(g), std::move(split), std::move(traj)};
}

std::vector<double> column(const Trajectory& t, std::size_t c) {
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = t.state(k)[c];
  return out;
}

std::vector<double> times(const Trajectory& t) {
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = t.time(k);
  return out;
}

double max_norm(const Trajectory& t) {
  double m = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) m = std::max(m, vec_norm(t.state(k)));
  return m;
}

class Emitter {
 public:
  Emitter(std::filesystem::path dir, const OutputParams& out, std::vector<std::filesystem::path>& list)
      : dir_(std::move(dir)), out_(out), list_(list) {}

  template <class F>
  void emit(const std::string& name, const char* format, F&& produce) {
    if (!out_.wants(format)) return;
    std::ostringstream ss;
    produce(ss);
    const auto path = dir_ / name;
    write_text_file(path, ss.str());
    list_.push_back(path);
  }

 private:
  std::filesystem::path dir_;
  const OutputParams& out_;
  std::vector<std::filesystem::path>& list_;
};

Json artifact_list(const std::vector<std::filesystem::path>& paths) {
  Json a = Json::array();
  for (const auto& p : paths) a.push_back(p.filename().string());
  return a;
}

}  // namespace

ReproduceResult reproduce_example1(const ReproduceOptions& o) {
  DetectConfig dc = o.detect.value_or([&] {
    DetectConfig c = example1_detect_config();
    c.window_length = o.t_end;
    return c;
  }());
  const std::size_t orbit_length =
      o.signal.orbit_length ? o.signal.orbit_length
                            : (o.run_detector ? example1_orbit_length(dc.window_start + dc.window_length)
                                              : static_cast<std::size_t>(std::ceil(o.t_end + o.signal.burn_in)) + 200);
  Example1State st = simulate_example1(o, orbit_length);

  ReproduceResult res;
  Emitter em(o.out_dir, o.output, res.artifacts);

  BoundedOptions bo;
  bo.tol = o.tol;
  bo.step = o.h;
  bo.record_stride = o.stride;
  BoundedSolution sol = bounded_solution(st.split, st.g, 0.0, o.t_end, bo);
  residual_certificate(sol, sol.spacing());

  // ||x(t)|| <= ||phi(t)|| + K e^{-alpha t} ||x0 - phi(0)||.
  const Vector x0 = example1_x0();
  Vector gap(x0.size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = x0[i] - sol.value(0)[i];
  res.envelope = sol.envelope() + st.split.K() * vec_norm(gap);
  res.max_norm = max_norm(st.traj);
  res.within_envelope = res.max_norm <= res.envelope;

  if (o.run_detector) {
    dc.orbit_time_offset = st.source.burn_in;
    BoundedOptions dbo;
    dbo.tol = o.tol;
    dbo.step = o.h;
    const DetectTarget target = target_from_bounded(st.split, st.g, dbo);
    res.report = verify_unpredictable(target, st.source.orbit.get(), dc);
  }

  em.emit("forcing.csv", "csv",
          [&](std::ostream& s) { write_signal_csv(s, st.g, 0.0, o.t_end, st.traj.spacing, {"g1", "g2"}); });
  em.emit("trajectory.csv", "csv", [&](std::ostream& s) { write_trajectory_csv(s, st.traj); });
  em.emit("bounded.csv", "csv", [&](std::ostream& s) { write_bounded_csv(s, sol); });
  em.emit("split.json", "json", [&](std::ostream& s) { s << to_json(st.split).dump(2) << '\n'; });
  em.emit("certificate.json", "json", [&](std::ostream& s) { s << to_json(sol.certificate()).dump(2) << '\n'; });
  if (res.report)
    em.emit("detection.json", "json", [&](std::ostream& s) { s << to_json(*res.report).dump(2) << '\n'; });
  const auto t = times(st.traj);
  const auto x1 = column(st.traj, 0), x2 = column(st.traj, 1);
  em.emit("figure1_timeseries.svg", "svg", [&](std::ostream& s) {
    s << svg_time_series("x1(t), x2(t) from (0.18, 0.01)", t, {{"x1", x1}, {"x2", x2}});
  });
  em.emit("figure2_phase.svg", "svg",
          [&](std::ostream& s) { s << svg_phase_portrait("trajectory in the (x1, x2) plane", x1, x2, "x1", "x2"); });

  Json j;
  j["example"] = "example1";
  j["matrix"] = to_json(st.split.A);
  j["forcing"] = kExample1Forcing;
  j["x0"] = x0;
  j["window"] = Json::array({0.0, o.t_end});
  j["eigenvalues"] = Json::array();
  for (const auto& z : st.split.eig_minus) j["eigenvalues"].push_back(Json::array({z.real(), z.imag()}));
  j["K"] = st.split.K();
  j["alpha"] = st.split.alpha();
  j["forcing_sup_bound"] = st.g.sup_bound();
  j["bounded_envelope"] = sol.envelope();
  j["trajectory_envelope"] = res.envelope;
  j["trajectory_max_norm"] = res.max_norm;
  j["within_envelope"] = res.within_envelope;
  j["max_residual"] = sol.certificate().max_residual;
  if (res.report) j["detector_verdict"] = res.report->unpredictable();
  j["note"] = "qualitative reproduction; figures are not bit-matched to any published plot";
  em.emit("summary.json", "json", [&](std::ostream& s) {
    j["artifacts"] = artifact_list(res.artifacts);
    s << j.dump(2) << '\n';
  });
  res.summary = std::move(j);
  return res;
}

ReproduceResult reproduce_example2(const ReproduceOptions& o) {
  require(o.h_stiff > 0.0 && o.stride_stiff > 0, "cli", "stiff step and stride must be positive");
  const std::size_t orbit_length =
      o.signal.orbit_length ? o.signal.orbit_length
                            : static_cast<std::size_t>(std::ceil(o.t_end + o.signal.burn_in)) + 200;
  Example1State st = simulate_example1(o, orbit_length);

  // The first system's trajectory drives the second through (7090 x2, 0.111 x1).
  const VectorSignal x = trajectory_signal(st.traj, st.split.A, st.g);
  require(x.dimension() == 2, "cli", "second system expects a two-dimensional driving trajectory");
  VectorSignal f(
      2,
      [x](double t, std::span<double> out) {
        double v[2];
        x.evaluate_unchecked(t, v);
        out[0] = kExample2Gain1 * v[1];
        out[1] = kExample2Gain2 * v[0];
      },
      std::hypot(kExample2Gain1, kExample2Gain2) * x.sup_bound(), x.domain(), std::nullopt, x.kink_spacing());
  f.description = "(7090 x2(t), 0.111 x1(t))";

  const SpectralSplit split2 = spectral_split(example2_matrix());
  const auto steps = static_cast<std::size_t>(std::llround(o.t_end / o.h_stiff));
  const Vector y0{0.0, 0.0};
  const Trajectory traj = rk4_integrate(split2.A, f, 0.0, y0, o.h_stiff, steps, o.stride_stiff);

  ReproduceResult res;
  Emitter em(o.out_dir, o.output, res.artifacts);
  // y0 = 0, so ||y(t)|| <= ||phi(t)|| + K ||phi(0)|| <= (1 + K) * envelope.
  const double env = bounded_envelope(split2, f.sup_bound());
  res.envelope = (1.0 + split2.K()) * env;
  res.max_norm = max_norm(traj);
  res.within_envelope = res.max_norm <= res.envelope;

  em.emit("forcing.csv", "csv",
          [&](std::ostream& s) { write_signal_csv(s, f, 0.0, o.t_end, traj.spacing, {"f1", "f2"}); });
  em.emit("trajectory.csv", "csv", [&](std::ostream& s) { write_trajectory_csv(s, traj); });
  em.emit("split.json", "json", [&](std::ostream& s) { s << to_json(split2).dump(2) << '\n'; });
  const auto t = times(traj);
  const auto y1 = column(traj, 0), y2 = column(traj, 1);
  em.emit("figure3_timeseries.svg", "svg", [&](std::ostream& s) {
    s << svg_time_series("y1(t), y2(t) from (0, 0)", t, {{"y1", y1}, {"y2", y2}});
  });
  em.emit("figure4_phase.svg", "svg",
          [&](std::ostream& s) { s << svg_phase_portrait("trajectory in the (y1, y2) plane", y1, y2, "y1", "y2"); });

  Json j;
  j["example"] = "example2";
  j["matrix"] = to_json(split2.A);
  j["forcing_dimension"] = f.dimension();
  j["y0"] = y0;
  j["window"] = Json::array({0.0, o.t_end});
  j["h"] = o.h_stiff;
  j["steps"] = steps;
  j["q"] = split2.q;
  j["eigenvalues_minus"] = Json::array();
  for (const auto& z : split2.eig_minus) j["eigenvalues_minus"].push_back(Json::array({z.real(), z.imag()}));
  j["eigenvalues_plus"] = Json::array();
  for (const auto& z : split2.eig_plus) j["eigenvalues_plus"].push_back(Json::array({z.real(), z.imag()}));
  j["K"] = split2.K();
  j["alpha_minus"] = split2.constants.alpha_minus;
  j["alpha_plus"] = split2.constants.alpha_plus;
  j["bounded_envelope"] = env;
  j["trajectory_envelope"] = res.envelope;
  j["trajectory_max_norm"] = res.max_norm;
  j["within_envelope"] = res.within_envelope;
  j["note"] = "qualitative reproduction; figures are not bit-matched to any published plot";
  em.emit("summary.json", "json", [&](std::ostream& s) {
    j["artifacts"] = artifact_list(res.artifacts);
    s << j.dump(2) << '\n';
  });
  res.summary = std::move(j);
  return res;
}

}  // namespace unpred
