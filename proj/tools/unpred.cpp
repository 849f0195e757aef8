// unpred: command-line front end.
//
//   unpred gen-theta     --seed 0.5 --mu 3.91 --t-max 100 --out dir
//   unpred split         --matrix "[[-1,0],[0,2]]"
//   unpred solve-bounded --matrix "[[-1]]" --forcing-spec "1" --window 0,10
//   unpred simulate      --matrix ... --forcing-spec ... --x0 0.18,0.01 --h 1e-3 --steps 1000
//   unpred detect        --input signal.csv | --pipeline run.toml
//   unpred reproduce     example1 | example2
//
// Exit codes: 0 ok, 2 configuration, 3 numerical failure, 4 domain shortfall.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "unpred/bounded.hpp"
#include "unpred/config.hpp"
#include "unpred/detect.hpp"
#include "unpred/errors.hpp"
#include "unpred/forcing.hpp"
#include "unpred/io.hpp"
#include "unpred/pipeline.hpp"
#include "unpred/reproduce.hpp"
#include "unpred/sim.hpp"
#include "unpred/spectral.hpp"
#include "unpred/svg.hpp"

namespace fs = std::filesystem;
using namespace unpred;

namespace {

// Flags shared by every subcommand. Values given on the command line
// override the config file.
struct Common {
  std::string config_path;
  double seed = 0, mu = 0, gamma = 0, burn_in = 0;
  double orbit_length = 0;
  std::string out;
  CLI::Option *o_seed{}, *o_mu{}, *o_gamma{}, *o_burn{}, *o_orbit{}, *o_out{};

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "TOML-style config file ([signal], [system], [detect], [output])");
    o_seed = app->add_option("--seed", seed, "logistic seed in (0, 1)");
    o_mu = app->add_option("--mu", mu, "logistic parameter in (0, 4]");
    o_gamma = app->add_option("--gamma", gamma, "Theta decay rate");
    o_burn = app->add_option("--burn-in", burn_in, "time discarded before t = 0");
    o_orbit = app->add_option("--orbit-length", orbit_length, "logistic iterates (0 = automatic)");
    o_out = app->add_option("--out", out, "output directory");
  }

  RunConfig load() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = apply_config(read_config(config_path));
    if (o_seed->count()) cfg.signal.seed = seed;
    if (o_mu->count()) cfg.signal.mu = mu;
    if (o_gamma->count()) cfg.signal.gamma = gamma;
    if (o_burn->count()) cfg.signal.burn_in = burn_in;
    if (o_orbit->count()) {
      require(orbit_length >= 0 && orbit_length == std::floor(orbit_length), "cli",
              "--orbit-length must be a non-negative integer");
      cfg.signal.orbit_length = static_cast<std::size_t>(orbit_length);
    }
    if (o_out->count()) cfg.output.dir = out;
    return cfg;
  }
};

std::pair<double, double> parse_window(const std::string& s) {
  const Vector v = parse_vector(s);
  require(v.size() == 2 && v[0] <= v[1], "cli", "--window expects 'a,b' with a <= b");
  return {v[0], v[1]};
}

ThetaSource theta_for(const RunConfig& cfg, double needed_end) {
  ThetaParams p = cfg.signal;
  if (p.orbit_length == 0) p.orbit_length = static_cast<std::size_t>(std::ceil(needed_end + p.burn_in)) + 1;
  return make_theta_source(p);
}

VectorSignal forcing_for(const RunConfig& cfg, const std::string& spec_text, double needed_end,
                         std::optional<ThetaSource>* keep = nullptr) {
  const ForcingSpec spec = parse_forcing_spec(spec_text);
  ForcingContext ctx;
  if (spec.uses_theta()) {
    ThetaSource src = theta_for(cfg, needed_end);
    ctx = ForcingContext{src.theta, src.burn_in};
    if (keep) *keep = std::move(src);
  }
  return build_forcing(spec, ctx);
}

void write_file(const fs::path& p, const std::string& s) {
  write_text_file(p, s);
  std::cerr << "wrote " << p.string() << '\n';
}

// ---------------------------------------------------------------------------

int cmd_gen_theta(const RunConfig& cfg) {
  validate(cfg);
  ThetaParams p = cfg.signal;
  if (p.orbit_length == 0) p.orbit_length = static_cast<std::size_t>(std::ceil(cfg.t_max + p.burn_in)) + 1;
  const ThetaSource src = make_theta_source(p);
  require(src.theta->domain_end() >= cfg.t_max + p.burn_in, "signals",
          "orbit too short for t_max + burn_in; increase --orbit-length");
  const fs::path dir = cfg.output.dir;
  std::ostringstream orbit, theta;
  write_orbit_csv(orbit, *src.orbit);
  write_signal_csv(theta, theta_signal(src.theta, src.burn_in), 0.0, cfg.t_max > 0.0 ? cfg.t_max : -1.0, cfg.step,
                   {"theta"});
  write_file(dir / "orbit.csv", orbit.str());
  write_file(dir / "theta.csv", theta.str());
  return kExitOk;
}

int cmd_split(const std::string& matrix, double gap_tol, const std::string& out) {
  const SpectralSplit split = spectral_split(parse_matrix(matrix), gap_tol);
  const std::string j = to_json(split).dump(2) + "\n";
  if (out.empty())
    std::cout << j;
  else
    write_file(out, j);
  return kExitOk;
}

int cmd_solve_bounded(const RunConfig& cfg, const std::string& window, bool residual) {
  require(!cfg.system.matrix.empty(), "cli", "--matrix is required");
  const auto [a, b] = parse_window(window);
  const SpectralSplit split = spectral_split(parse_matrix(cfg.system.matrix));
  BoundedOptions o;
  o.tol = cfg.system.tol;
  o.step = cfg.system.h;
  o.record_stride = static_cast<std::size_t>(std::max(1.0, std::round(cfg.step / cfg.system.h)));
  o.max_horizon = cfg.system.max_horizon;
  // Theta must extend past the window by the horizon; max_horizon caps it.
  const VectorSignal g = forcing_for(cfg, cfg.system.forcing, b + std::min(o.max_horizon, 1e4) + 10.0);
  require(g.dimension() == split.dimension(), "cli",
          "forcing has " + std::to_string(g.dimension()) + " components but the matrix is " +
              std::to_string(split.dimension()) + "x" + std::to_string(split.dimension()));
  BoundedSolution sol = bounded_solution(split, g, a, b, o);
  if (residual && sol.t_hi() - sol.t_lo() >= 2.0 * sol.spacing()) residual_certificate(sol, sol.spacing());
  const fs::path dir = cfg.output.dir;
  std::ostringstream csv;
  write_bounded_csv(csv, sol);
  write_file(dir / "bounded.csv", csv.str());
  Json cert = to_json(sol.certificate());
  cert["envelope"] = sol.envelope();
  write_file(dir / "certificate.json", cert.dump(2) + "\n");
  std::cout << cert.dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, double t0, std::size_t steps, std::size_t stride) {
  require(!cfg.system.matrix.empty(), "cli", "--matrix is required");
  const Matrix a = parse_matrix(cfg.system.matrix);
  const Vector x0 = parse_vector(cfg.system.x0);
  const double h = cfg.system.h;
  const VectorSignal g = forcing_for(cfg, cfg.system.forcing, t0 + static_cast<double>(steps) * h + 1.0);
  require(a.is_square() && a.rows() == x0.size() && g.dimension() == x0.size(), "sim",
          "dimensions of --matrix, --x0 and --forcing-spec must agree");
  if (steps > 10'000'000) {
    // Rough cost model: ~25 ns per component and stage.
    const double est = static_cast<double>(steps) * 4.0 * static_cast<double>(x0.size()) * 25e-9;
    std::cerr << "warning: " << steps << " RK4 steps (stiff system?); estimated runtime ~" << std::llround(est)
              << " s\n";
  }
  const Trajectory traj = rk4_integrate(a, g, t0, x0, h, steps, stride);
  const fs::path dir = cfg.output.dir;
  if (cfg.output.wants("csv")) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(dir / "trajectory.csv", csv.str());
  }
  if (cfg.output.wants("svg")) {
    std::vector<double> t(traj.size());
    std::vector<SvgSeries> series(traj.dim);
    for (std::size_t c = 0; c < traj.dim; ++c) {
      series[c].label = "x" + std::to_string(c + 1);
      series[c].values.resize(traj.size());
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
      t[k] = traj.time(k);
      for (std::size_t c = 0; c < traj.dim; ++c) series[c].values[k] = traj.state(k)[c];
    }
    write_file(dir / "timeseries.svg", svg_time_series("simulated trajectory", t, series));
    if (traj.dim >= 2)
      write_file(dir / "phase.svg", svg_phase_portrait("phase portrait", series[0].values, series[1].values, "x1", "x2"));
  }
  return kExitOk;
}

int cmd_detect(const RunConfig& cfg, const std::string& input) {
  DetectConfig dc = cfg.detect;
  dc.orbit_time_offset = cfg.signal.burn_in;
  const double end = std::max(dc.poisson_start + dc.poisson_length, dc.window_start + dc.window_length);
  std::optional<ThetaSource> src;
  std::optional<DetectTarget> target;

  auto orbit_for_search = [&]() -> const LogisticOrbit* {
    if (!dc.explicit_shifts.empty()) return nullptr;
    if (!src) {
      RunConfig c = cfg;
      if (c.signal.orbit_length == 0) c.signal.orbit_length = static_cast<std::size_t>(end + c.signal.burn_in) + 2'000'000;
      src = theta_for(c, 0.0);
    }
    return src->orbit.get();
  };

  if (!input.empty()) {
    target = target_from_signal(read_signal_csv(input));
  } else {
    RunConfig c = cfg;
    if (c.signal.orbit_length == 0 && dc.explicit_shifts.empty())
      c.signal.orbit_length = static_cast<std::size_t>(end + c.signal.burn_in) + 2'000'000;
    VectorSignal g = forcing_for(c, cfg.system.forcing, end + 1e4, &src);
    if (!cfg.system.transform.empty()) g = linear_transform(g, parse_matrix(cfg.system.transform));
    if (!cfg.system.matrix.empty()) {
      const SpectralSplit split = spectral_split(parse_matrix(cfg.system.matrix));
      require(g.dimension() == split.dimension(), "cli", "forcing dimension does not match the matrix");
      BoundedOptions o;
      o.tol = cfg.system.tol;
      o.step = cfg.system.h;
      o.max_horizon = cfg.system.max_horizon;
      target = target_from_bounded(split, g, o);
    } else {
      target = target_from_signal(g);
    }
  }
  const DetectionReport rep = verify_unpredictable(*target, orbit_for_search(), dc);
  if (!rep.search.diagnostic.empty()) std::cerr << "detect: " << rep.search.diagnostic << '\n';
  const std::string j = to_json(rep).dump(2) + "\n";
  write_file(fs::path(cfg.output.dir) / "detection.json", j);
  std::cout << j;
  return kExitOk;
}

int cmd_reproduce(const RunConfig& cfg, const std::string& which, double t_end, bool detect) {
  ReproduceOptions o;
  o.signal = cfg.signal;
  o.t_end = t_end;
  o.run_detector = detect;
  o.output = cfg.output;
  o.out_dir = fs::path(cfg.output.dir) / which;
  const auto started = std::chrono::steady_clock::now();
  ReproduceResult r;
  if (which == "example1") {
    r = reproduce_example1(o);
  } else if (which == "example2") {
    std::cerr << "note: the second system needs h = " << o.h_stiff << " (" << std::llround(t_end / o.h_stiff)
              << " RK4 steps) because of the eigenvalue -52098\n";
    r = reproduce_example2(o);
  } else {
    throw ConfigError("cli: unknown example '" + which + "' (expected example1 or example2)");
  }
  for (const auto& p : r.artifacts) std::cerr << "wrote " << p.string() << '\n';
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::cerr << which << ": max ||x|| = " << r.max_norm << ", envelope = " << r.envelope
            << (r.within_envelope ? " (within)" : " (EXCEEDED)") << ", " << secs << " s\n";
  std::cout << r.summary.dump(2) << '\n';
  return r.within_envelope ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unpredictable signals, bounded solutions of hyperbolic linear systems, and a detector"};
  app.require_subcommand(1);
  // "-h" is taken by the step option.
  app.set_help_flag("--help", "print this help message and exit");

  Common c_gen, c_bounded, c_sim, c_detect, c_repro;

  auto* gen = app.add_subcommand("gen-theta", "write the logistic orbit and Theta as CSV");
  c_gen.attach(gen);
  double t_max = 0, step = 0;
  auto* o_tmax = gen->add_option("--t-max", t_max, "end of the sampled range");
  auto* o_step = gen->add_option("--step", step, "sampling step");

  auto* split = app.add_subcommand("split", "spectral split and dichotomy constants as JSON");
  std::string split_matrix, split_out;
  double gap_tol = kDefaultGapTol;
  split->add_option("--matrix", split_matrix, "\"[[a,b],[c,d]]\" or CSV file")->required();
  split->add_option("--gap-tol", gap_tol, "smallest admissible |Re lambda|");
  split->add_option("--out", split_out, "output file (default stdout)");

  auto* bounded = app.add_subcommand("solve-bounded", "bounded solution on a window, with certificate");
  c_bounded.attach(bounded);
  std::string b_matrix, b_forcing, b_window = "0,10";
  double b_tol = 0, b_h = 0, b_step = 0;
  bool b_residual = true;
  auto* ob_m = bounded->add_option("--matrix", b_matrix, "system matrix");
  auto* ob_f = bounded->add_option("--forcing-spec", b_forcing, "forcing mini-language");
  bounded->add_option("--window", b_window, "a,b");
  auto* ob_tol = bounded->add_option("--tol", b_tol, "requested accuracy");
  auto* ob_h = bounded->add_option("--h", b_h, "integrator step");
  auto* ob_step = bounded->add_option("--step", b_step, "output spacing (multiple of h)");
  bounded->add_flag("!--no-residual", b_residual, "skip the residual certificate");

  auto* sim = app.add_subcommand("simulate", "fixed-step RK4 trajectory");
  c_sim.attach(sim);
  std::string s_matrix, s_forcing, s_x0;
  double s_h = 0, s_t0 = 0;
  std::size_t s_steps = 1000, s_stride = 1;
  auto* os_m = sim->add_option("--matrix", s_matrix, "system matrix");
  auto* os_f = sim->add_option("--forcing-spec", s_forcing, "forcing mini-language");
  auto* os_x0 = sim->add_option("--x0", s_x0, "initial state a,b,...");
  auto* os_h = sim->add_option("--h", s_h, "step");
  sim->add_option("--steps", s_steps, "number of steps");
  sim->add_option("--t0", s_t0, "initial time");
  sim->add_option("--stride", s_stride, "record every n-th step");

  auto* det = app.add_subcommand("detect", "numerical unpredictability evidence as JSON");
  c_detect.attach(det);
  std::string d_input, d_pipeline;
  auto* od_in = det->add_option("--input", d_input, "CSV signal (t, values...)");
  auto* od_pipe = det->add_option("--pipeline", d_pipeline, "config describing the signal/system to build");
  od_in->excludes(od_pipe);

  auto* repro = app.add_subcommand("reproduce", "rerun a reproduction example");
  c_repro.attach(repro);
  std::string which;
  double r_tend = 200.0;
  bool r_detect = true;
  repro->add_option("example", which, "example1 or example2")->required();
  repro->add_option("--t-end", r_tend, "simulation window [0, t_end]");
  repro->add_flag("!--no-detect", r_detect, "skip the detector run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gen->parsed()) {
      RunConfig cfg = c_gen.load();
      if (o_tmax->count()) cfg.t_max = t_max;
      if (o_step->count()) cfg.step = step;
      return cmd_gen_theta(cfg);
    }
    if (split->parsed()) return cmd_split(split_matrix, gap_tol, split_out);
    if (bounded->parsed()) {
      RunConfig cfg = c_bounded.load();
      if (ob_m->count()) cfg.system.matrix = b_matrix;
      if (ob_f->count()) cfg.system.forcing = b_forcing;
      if (ob_tol->count()) cfg.system.tol = b_tol;
      if (ob_h->count()) cfg.system.h = b_h;
      if (ob_step->count()) cfg.step = b_step;
      validate(cfg);
      return cmd_solve_bounded(cfg, b_window, b_residual);
    }
    if (sim->parsed()) {
      RunConfig cfg = c_sim.load();
      if (os_m->count()) cfg.system.matrix = s_matrix;
      if (os_f->count()) cfg.system.forcing = s_forcing;
      if (os_x0->count()) cfg.system.x0 = s_x0;
      if (os_h->count()) cfg.system.h = s_h;
      validate(cfg);
      require(s_stride > 0, "cli", "--stride must be positive");
      return cmd_simulate(cfg, s_t0, s_steps, s_stride);
    }
    if (det->parsed()) {
      require(od_in->count() || od_pipe->count(), "cli", "detect needs --input or --pipeline");
      RunConfig cfg;
      if (!d_pipeline.empty()) {
        cfg = apply_config(read_config(d_pipeline));
        // --config may add detector overrides on top of the pipeline file.
        if (!c_detect.config_path.empty()) {
          ConfigDocument extra = read_config(c_detect.config_path);
          cfg = apply_config(extra, cfg);
        }
        Common flags_only = c_detect;
        flags_only.config_path.clear();
        RunConfig f = flags_only.load();
        if (c_detect.o_seed->count()) cfg.signal.seed = f.signal.seed;
        if (c_detect.o_mu->count()) cfg.signal.mu = f.signal.mu;
        if (c_detect.o_gamma->count()) cfg.signal.gamma = f.signal.gamma;
        if (c_detect.o_burn->count()) cfg.signal.burn_in = f.signal.burn_in;
        if (c_detect.o_orbit->count()) cfg.signal.orbit_length = f.signal.orbit_length;
        if (c_detect.o_out->count()) cfg.output.dir = f.output.dir;
      } else {
        cfg = c_detect.load();
      }
      validate(cfg);
      return cmd_detect(cfg, d_input);
    }
    if (repro->parsed()) {
      RunConfig cfg = c_repro.load();
      validate(cfg);
      return cmd_reproduce(cfg, which, r_tend, r_detect);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
