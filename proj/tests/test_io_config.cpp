#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "unpred/config.hpp"
#include "unpred/errors.hpp"
#include "unpred/forcing.hpp"
#include "unpred/io.hpp"
#include "unpred/sim.hpp"
#include "unpred/svg.hpp"

using namespace unpred;

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("tabulated CSV parsing") {
  const TabulatedData d = parse_tabulated_csv("t,x,y\n0,1,2\n0.5,3,4\n1,5,-8\n");
  CHECK(d.rows() == 3);
  CHECK(d.columns() == 2);
  CHECK(d.header == std::vector<std::string>{"x", "y"});
  CHECK(d.interpolate(0, 0.25) == doctest::Approx(2.0));
  CHECK(d.interpolate(1, 0.75) == doctest::Approx(-2.0));
  CHECK(d.interpolate(0, 5.0) == 5.0);
  CHECK(d.column_max_abs(1) == 8.0);
  CHECK_THROWS_AS(parse_tabulated_csv("t,x\n0,1\n0,2\n"), ConfigError);
  CHECK_THROWS_AS(parse_tabulated_csv("t,x\n0,1\n1\n"), ConfigError);
  CHECK_THROWS_AS(parse_tabulated_csv("t,x\n0,abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_tabulated_csv(""), ConfigError);
}

TEST_CASE("signal CSV writer") {
  std::ostringstream os;
  const VectorSignal g = build_forcing("1, sin(t)", {});
  write_signal_csv(os, g, 0.0, 1.0, 0.25, {"a", "b"});
  const std::string s = os.str();
  CHECK(s.rfind("t,a,b\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 6);
  std::ostringstream empty;
  write_signal_csv(empty, g, 0.0, -1.0, 0.25, {"a", "b"});
  CHECK(empty.str() == "t,a,b\n");
  const TabulatedData back = parse_tabulated_csv(s);
  CHECK(back.data[1][4] == std::sin(1.0));
}

TEST_CASE("trajectory CSV") {
  const Vector x0{1.0};
  const Trajectory tr = rk4_integrate(Matrix{{-1.0}}, zero_signal(1), 0.0, x0, 0.1, 4, 2);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  const TabulatedData d = parse_tabulated_csv(os.str());
  CHECK(d.rows() == 3);
  CHECK(d.times[2] == doctest::Approx(0.4));
}

TEST_CASE("matrix and vector parsing") {
  const Matrix m = parse_matrix("[[-2, 2], [1, -3]]");
  CHECK(m == Matrix{{-2, 2}, {1, -3}});
  CHECK(parse_matrix("[[5]]") == Matrix{{5}});
  CHECK_THROWS_AS(parse_matrix("[[1,2],[3]]"), ConfigError);
  CHECK_THROWS_AS(parse_matrix("[[1,2],[3,4]"), ConfigError);
  CHECK_THROWS_AS(parse_matrix("/nonexistent/matrix.csv"), ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "unpred_matrix.csv";
  {
    std::ofstream f(path);
    f << "1,2\n3,4\n";
  }
  CHECK(parse_matrix(path.string()) == Matrix{{1, 2}, {3, 4}});
  std::filesystem::remove(path);
  CHECK(parse_vector("[0.18, 0.01]") == Vector{0.18, 0.01});
  CHECK(parse_vector("1,2,3") == Vector{1, 2, 3});
  CHECK_THROWS_AS(parse_vector("1,x"), ConfigError);
}

TEST_CASE("JSON serialization") {
  const SpectralSplit split = spectral_split(Matrix{{-1, 0}, {0, 2}});
  const Json j = to_json(split);
  CHECK(j.at("q") == 1);
  CHECK(j.contains("K"));
  CHECK(j.contains("alpha"));
  CHECK(j.at("eigenvalues_minus").size() == 1);
  CHECK(j.at("eigenvalues_plus").size() == 1);
  DetectionReport rep;
  rep.shifts = {1.0, 2.0};
  const Json r = to_json(rep);
  for (const char* key : {"shifts", "divergences", "u_n", "epsilon0", "delta", "verdict", "config"})
    CHECK_MESSAGE(r.contains(key), key);
  CHECK(r.at("verdict").at("unpredictable") == false);
}

TEST_CASE("SVG output is a standalone document") {
  std::vector<double> t{0, 1, 2, 3}, x{0, 1, 0, -1};
  const std::string s = svg_time_series("demo", t, {SvgSeries{"x", x}}, "t");
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("demo") != std::string::npos);
  const std::string p = svg_phase_portrait("phase", x, t, "x", "t");
  CHECK(p.find("<polyline") != std::string::npos);
}

TEST_CASE("config parsing") {
  const ConfigDocument doc = parse_config(R"(
# comment
[signal]
seed = 0.25
mu = 3.9          # trailing comment
t_max = 50

[system]
matrix = "[[-1, 0], [0, 2]]"

[detect]
delta_grid = [0.1, 0.2]
threshold_scale = "sup_norm"
shifts = [10, 20, 30]

[output]
formats = ["csv", "json"]
)");
  const RunConfig c = apply_config(doc);
  CHECK(c.signal.seed == 0.25);
  CHECK(c.signal.mu == 3.9);
  CHECK(c.t_max == 50.0);
  CHECK(c.system.matrix == "[[-1, 0], [0, 2]]");
  CHECK(c.detect.delta_grid == std::vector<double>{0.1, 0.2});
  CHECK(c.detect.threshold_scale == ThresholdScale::sup_norm);
  CHECK(c.detect.explicit_shifts == std::vector<double>{10, 20, 30});
  CHECK(c.output.wants("csv"));
  CHECK_FALSE(c.output.wants("svg"));
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(apply_config(parse_config("[signal]\nbogus = 1\n")), ConfigError);
  CHECK_THROWS_AS(apply_config(parse_config("[nowhere]\nseed = 1\n")), ConfigError);
  CHECK_THROWS_AS(apply_config(parse_config("[signal]\nseed = \"x\"\n")), ConfigError);
  CHECK_THROWS_AS(parse_config("[signal]\nseed = 0.1\nseed = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[signal\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed 0.1\n"), ConfigError);
  CHECK_THROWS_AS(apply_config(parse_config("[detect]\nthreshold_scale = \"huge\"\n")), ConfigError);
  CHECK_THROWS_AS(apply_config(parse_config("[detect]\nshift_count = 2.5\n")), ConfigError);
  RunConfig bad;
  bad.signal.mu = 5.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  CHECK_THROWS_AS(read_config("/nonexistent/unpred.toml"), ConfigError);
}
