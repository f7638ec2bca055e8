// Config layer and CLI driver: strict JSON schema, defaults, round trips, and
// the exit-code / artifact contract of every subcommand.  The binary under
// test is spawned through std::system; SGFD_CLI_PATH is injected by CMake.
#include "test_helpers.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgfd/sgfd.hpp"

using namespace sgfd;
using namespace sgfd::testing;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
namespace fs = std::filesystem;

namespace {

const fs::path& test_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "sgfd_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path p = test_root() / name;
  std::ofstream os(p);
  os << text;
  os.close();
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

nlohmann::json slurp_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Runs the installed binary; stdout/stderr land in test_root for inspection.
int run_tool(const std::string& args) {
  const std::string cmd = std::string(SGFD_CLI_PATH) + " " + args + " > " +
                          (test_root() / "last_stdout.txt").string() + " 2> " +
                          (test_root() / "last_stderr.txt").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string last_stderr() { return slurp(test_root() / "last_stderr.txt"); }
std::string last_stdout() { return slurp(test_root() / "last_stdout.txt"); }

constexpr double kBox4Pi = 12.566370614359172;    // 4 pi
constexpr double kBox16Pi = 50.26548245743669;    // 16 pi
constexpr double kBox32Pi = 100.53096491487338;   // 32 pi

}  // namespace

TEST_CASE("an empty config yields the documented defaults") {
  const ExperimentConfig c = parse_config("{}");
  CHECK(to_json_config(c) == to_json_config(ExperimentConfig{}));
  CHECK(c.experiment_id == "unnamed");
  CHECK(c.dim == 3);
  CHECK(c.n_points == 32);
  CHECK(c.box_length == Catch::Approx(kBox32Pi).epsilon(1e-14));
  CHECK(c.params.alpha == 1.0);
  CHECK(c.params.mu == 1.0);
  CHECK(c.profile.kind == ProfileKind::power_law);
  CHECK(c.solver.dt == 0.0);
  CHECK(c.solver.scheme == Scheme::integrating_factor_rk4);
  CHECK(c.estimate_source == "lattice");
  CHECK(c.use_estimated_character);
  CHECK(c.sweep_r_values.empty());
}

TEST_CASE("emit and parse round-trip every field") {
  ExperimentConfig c;
  c.experiment_id = "roundtrip";
  c.n_points = 24;
  c.box_length = 50.0;
  c.params.alpha = 1.3;
  c.params.mu = 0.7;
  c.profile.kind = ProfileKind::oscillatory;
  c.profile.r = 0.25;
  c.profile.amplitude = 2.0;
  c.profile.cutoff_radius = 0.8;
  c.profile.smoothing_width = 0.05;
  c.profile.r_lo = -0.75;
  c.profile.r_hi = 0.5;
  c.profile.log_period = 1.5;
  c.profile.p = 1.25;
  c.seed = 99;
  c.target_v2_norm = 0.02;
  c.solver.dt = 0.01;
  c.solver.t_end = 2.5;
  c.solver.output_stride = 3;
  c.solver.diagnostics_stride = 7;
  c.solver.scheme = Scheme::rk2;
  c.solver.snapshot_times = {0.5, 1.5};
  c.linear_t_min = 0.2;
  c.linear_t_max = 2.0e3;
  c.linear_points_per_decade = 10;
  c.linear_derivative_order = 2;
  c.estimate_source = "continuum";
  c.radius_min_factor = 2.5;
  c.radius_max_factor = 0.75;
  c.rho_min = 1.0e-2;
  c.rho_max = 0.5;
  c.n_radii = 16;
  c.estimate.min_samples = 6;
  c.estimate.min_span_decades = 1.2;
  c.estimate.small_radius_fraction = 0.4;
  c.estimate.window_points = 9;
  c.estimate.rhat_tolerance = 0.25;
  c.verify.window = {0.5, 20.0};
  c.verify.exponent_tolerance = 0.1;
  c.verify.gap_tolerance = 0.2;
  c.verify.upper_slack = 2.0;
  c.verify.lower_drop = 20.0;
  c.verify.check_gap = true;
  c.verify.min_samples = 12;
  c.use_estimated_character = false;
  c.expected_r = -0.5;
  c.sweep_r_values = {-0.5, 0.0, 1.0};
  c.validate();

  const ExperimentConfig back = parse_config(emit_config(c));
  CHECK(to_json_config(back) == to_json_config(c));
}

TEST_CASE("unknown keys are rejected with their location") {
  const std::pair<const char*, const char*> cases[] = {
      {R"({"grids": {}})", "unknown key 'grids' in the top level"},
      {R"({"grid": {"n": 4}})", "unknown key 'n' in grid"},
      {R"({"physics": {"nu": 1.0}})", "unknown key 'nu' in physics"},
      {R"({"initial_data": {"radius": 1.0}})", "unknown key 'radius' in initial_data"},
      {R"({"solver": {"cfl": 0.5}})", "unknown key 'cfl' in solver"},
      {R"({"linear": {"points": 8}})", "unknown key 'points' in linear"},
      {R"({"character_estimate": {"window": 7}})", "unknown key 'window' in character_estimate"},
      {R"({"verify": {"tol": 0.1}})", "unknown key 'tol' in verify"},
      {R"({"sweep": {"values": []}})", "unknown key 'values' in sweep"},
  };
  for (const auto& [text, msg] : cases) {
    INFO(text);
    CHECK_THROWS_MATCHES(parse_config(text), std::invalid_argument, MessageMatches(ContainsSubstring(msg)));
  }
  CHECK_THROWS_MATCHES(parse_config(R"({"grid": 3})"), std::invalid_argument,
                       MessageMatches(ContainsSubstring("'grid' must be a JSON object")));
}

TEST_CASE("type, range and syntax errors raise invalid_argument") {
  CHECK_THROWS_MATCHES(parse_config(R"({"grid": {"n_points": "many"}})"), std::invalid_argument,
                       MessageMatches(ContainsSubstring("bad value for 'n_points'")));
  CHECK_THROWS_AS(parse_config(R"({"grid": {"n_points": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"physics": {"alpha": -1.0}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"t_end": 0.0}})"), std::invalid_argument);
  CHECK_THROWS_MATCHES(parse_config(R"({"initial_data": {"profile": "gaussian"}})"),
                       std::invalid_argument, MessageMatches(ContainsSubstring("profile must be")));
  CHECK_THROWS_MATCHES(parse_config(R"({"solver": {"scheme": "euler"}})"), std::invalid_argument,
                       MessageMatches(ContainsSubstring("scheme must be")));
  CHECK_THROWS_AS(parse_config(R"({"linear": {"points_per_decade": 1}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"character_estimate": {"source": "fft"}})"),
                  std::invalid_argument);
  CHECK_THROWS_MATCHES(parse_config(R"({"experiment_id": ""})"), std::invalid_argument,
                       MessageMatches(ContainsSubstring("non-empty")));
  CHECK_THROWS_MATCHES(parse_config("{not json"), std::invalid_argument,
                       MessageMatches(ContainsSubstring("JSON parse error")));
  CHECK_THROWS_MATCHES(load_config_file((test_root() / "missing.json").string()),
                       std::invalid_argument, MessageMatches(ContainsSubstring("cannot open")));
}

TEST_CASE("sweep rejects configs it cannot expand") {
  const std::string dir = (test_root() / "sweep_guard").string();
  CHECK_THROWS_MATCHES(cmd_sweep(parse_config("{}"), dir, 1, false), std::invalid_argument,
                       MessageMatches(ContainsSubstring("no sweep.r_values")));
  ExperimentConfig c = parse_config(R"({"sweep": {"r_values": [0.0]}})");
  c.profile.kind = ProfileKind::oscillatory;
  CHECK_THROWS_MATCHES(cmd_sweep(c, dir, 1, false), std::invalid_argument,
                       MessageMatches(ContainsSubstring("power_law")));
}

TEST_CASE("usage and config errors exit with code 2") {
  CHECK(run_tool("--help") == 0);
  CHECK_THAT(last_stdout(), ContainsSubstring("simulate"));
  CHECK_THAT(last_stdout(), ContainsSubstring("linear-decay"));

  CHECK(run_tool("") == 2);
  CHECK(run_tool("frobnicate") == 2);
  CHECK(run_tool("simulate") == 2);  // missing required --config
  CHECK(run_tool("simulate -c " + (test_root() / "missing.json").string()) == 2);

  const std::string bad = write_config("bad.json", "nope{");
  CHECK(run_tool("simulate -c " + bad + " -o " + (test_root() / "bad_out").string()) == 2);
  CHECK_THAT(last_stderr(), ContainsSubstring("JSON parse error"));

  const std::string no_vals = write_config("no_vals.json", R"({"experiment_id": "g"})");
  CHECK(run_tool("sweep -c " + no_vals + " -o " + (test_root() / "g_out").string()) == 2);
}

TEST_CASE("simulate writes the promised artifacts and echoes the effective config") {
  const std::string cfg_path = write_config("sim16.json", R"({
    "experiment_id": "cli_sim16",
    "grid": {"n_points": 16, "box_length": 12.566370614359172},
    "physics": {"alpha": 1.0, "mu": 1.0},
    "initial_data": {"profile": "power_law", "r": 0.0, "cutoff_radius": 0.5,
                     "smoothing_width": 0.1, "amplitude": 1.0, "seed": 11,
                     "target_v2_norm": 0.01},
    "solver": {"dt": 0.03125, "t_end": 0.25, "output_stride": 1,
               "diagnostics_stride": 2, "snapshot_times": [0.0, 0.125, 0.25]}
  })");
  const fs::path out = test_root() / "sim16_out";
  REQUIRE(run_tool("simulate -c " + cfg_path + " -o " + out.string()) == 0);

  for (const char* f : {"trajectory.csv", "run_summary.json", "effective_config.json",
                        "snapshot_t0.bin", "snapshot_t0.125.bin", "snapshot_t0.25.bin"}) {
    INFO(f);
    CHECK(fs::exists(out / f));
  }

  const nlohmann::json summary = slurp_json(out / "run_summary.json");
  CHECK(summary.at("experiment_id") == "cli_sim16");
  CHECK(summary.at("n_steps") == 8);
  CHECK(summary.at("effective_dt") == 0.03125);
  CHECK(summary.at("monotonicity_violations") == 0);
  CHECK(summary.at("warnings").empty());

  // the echoed config is itself a loadable config and records the dt used
  const ExperimentConfig echoed = load_config_file((out / "effective_config.json").string());
  CHECK(echoed.experiment_id == "cli_sim16");
  CHECK(echoed.solver.dt == 0.03125);
  CHECK(echoed.box_length == kBox4Pi);

  // snapshots restore bit-for-bit: t = 0 equals the generated data
  const Snapshot snap0 = read_snapshot((out / "snapshot_t0.bin").string());
  CHECK(snap0.time == 0.0);
  CHECK(snap0.params.alpha == 1.0);
  CHECK(snap0.field.grid.n_points() == 16);
  const ExperimentConfig cfg = load_config_file(cfg_path);
  const Grid grid = cfg.make_grid();
  const SpectralVectorField u0 =
      make_data(cfg.profile, grid, cfg.params, cfg.seed, cfg.target_v2_norm);
  CHECK(rel_max_diff(snap0.field, u0) == 0.0);

  const Snapshot snap_mid = read_snapshot((out / "snapshot_t0.125.bin").string());
  CHECK(snap_mid.time == 0.125);
  CHECK(norm_h1alpha_sq(snap_mid.field, cfg.params) <= norm_h1alpha_sq(u0, cfg.params));

  // 8 output rows plus t = 0 plus the header
  const std::string traj = slurp(out / "trajectory.csv");
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 10);
}

TEST_CASE("repeated runs are byte-identical") {
  const std::string cfg_path = write_config("repeat.json", R"({
    "experiment_id": "cli_repeat",
    "grid": {"n_points": 16, "box_length": 12.566370614359172},
    "initial_data": {"profile": "power_law", "r": 0.0, "cutoff_radius": 0.5,
                     "smoothing_width": 0.1, "seed": 11, "target_v2_norm": 0.01},
    "solver": {"dt": 0.03125, "t_end": 0.25, "output_stride": 1,
               "diagnostics_stride": 2, "snapshot_times": [0.25]}
  })");
  const fs::path out_a = test_root() / "repeat_a";
  const fs::path out_b = test_root() / "repeat_b";
  REQUIRE(run_tool("simulate -c " + cfg_path + " -o " + out_a.string()) == 0);
  REQUIRE(run_tool("simulate -c " + cfg_path + " -o " + out_b.string()) == 0);
  for (const char* f : {"trajectory.csv", "run_summary.json", "effective_config.json",
                        "snapshot_t0.25.bin"}) {
    INFO(f);
    CHECK(slurp(out_a / f) == slurp(out_b / f));
  }
}

TEST_CASE("an auto-derived dt is echoed back") {
  const std::string cfg_path = write_config("auto_dt.json", R"({
    "experiment_id": "cli_auto",
    "grid": {"n_points": 16, "box_length": 12.566370614359172},
    "initial_data": {"profile": "power_law", "r": 0.0, "cutoff_radius": 0.5,
                     "smoothing_width": 0.1, "seed": 11, "target_v2_norm": 0.01},
    "solver": {"t_end": 0.125, "output_stride": 4}
  })");
  const fs::path out = test_root() / "auto_dt_out";
  REQUIRE(run_tool("simulate -c " + cfg_path + " -o " + out.string()) == 0);
  const nlohmann::json summary = slurp_json(out / "run_summary.json");
  const double dt = summary.at("effective_dt").get<double>();
  CHECK(dt > 0.0);
  CHECK_FALSE(summary.at("warnings").empty());
  const ExperimentConfig echoed = load_config_file((out / "effective_config.json").string());
  CHECK(echoed.solver.dt == dt);
}

TEST_CASE("linear-decay fits the continuum rate") {
  const std::string cfg_path = write_config("lin.json", R"({
    "experiment_id": "cli_lin",
    "initial_data": {"profile": "power_law", "r": 0.0, "cutoff_radius": 1.0,
                     "smoothing_width": 0.1},
    "linear": {"t_min": 0.1, "t_max": 1.0e4, "points_per_decade": 6}
  })");
  const fs::path out = test_root() / "lin_out";
  REQUIRE(run_tool("linear-decay -c " + cfg_path + " -o " + out.string()) == 0);
  CHECK(fs::exists(out / "linear_curve.csv"));
  CHECK(fs::exists(out / "effective_config.json"));
  const nlohmann::json report = slurp_json(out / "linear_report.json");
  CHECK(report.at("predicted_exponent") == 1.5);
  CHECK(report.at("exponent_match") == true);
  CHECK(report.at("sandwich").at("valid") == true);
  CHECK(-report.at("fit").at("exponent").get<double>() == Catch::Approx(1.5).margin(0.05));
}

TEST_CASE("decay-character on the continuum source recovers r and the shift") {
  const std::string cfg_path = write_config("char.json", R"({
    "experiment_id": "cli_char",
    "initial_data": {"profile": "power_law", "r": -0.5, "cutoff_radius": 1.0,
                     "smoothing_width": 0.1},
    "character_estimate": {"source": "continuum", "rho_min": 1.0e-3,
                           "rho_max": 1.0, "n_radii": 48}
  })");
  const fs::path out = test_root() / "char_out";
  REQUIRE(run_tool("decay-character -c " + cfg_path + " -o " + out.string()) == 0);
  CHECK(fs::exists(out / "shells.csv"));
  CHECK(fs::exists(out / "effective_config.json"));
  const nlohmann::json report = slurp_json(out / "character_report.json");
  CHECK(report.at("source") == "continuum");
  CHECK(report.at("expected_r") == -0.5);
  REQUIRE(report.at("base").contains("r_hat"));
  CHECK(report.at("base").at("r_hat").get<double>() == Catch::Approx(-0.5).margin(0.1));
  CHECK(report.at("gradient_shift").get<double>() == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("compare flags a too-slow run and exits 1") {
  // On a 16 pi box the spectral gap keeps the energy nearly flat until
  // t* = 32.5, so a fit over [0.2, 2] sits far below the predicted rate.
  const std::string cfg_path = write_config("cmp16.json", R"({
    "experiment_id": "cli_cmp16",
    "grid": {"n_points": 16, "box_length": 50.26548245743669},
    "initial_data": {"profile": "power_law", "r": 0.0, "cutoff_radius": 0.5,
                     "smoothing_width": 0.1, "seed": 5, "target_v2_norm": 0.01},
    "solver": {"dt": 0.015625, "t_end": 2.0, "output_stride": 1,
               "diagnostics_stride": 4},
    "verify": {"window_t_lo": 0.2, "window_t_hi": 2.0,
               "use_estimated_character": false, "expected_r": 0.0}
  })");
  const fs::path out = test_root() / "cmp16_out";
  CHECK(run_tool("compare -c " + cfg_path + " -o " + out.string()) == 1);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "effective_config.json"));
  const nlohmann::json report = slurp_json(out / "verification_report.json");
  CHECK(report.at("all_pass") == false);
  CHECK(report.contains("run_summary"));
  bool saw_rate = false, saw_mono = false;
  for (const auto& c : report.at("checks")) {
    if (c.at("name") == "solution_exponent") {
      saw_rate = true;
      CHECK(c.at("pass") == false);
    }
    if (c.at("name") == "energy_monotone") {
      saw_mono = true;
      CHECK(c.at("pass") == true);
    }
  }
  CHECK(saw_rate);
  CHECK(saw_mono);
}

TEST_CASE("compare aborts with exit 3 when the character is not estimable") {
  // A fast log-periodic oscillation leaves r_plus and r_minus far apart, so
  // requesting the estimated character is a numerical failure, not a usage one.
  const std::string cfg_path = write_config("osc.json", R"({
    "experiment_id": "cli_osc",
    "grid": {"n_points": 32, "box_length": 100.53096491487338},
    "initial_data": {"profile": "oscillatory", "r_lo": -1.0, "r_hi": 0.0,
                     "log_period": 0.8, "cutoff_radius": 0.5,
                     "smoothing_width": 0.1, "seed": 3, "target_v2_norm": 0.01},
    "solver": {"dt": 0.05, "t_end": 0.5}
  })");
  const fs::path out = test_root() / "osc_out";
  CHECK(run_tool("compare -c " + cfg_path + " -o " + out.string()) == 3);
  CHECK_THAT(last_stderr(), ContainsSubstring("not estimable"));
}

TEST_CASE("sweep writes per-character directories and aggregates the exit code") {
  const std::string cfg_path = write_config("sweep.json", R"({
    "experiment_id": "cli_sweep",
    "grid": {"n_points": 16, "box_length": 50.26548245743669},
    "initial_data": {"profile": "power_law", "r": 0.0, "cutoff_radius": 0.5,
                     "smoothing_width": 0.1, "seed": 5, "target_v2_norm": 0.01},
    "solver": {"dt": 0.03125, "t_end": 1.0, "output_stride": 1,
               "diagnostics_stride": 4},
    "verify": {"window_t_lo": 0.25, "window_t_hi": 1.0,
               "use_estimated_character": false},
    "sweep": {"r_values": [-0.5, 0.0]}
  })");
  const fs::path out = test_root() / "sweep_out";
  CHECK(run_tool("sweep -j 2 -c " + cfg_path + " -o " + out.string()) == 1);
  CHECK(fs::exists(out / "effective_config.json"));
  const nlohmann::json summary = slurp_json(out / "sweep_summary.json");
  REQUIRE(summary.size() == 2);
  std::vector<double> rs;
  for (const auto& job : summary) {
    rs.push_back(job.at("r").get<double>());
    CHECK(job.at("exit_code") == 1);  // short plateau run cannot match the rate
    CHECK(job.at("all_pass") == false);
    const fs::path dir(job.at("output_dir").get<std::string>());
    CHECK(fs::exists(dir / "verification_report.json"));
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "effective_config.json"));
  }
  std::sort(rs.begin(), rs.end());
  CHECK(rs == std::vector<double>{-0.5, 0.0});
}
