// Experiment configuration: a strict JSON schema covering the grid, the
// physical parameters, the initial-data profile, solver controls, linear
// curve sampling, decay-character estimation and verification tolerances.
//
// Parsing is strict: unknown keys anywhere are an error, values are
// range-checked, and parse(emit(cfg)) reproduces cfg exactly (doubles are
// serialized with round-trip precision).
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgfd/asymptotics.hpp"
#include "sgfd/decay_character.hpp"
#include "sgfd/solver.hpp"

namespace sgfd {

struct ExperimentConfig {
  std::string experiment_id = "unnamed";
  // grid
  int dim = 3;
  int n_points = 32;
  double box_length = 2.0 * pi * 16.0;
  // physics
  SimParams params;
  // initial data
  RadialProfile profile;
  std::uint64_t seed = 1;
  double target_v2_norm = 1e-2;  // 0 disables the exact rescale
  // time stepping
  SolverConfig solver;
  // linear decay curve sampling (continuum evaluation)
  double linear_t_min = 0.1;
  double linear_t_max = 1.0e4;
  int linear_points_per_decade = 24;
  int linear_derivative_order = 0;
  // decay character estimation
  std::string estimate_source = "lattice";  // "lattice" | "continuum"
  double radius_min_factor = 3.0;   // lattice: smallest shell radius, in units of delta_k
  double radius_max_factor = 0.85;  // lattice: largest shell radius, as a fraction of the cutoff
  double rho_min = 1.0e-3;          // continuum radii span
  double rho_max = 1.0;
  int n_radii = 48;
  EstimateOptions estimate;
  // verification
  VerifyOptions verify;
  bool use_estimated_character = true;
  double expected_r = 0.0;
  // sweep (compare pipeline repeated over decay characters)
  std::vector<double> sweep_r_values;

  Grid make_grid() const { return Grid(dim, n_points, box_length); }

  void validate() const {
    if (experiment_id.empty())
      throw std::invalid_argument("config: experiment_id must be non-empty");
    Grid probe(dim, n_points, box_length);
    params.validate();
    if (profile.n != dim)
      throw std::invalid_argument("config: profile dimension must match the grid dimension");
    profile.validate();
    solver.validate();
    if (!(linear_t_min > 0.0) || !(linear_t_max > linear_t_min))
      throw std::invalid_argument("config: need 0 < linear.t_min < linear.t_max");
    if (linear_points_per_decade < 2)
      throw std::invalid_argument("config: linear.points_per_decade must be >= 2");
    if (linear_derivative_order < 0 || linear_derivative_order > 4)
      throw std::invalid_argument("config: linear.derivative_order must be in 0..4");
    if (estimate_source != "lattice" && estimate_source != "continuum")
      throw std::invalid_argument("config: character_estimate.source must be lattice or continuum");
    if (!(radius_min_factor > 0.0) || !(radius_max_factor > 0.0) || radius_max_factor > 1.0)
      throw std::invalid_argument("config: radius factors must satisfy min > 0, 0 < max <= 1");
    if (!(rho_min > 0.0) || !(rho_max > rho_min))
      throw std::invalid_argument("config: need 0 < rho_min < rho_max");
    if (n_radii < 8) throw std::invalid_argument("config: n_radii must be >= 8");
    if (estimate.min_samples < 4)
      throw std::invalid_argument("config: estimate.min_samples must be >= 4");
    if (estimate.window_points < 3)
      throw std::invalid_argument("config: estimate.window_points must be >= 3");
    if (!(estimate.rhat_tolerance > 0.0))
      throw std::invalid_argument("config: estimate.rhat_tolerance must be > 0");
    if (!(verify.window.t_hi > verify.window.t_lo) || verify.window.t_lo < 0.0)
      throw std::invalid_argument("config: verify window must satisfy 0 <= t_lo < t_hi");
    if (!(verify.exponent_tolerance > 0.0) || !(verify.gap_tolerance > 0.0))
      throw std::invalid_argument("config: verify tolerances must be > 0");
    if (!(verify.upper_slack >= 1.0) || !(verify.lower_drop >= 1.0))
      throw std::invalid_argument("config: verify.upper_slack and lower_drop must be >= 1");
    if (target_v2_norm < 0.0)
      throw std::invalid_argument("config: target_v2_norm must be >= 0");
    if (!use_estimated_character && !(expected_r > -1.5))
      throw std::invalid_argument("config: expected_r must exceed -3/2");
    for (double rv : sweep_r_values)
      if (!(rv > -1.5)) throw std::invalid_argument("config: sweep r values must exceed -3/2");
  }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const std::string& context) {
  if (!j.is_object())
    throw std::invalid_argument("config: '" + context + "' must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + context);
  }
}

template <typename T>
T get_field(const json& j, const char* key, T fallback, const std::string& context) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument("config: bad value for '" + std::string(key) + "' in " + context +
                                ": " + e.what());
  }
}

inline ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "power_law") return ProfileKind::power_law;
  if (s == "oscillatory") return ProfileKind::oscillatory;
  if (s == "lp_like") return ProfileKind::lp_like;
  throw std::invalid_argument("config: profile must be power_law, oscillatory or lp_like");
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "integrating_factor_rk4") return Scheme::integrating_factor_rk4;
  if (s == "rk2") return Scheme::rk2;
  throw std::invalid_argument("config: scheme must be integrating_factor_rk4 or rk2");
}

}  // namespace detail

inline nlohmann::json to_json_config(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment_id"] = c.experiment_id;
  j["grid"] = {{"dim", c.dim}, {"n_points", c.n_points}, {"box_length", c.box_length}};
  j["physics"] = {{"alpha", c.params.alpha}, {"mu", c.params.mu}};
  j["initial_data"] = {{"profile", to_string(c.profile.kind)},
                       {"r", c.profile.r},
                       {"amplitude", c.profile.amplitude},
                       {"cutoff_radius", c.profile.cutoff_radius},
                       {"smoothing_width", c.profile.smoothing_width},
                       {"r_lo", c.profile.r_lo},
                       {"r_hi", c.profile.r_hi},
                       {"log_period", c.profile.log_period},
                       {"p", c.profile.p},
                       {"seed", c.seed},
                       {"target_v2_norm", c.target_v2_norm}};
  j["solver"] = {{"dt", c.solver.dt},
                 {"t_end", c.solver.t_end},
                 {"output_stride", c.solver.output_stride},
                 {"diagnostics_stride", c.solver.diagnostics_stride},
                 {"scheme", std::string(to_string(c.solver.scheme))},
                 {"snapshot_times", c.solver.snapshot_times}};
  j["linear"] = {{"t_min", c.linear_t_min},
                 {"t_max", c.linear_t_max},
                 {"points_per_decade", c.linear_points_per_decade},
                 {"derivative_order", c.linear_derivative_order}};
  j["character_estimate"] = {{"source", c.estimate_source},
                             {"radius_min_factor", c.radius_min_factor},
                             {"radius_max_factor", c.radius_max_factor},
                             {"rho_min", c.rho_min},
                             {"rho_max", c.rho_max},
                             {"n_radii", c.n_radii},
                             {"min_samples", c.estimate.min_samples},
                             {"min_span_decades", c.estimate.min_span_decades},
                             {"small_radius_fraction", c.estimate.small_radius_fraction},
                             {"window_points", c.estimate.window_points},
                             {"rhat_tolerance", c.estimate.rhat_tolerance}};
  j["verify"] = {{"window_t_lo", c.verify.window.t_lo},
                 {"window_t_hi", c.verify.window.t_hi},
                 {"exponent_tolerance", c.verify.exponent_tolerance},
                 {"gap_tolerance", c.verify.gap_tolerance},
                 {"upper_slack", c.verify.upper_slack},
                 {"lower_drop", c.verify.lower_drop},
                 {"check_gap", c.verify.check_gap},
                 {"min_samples", c.verify.min_samples},
                 {"use_estimated_character", c.use_estimated_character},
                 {"expected_r", c.expected_r}};
  j["sweep"] = {{"r_values", c.sweep_r_values}};
  return j;
}

inline std::string emit_config(const ExperimentConfig& c) { return to_json_config(c).dump(2) + "\n"; }

inline ExperimentConfig from_json_config(const nlohmann::json& j) {
  using detail::get_field;
  using detail::reject_unknown_keys;
  reject_unknown_keys(j, {"experiment_id", "grid", "physics", "initial_data", "solver", "linear",
                          "character_estimate", "verify", "sweep"},
                      "the top level");
  ExperimentConfig c;
  c.experiment_id = get_field<std::string>(j, "experiment_id", c.experiment_id, "the top level");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown_keys(g, {"dim", "n_points", "box_length"}, "grid");
    c.dim = get_field<int>(g, "dim", c.dim, "grid");
    c.n_points = get_field<int>(g, "n_points", c.n_points, "grid");
    c.box_length = get_field<double>(g, "box_length", c.box_length, "grid");
  }
  if (j.contains("physics")) {
    const auto& p = j.at("physics");
    reject_unknown_keys(p, {"alpha", "mu"}, "physics");
    c.params.alpha = get_field<double>(p, "alpha", c.params.alpha, "physics");
    c.params.mu = get_field<double>(p, "mu", c.params.mu, "physics");
  }
  if (j.contains("initial_data")) {
    const auto& d = j.at("initial_data");
    reject_unknown_keys(d,
                        {"profile", "r", "amplitude", "cutoff_radius", "smoothing_width", "r_lo",
                         "r_hi", "log_period", "p", "seed", "target_v2_norm"},
                        "initial_data");
    c.profile.kind = detail::profile_kind_from_string(
        get_field<std::string>(d, "profile", "power_law", "initial_data"));
    c.profile.r = get_field<double>(d, "r", c.profile.r, "initial_data");
    c.profile.amplitude = get_field<double>(d, "amplitude", c.profile.amplitude, "initial_data");
    c.profile.cutoff_radius =
        get_field<double>(d, "cutoff_radius", c.profile.cutoff_radius, "initial_data");
    c.profile.smoothing_width =
        get_field<double>(d, "smoothing_width", c.profile.smoothing_width, "initial_data");
    c.profile.r_lo = get_field<double>(d, "r_lo", c.profile.r_lo, "initial_data");
    c.profile.r_hi = get_field<double>(d, "r_hi", c.profile.r_hi, "initial_data");
    c.profile.log_period = get_field<double>(d, "log_period", c.profile.log_period, "initial_data");
    c.profile.p = get_field<double>(d, "p", c.profile.p, "initial_data");
    c.seed = get_field<std::uint64_t>(d, "seed", c.seed, "initial_data");
    c.target_v2_norm = get_field<double>(d, "target_v2_norm", c.target_v2_norm, "initial_data");
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown_keys(
        s, {"dt", "t_end", "output_stride", "diagnostics_stride", "scheme", "snapshot_times"},
        "solver");
    c.solver.dt = get_field<double>(s, "dt", c.solver.dt, "solver");
    c.solver.t_end = get_field<double>(s, "t_end", c.solver.t_end, "solver");
    c.solver.output_stride = get_field<int>(s, "output_stride", c.solver.output_stride, "solver");
    c.solver.diagnostics_stride =
        get_field<int>(s, "diagnostics_stride", c.solver.diagnostics_stride, "solver");
    c.solver.scheme = detail::scheme_from_string(
        get_field<std::string>(s, "scheme", to_string(c.solver.scheme), "solver"));
    c.solver.snapshot_times =
        get_field<std::vector<double>>(s, "snapshot_times", c.solver.snapshot_times, "solver");
  }
  if (j.contains("linear")) {
    const auto& l = j.at("linear");
    reject_unknown_keys(l, {"t_min", "t_max", "points_per_decade", "derivative_order"}, "linear");
    c.linear_t_min = get_field<double>(l, "t_min", c.linear_t_min, "linear");
    c.linear_t_max = get_field<double>(l, "t_max", c.linear_t_max, "linear");
    c.linear_points_per_decade =
        get_field<int>(l, "points_per_decade", c.linear_points_per_decade, "linear");
    c.linear_derivative_order =
        get_field<int>(l, "derivative_order", c.linear_derivative_order, "linear");
  }
  if (j.contains("character_estimate")) {
    const auto& e = j.at("character_estimate");
    reject_unknown_keys(e,
                        {"source", "radius_min_factor", "radius_max_factor", "rho_min", "rho_max",
                         "n_radii", "min_samples", "min_span_decades", "small_radius_fraction",
                         "window_points", "rhat_tolerance"},
                        "character_estimate");
    c.estimate_source = get_field<std::string>(e, "source", c.estimate_source, "character_estimate");
    c.radius_min_factor =
        get_field<double>(e, "radius_min_factor", c.radius_min_factor, "character_estimate");
    c.radius_max_factor =
        get_field<double>(e, "radius_max_factor", c.radius_max_factor, "character_estimate");
    c.rho_min = get_field<double>(e, "rho_min", c.rho_min, "character_estimate");
    c.rho_max = get_field<double>(e, "rho_max", c.rho_max, "character_estimate");
    c.n_radii = get_field<int>(e, "n_radii", c.n_radii, "character_estimate");
    c.estimate.min_samples =
        get_field<int>(e, "min_samples", c.estimate.min_samples, "character_estimate");
    c.estimate.min_span_decades =
        get_field<double>(e, "min_span_decades", c.estimate.min_span_decades, "character_estimate");
    c.estimate.small_radius_fraction = get_field<double>(e, "small_radius_fraction",
                                                         c.estimate.small_radius_fraction,
                                                         "character_estimate");
    c.estimate.window_points =
        get_field<int>(e, "window_points", c.estimate.window_points, "character_estimate");
    c.estimate.rhat_tolerance =
        get_field<double>(e, "rhat_tolerance", c.estimate.rhat_tolerance, "character_estimate");
  }
  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    reject_unknown_keys(v,
                        {"window_t_lo", "window_t_hi", "exponent_tolerance", "gap_tolerance",
                         "upper_slack", "lower_drop", "check_gap", "min_samples",
                         "use_estimated_character", "expected_r"},
                        "verify");
    c.verify.window.t_lo = get_field<double>(v, "window_t_lo", c.verify.window.t_lo, "verify");
    c.verify.window.t_hi = get_field<double>(v, "window_t_hi", c.verify.window.t_hi, "verify");
    c.verify.exponent_tolerance =
        get_field<double>(v, "exponent_tolerance", c.verify.exponent_tolerance, "verify");
    c.verify.gap_tolerance = get_field<double>(v, "gap_tolerance", c.verify.gap_tolerance, "verify");
    c.verify.upper_slack = get_field<double>(v, "upper_slack", c.verify.upper_slack, "verify");
    c.verify.lower_drop = get_field<double>(v, "lower_drop", c.verify.lower_drop, "verify");
    c.verify.check_gap = get_field<bool>(v, "check_gap", c.verify.check_gap, "verify");
    c.verify.min_samples = get_field<int>(v, "min_samples", c.verify.min_samples, "verify");
    c.use_estimated_character =
        get_field<bool>(v, "use_estimated_character", c.use_estimated_character, "verify");
    c.expected_r = get_field<double>(v, "expected_r", c.expected_r, "verify");
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    reject_unknown_keys(s, {"r_values"}, "sweep");
    c.sweep_r_values = get_field<std::vector<double>>(s, "r_values", c.sweep_r_values, "sweep");
  }
  c.profile.n = c.dim;
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  return from_json_config(j);
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sgfd
