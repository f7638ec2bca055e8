// File formats: CSV outputs with pinned column orders, a binary snapshot
// container for spectral states, and JSON/text renderings of reports.
//
// All floating-point text output goes through format_double (%.17g), so
// re-running an experiment with identical inputs reproduces files byte for
// byte.
//
// Snapshot layout: one JSON header line (terminated by '\n') describing the
// grid, the parameters and the storage convention, followed by a raw
// little-endian float64 payload: for each of the dim components in order,
// every Fourier coefficient in row-major index order as (re, im) pairs.
// Coefficients use the box-integral convention documented in field.hpp.
#pragma once

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgfd/asymptotics.hpp"
#include "sgfd/decay_character.hpp"
#include "sgfd/linear_continuum.hpp"
#include "sgfd/solver.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot payloads are written little-endian without byte swapping");

namespace sgfd {

inline void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kTrajectoryCsvHeader =
    "t,u_l2_sq,u_grad_l2_sq,u_h1alpha_sq,ubar_h1alpha_sq,w_l2_sq,w_grad_l2_sq,w_h1alpha_sq,"
    "energy_residual,lemma1_max_ratio,dissipated_energy";

inline void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
  os << kTrajectoryCsvHeader << "\n";
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    os << format_double(rec.times[i]) << ',' << format_double(rec.u_l2_sq[i]) << ','
       << format_double(rec.u_grad_l2_sq[i]) << ',' << format_double(rec.u_h1alpha_sq[i]) << ','
       << format_double(rec.ubar_h1alpha_sq[i]) << ',' << format_double(rec.w_l2_sq[i]) << ','
       << format_double(rec.w_grad_l2_sq[i]) << ',' << format_double(rec.w_h1alpha_sq[i]) << ','
       << format_double(rec.energy_residuals[i]) << ',' << format_double(rec.lemma1_max_ratios[i])
       << ',' << format_double(rec.dissipated_energy_cumulative[i]) << "\n";
  }
}

// Reads the series columns back; provenance fields are left for the caller,
// which knows the config the file came from.
inline TrajectoryRecord read_trajectory_csv(std::istream& is) {
  TrajectoryRecord rec;
  std::string line;
  if (!std::getline(is, line) || line != kTrajectoryCsvHeader)
    throw std::invalid_argument("trajectory csv: bad or missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v[11];
    char comma;
    for (int c = 0; c < 11; ++c) {
      if (!(ss >> v[c])) throw std::invalid_argument("trajectory csv: bad row '" + line + "'");
      if (c < 10 && !(ss >> comma && comma == ','))
        throw std::invalid_argument("trajectory csv: bad row '" + line + "'");
    }
    rec.times.push_back(v[0]);
    rec.u_l2_sq.push_back(v[1]);
    rec.u_grad_l2_sq.push_back(v[2]);
    rec.u_h1alpha_sq.push_back(v[3]);
    rec.ubar_h1alpha_sq.push_back(v[4]);
    rec.w_l2_sq.push_back(v[5]);
    rec.w_grad_l2_sq.push_back(v[6]);
    rec.w_h1alpha_sq.push_back(v[7]);
    rec.energy_residuals.push_back(v[8]);
    rec.lemma1_max_ratios.push_back(v[9]);
    rec.dissipated_energy_cumulative.push_back(v[10]);
  }
  return rec;
}

inline constexpr const char* kLinearCurveCsvHeader = "t,l2_sq,grad_l2_sq,h1alpha_sq,m";

inline void write_linear_curve_csv(std::ostream& os, const LinearDecayCurve& curve) {
  os << kLinearCurveCsvHeader << "\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    os << format_double(curve.times[i]) << ',' << format_double(curve.l2_sq[i]) << ','
       << format_double(curve.grad_l2_sq[i]) << ',' << format_double(curve.h1alpha_sq[i]) << ','
       << curve.m << "\n";
  }
}

inline constexpr const char* kShellCsvHeader = "rho,shell_energy";

inline void write_shell_csv(std::ostream& os, const SpectrumSamples& samples) {
  os << kShellCsvHeader << "\n";
  // stored largest-to-smallest; emit in increasing radius for plotting
  for (std::size_t i = samples.radii.size(); i-- > 0;)
    os << format_double(samples.radii[i]) << ',' << format_double(samples.shell[i]) << "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
  ensure_parent_dir(path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

template <typename WriteFn>
inline void write_csv_file(const std::string& path, WriteFn&& fn) {
  ensure_parent_dir(path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(os);
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// snapshots
// ---------------------------------------------------------------------------

inline void write_snapshot(const std::string& path, const SpectralVectorField& fh,
                           const SimParams& params, double time) {
  ensure_parent_dir(path);
  const Grid& g = fh.grid;
  nlohmann::json header;
  header["format"] = "sgfd-snapshot";
  header["version"] = 1;
  header["dim"] = g.dim();
  header["n_points"] = g.n_points();
  header["box_length"] = g.box_length();
  header["alpha"] = params.alpha;
  header["mu"] = params.mu;
  header["time"] = time;
  header["convention"] = "box-integral";
  header["layout"] = "per component, row-major modes, float64 (re, im) pairs, little-endian";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << header.dump() << "\n";
  for (int d = 0; d < g.dim(); ++d) {
    static_assert(sizeof(cplx) == 2 * sizeof(double));
    os.write(reinterpret_cast<const char*>(fh.comp[d].data()),
             static_cast<std::streamsize>(fh.comp[d].size() * sizeof(cplx)));
  }
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

struct Snapshot {
  SpectralVectorField field;
  SimParams params;
  double time = 0.0;

  explicit Snapshot(const Grid& g) : field(g) {}
};

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("snapshot: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("snapshot: bad header: ") + e.what());
  }
  if (header.value("format", "") != std::string("sgfd-snapshot") || header.value("version", 0) != 1)
    throw std::runtime_error("snapshot: unsupported format or version");
  const Grid g(header.at("dim").get<int>(), header.at("n_points").get<int>(),
               header.at("box_length").get<double>());
  Snapshot snap(g);
  snap.params.alpha = header.at("alpha").get<double>();
  snap.params.mu = header.at("mu").get<double>();
  snap.time = header.value("time", 0.0);
  for (int d = 0; d < g.dim(); ++d) {
    is.read(reinterpret_cast<char*>(snap.field.comp[d].data()),
            static_cast<std::streamsize>(snap.field.comp[d].size() * sizeof(cplx)));
    if (!is) throw std::runtime_error("snapshot: truncated payload");
  }
  char extra;
  if (is.read(&extra, 1)) throw std::runtime_error("snapshot: trailing bytes after payload");
  return snap;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

inline nlohmann::json fit_to_json(const FitResult& f) {
  return {{"exponent", f.exponent},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"window_t_lo", f.window.t_lo},
          {"window_t_hi", f.window.t_hi},
          {"n_samples", f.n_samples},
          {"well_conditioned", f.well_conditioned}};
}

inline nlohmann::json report_to_json(const VerificationReport& rep) {
  nlohmann::json j;
  j["experiment_id"] = rep.experiment_id;
  j["r_star"] = rep.r_star;
  j["predicted_solution_exponent"] = rep.predicted_solution;
  j["predicted_difference_exponent"] = rep.predicted_difference;
  j["lower_bound_applicable"] = rep.lower_applicable;
  j["crossover_time"] = rep.crossover_time;
  j["window_t_lo"] = rep.window_used.t_lo;
  j["window_t_hi"] = rep.window_used.t_hi;
  j["solution_fit"] = fit_to_json(rep.solution_fit);
  if (rep.difference_fit) j["difference_fit"] = fit_to_json(*rep.difference_fit);
  j["difference_degenerate"] = rep.difference_degenerate;
  j["all_pass"] = rep.all_pass;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    if (std::isfinite(c.measured)) cj["measured"] = c.measured;
    if (std::isfinite(c.expected)) cj["expected"] = c.expected;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    j["checks"].push_back(cj);
  }
  return j;
}

inline std::string report_to_text(const VerificationReport& rep) {
  std::ostringstream os;
  os << "experiment: " << rep.experiment_id << "\n";
  os << "decay character r = " << format_double(rep.r_star) << "\n";
  os << "predicted exponents: solution " << format_double(rep.predicted_solution)
     << ", difference " << format_double(rep.predicted_difference) << "\n";
  os << "fit window: [" << format_double(rep.window_used.t_lo) << ", "
     << format_double(rep.window_used.t_hi) << "] (crossover t* = "
     << format_double(rep.crossover_time) << ")\n";
  for (const auto& c : rep.checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
    if (std::isfinite(c.measured)) os << " measured=" << format_double(c.measured);
    if (std::isfinite(c.expected)) os << " expected=" << format_double(c.expected);
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
  }
  os << "overall: " << (rep.all_pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

inline nlohmann::json report_to_json(const DecayCharacterReport& rep) {
  nlohmann::json j;
  j["n"] = rep.n;
  j["estimable"] = rep.estimable;
  if (rep.r_hat) j["r_hat"] = *rep.r_hat;
  j["r_plus"] = rep.r_plus;
  j["r_minus"] = rep.r_minus;
  if (std::isfinite(rep.p_r_estimate)) j["p_r_estimate"] = rep.p_r_estimate;
  j["window_lo"] = rep.window_lo;
  j["window_hi"] = rep.window_hi;
  j["residual"] = rep.residual;
  j["narrow_span"] = rep.narrow_span;
  return j;
}

inline std::string report_to_text(const DecayCharacterReport& rep) {
  std::ostringstream os;
  os << "small-radius window: [" << format_double(rep.window_lo) << ", "
     << format_double(rep.window_hi) << "]";
  if (rep.narrow_span) os << " (narrow span)";
  os << "\n";
  os << "r_plus = " << format_double(rep.r_plus) << ", r_minus = " << format_double(rep.r_minus)
     << "\n";
  if (rep.r_hat)
    os << "decay character r_hat = " << format_double(*rep.r_hat) << "\n";
  else
    os << "decay character not defined: upper and lower characters disagree\n";
  return os.str();
}

inline nlohmann::json run_summary_to_json(const RunResult& res) {
  nlohmann::json j;
  j["experiment_id"] = res.record.experiment_id;
  j["effective_dt"] = res.effective_dt;
  j["n_steps"] = res.n_steps;
  j["monotonicity_violations"] = res.monotonicity_violations;
  j["max_energy_ratio"] = res.max_energy_ratio;
  j["final_balance_error"] = res.final_balance_error;
  j["final_u_h1alpha_sq"] = res.record.u_h1alpha_sq.back();
  j["final_w_h1alpha_sq"] = res.record.w_h1alpha_sq.back();
  j["warnings"] = res.warnings;
  return j;
}

}  // namespace sgfd
