// Command-line driver. Subcommands:
//   linear-decay     continuum linear flow: decay curve, sandwich constants,
//                    fitted vs predicted exponent
//   simulate         nonlinear box run with co-evolved linear flow,
//                    trajectory CSV and snapshot output
//   decay-character  shell-energy samples and decay-character estimates for
//                    the configured initial data (lattice or continuum)
//   compare          simulate + verify the measured rates against the
//                    predictions (the main verification pipeline)
//   sweep            compare repeated over a list of decay characters, with
//                    optional thread parallelism across experiments
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or usage
// error, 3 numerical abort.
//
// Every subcommand echoes the effective config (defaults filled in, dt as
// actually used) into the output directory for provenance.
#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "sgfd/config.hpp"
#include "sgfd/io.hpp"

namespace sgfd {

namespace cli_detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline std::vector<double> geometric_radii(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return out;
}

inline std::vector<double> lattice_radii(const ExperimentConfig& cfg, const Grid& grid) {
  const double lo = cfg.radius_min_factor * grid.delta_k();
  const double hi = cfg.radius_max_factor * cfg.profile.cutoff_radius;
  if (!(hi > lo))
    throw std::invalid_argument(
        "character estimate: the box resolves no shells below the profile cutoff; enlarge "
        "box_length or cutoff_radius (smallest usable radius " +
        format_double(lo) + ", largest " + format_double(hi) + ")");
  return lattice_shell_radii(grid, lo, hi);
}

// Decay character implied by the profile parameters, when one exists.
inline std::optional<double> profile_expected_r(const RadialProfile& p) {
  switch (p.kind) {
    case ProfileKind::power_law:
      return p.r;
    case ProfileKind::lp_like:
      return lp_predicted_character(p.p, p.n);
    default:
      return std::nullopt;
  }
}

inline void append_run_checks(VerificationReport& rep, const RunResult& res) {
  VerificationCheck mono;
  mono.name = "energy_monotone";
  mono.measured = static_cast<double>(res.monotonicity_violations);
  mono.expected = 0.0;
  mono.pass = res.monotonicity_violations == 0;
  mono.detail = "steps where the alpha-weighted energy increased";
  rep.checks.push_back(mono);

  VerificationCheck apriori;
  apriori.name = "a_priori_bound";
  apriori.measured = res.max_energy_ratio;
  apriori.expected = 1.0 + 1e-12;
  apriori.pass = res.max_energy_ratio <= 1.0 + 1e-12;
  apriori.detail = "max over steps of E(t)/E(0)";
  rep.checks.push_back(apriori);

  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
}

struct CompareOutcome {
  bool all_pass = false;
  std::string text;
};

inline CompareOutcome compare_pipeline(const ExperimentConfig& cfg, const std::string& outdir,
                                       bool verbose) {
  const Grid grid = cfg.make_grid();
  SpectralVectorField uh0 = make_data(cfg.profile, grid, cfg.params, cfg.seed, cfg.target_v2_norm);

  double r_star = cfg.expected_r;
  std::optional<DecayCharacterReport> char_rep;
  if (cfg.use_estimated_character) {
    const SpectrumSamples samples = shell_energy(uh0, lattice_radii(cfg, grid));
    char_rep = estimate_characters(samples, cfg.estimate);
    if (!char_rep->r_hat)
      throw NumericalError(
          "compare: the decay character of the initial data is not estimable (r_plus = " +
          format_double(char_rep->r_plus) + ", r_minus = " + format_double(char_rep->r_minus) +
          "); set verify.use_estimated_character to false and supply expected_r");
    r_star = *char_rep->r_hat;
  }

  if (verbose)
    std::cerr << "[sgfd] " << cfg.experiment_id << ": integrating to t = "
              << format_double(cfg.solver.t_end) << " with r = " << format_double(r_star) << "\n";

  const RunResult res = run(uh0, cfg.params, cfg.solver, cfg.experiment_id);
  VerificationReport rep = verify_experiment(res.record, r_star, cfg.verify, cfg.experiment_id);
  append_run_checks(rep, res);

  ExperimentConfig echoed = cfg;
  echoed.solver.dt = res.effective_dt;
  write_text_file(join_path(outdir, "effective_config.json"), emit_config(echoed));
  write_csv_file(join_path(outdir, "trajectory.csv"),
                 [&](std::ostream& os) { write_trajectory_csv(os, res.record); });
  nlohmann::json rj = report_to_json(rep);
  rj["run_summary"] = run_summary_to_json(res);
  if (char_rep) rj["estimated_character"] = report_to_json(*char_rep);
  write_text_file(join_path(outdir, "verification_report.json"), rj.dump(2) + "\n");

  CompareOutcome out;
  out.all_pass = rep.all_pass;
  out.text = report_to_text(rep);
  return out;
}

}  // namespace cli_detail

inline int cmd_linear_decay(const ExperimentConfig& cfg, const std::string& outdir, bool verbose) {
  const auto times = log_times(cfg.linear_t_min, cfg.linear_t_max, cfg.linear_points_per_decade);
  if (verbose)
    std::cerr << "[sgfd] " << cfg.experiment_id << ": evaluating the linear flow at "
              << times.size() << " times\n";
  const LinearDecayCurve curve = compute_linear_decay_curve(cfg.profile, cfg.params, times,
                                                            cfg.linear_derivative_order);
  write_text_file(cli_detail::join_path(outdir, "effective_config.json"), emit_config(cfg));
  write_csv_file(cli_detail::join_path(outdir, "linear_curve.csv"),
                 [&](std::ostream& os) { write_linear_curve_csv(os, curve); });

  FitWindow w{std::max(cfg.linear_t_min, cfg.linear_t_max / 100.0), cfg.linear_t_max};
  const FitResult fit = fit_linear_exponent(curve, w);

  nlohmann::json report;
  report["experiment_id"] = cfg.experiment_id;
  report["derivative_order"] = curve.m;
  report["fit"] = fit_to_json(fit);
  bool ok = true;
  const auto expected_r = cli_detail::profile_expected_r(cfg.profile);
  if (expected_r) {
    const double predicted = predicted_linear_exponent(cfg.profile.n, *expected_r, curve.m);
    const SandwichConstants sandwich = sandwich_constants(curve, *expected_r);
    const bool match = std::abs(-fit.exponent - predicted) <= cfg.verify.exponent_tolerance;
    report["predicted_exponent"] = predicted;
    report["exponent_match"] = match;
    report["sandwich"] = {{"c1", sandwich.c1},
                          {"c2", sandwich.c2},
                          {"c3", sandwich.c3},
                          {"exponent", sandwich.exponent},
                          {"valid", sandwich.valid}};
    ok = match && sandwich.valid;
    std::cout << (match ? "[PASS] " : "[FAIL] ") << "linear exponent: fitted "
              << format_double(-fit.exponent) << ", predicted " << format_double(predicted)
              << "\n";
    std::cout << (sandwich.valid ? "[PASS] " : "[FAIL] ") << "sandwich constants: c1 = "
              << format_double(sandwich.c1) << ", c2 = " << format_double(sandwich.c2) << "\n";
  } else {
    std::cout << "linear exponent: fitted " << format_double(-fit.exponent)
              << " (no single predicted rate for an oscillatory profile)\n";
  }
  write_text_file(cli_detail::join_path(outdir, "linear_report.json"), report.dump(2) + "\n");
  return ok ? 0 : 1;
}

inline int cmd_simulate(const ExperimentConfig& cfg, const std::string& outdir, bool verbose) {
  const Grid grid = cfg.make_grid();
  SpectralVectorField uh0 = make_data(cfg.profile, grid, cfg.params, cfg.seed, cfg.target_v2_norm);
  if (verbose)
    std::cerr << "[sgfd] " << cfg.experiment_id << ": " << grid.n_points() << "^" << grid.dim()
              << " grid, integrating to t = " << format_double(cfg.solver.t_end) << "\n";

  const auto snapshot_cb = [&](double t, const SpectralVectorField& fh) {
    write_snapshot(cli_detail::join_path(outdir, "snapshot_t" + format_double(t) + ".bin"), fh,
                   cfg.params, t);
  };
  const RunResult res = run(uh0, cfg.params, cfg.solver, cfg.experiment_id,
                            cfg.solver.snapshot_times.empty() ? SnapshotCallback{} : snapshot_cb);

  ExperimentConfig echoed = cfg;
  echoed.solver.dt = res.effective_dt;
  write_text_file(cli_detail::join_path(outdir, "effective_config.json"), emit_config(echoed));
  write_csv_file(cli_detail::join_path(outdir, "trajectory.csv"),
                 [&](std::ostream& os) { write_trajectory_csv(os, res.record); });
  write_text_file(cli_detail::join_path(outdir, "run_summary.json"),
                  run_summary_to_json(res).dump(2) + "\n");
  for (const auto& wmsg : res.warnings) std::cerr << "[sgfd] warning: " << wmsg << "\n";
  std::cout << "simulate: " << res.n_steps << " steps, dt = " << format_double(res.effective_dt)
            << ", final energy " << format_double(res.record.u_h1alpha_sq.back())
            << ", balance error " << format_double(res.final_balance_error) << "\n";
  return 0;
}

inline int cmd_decay_character(const ExperimentConfig& cfg, const std::string& outdir,
                               bool verbose) {
  SpectrumSamples base, grad;
  if (cfg.estimate_source == "lattice") {
    const Grid grid = cfg.make_grid();
    SpectralVectorField uh0 =
        make_data(cfg.profile, grid, cfg.params, cfg.seed, cfg.target_v2_norm);
    const auto radii = cli_detail::lattice_radii(cfg, grid);
    base = shell_energy(uh0, radii);
    grad = shell_energy(uh0, radii, 1);
  } else {
    const auto radii = cli_detail::geometric_radii(cfg.rho_min, cfg.rho_max, cfg.n_radii);
    base = shell_energy(cfg.profile, radii);
    grad = shell_energy(cfg.profile, radii, 1);
  }
  if (verbose)
    std::cerr << "[sgfd] " << cfg.experiment_id << ": " << base.radii.size()
              << " shell samples from " << cfg.estimate_source << " source\n";

  const ShiftReport shift = shift_by_gradient(base, grad, cfg.estimate);
  write_text_file(cli_detail::join_path(outdir, "effective_config.json"), emit_config(cfg));
  write_csv_file(cli_detail::join_path(outdir, "shells.csv"),
                 [&](std::ostream& os) { write_shell_csv(os, base); });

  nlohmann::json report;
  report["experiment_id"] = cfg.experiment_id;
  report["source"] = cfg.estimate_source;
  report["base"] = report_to_json(shift.base);
  report["gradient"] = report_to_json(shift.grad);
  if (shift.difference) report["gradient_shift"] = *shift.difference;
  const auto expected_r = cli_detail::profile_expected_r(cfg.profile);
  if (expected_r) report["expected_r"] = *expected_r;
  write_text_file(cli_detail::join_path(outdir, "character_report.json"), report.dump(2) + "\n");

  std::cout << report_to_text(shift.base);
  if (shift.difference)
    std::cout << "gradient shift = " << format_double(*shift.difference) << " (expected 1)\n";
  if (expected_r) std::cout << "expected r = " << format_double(*expected_r) << "\n";
  return 0;
}

inline int cmd_compare(const ExperimentConfig& cfg, const std::string& outdir, bool verbose) {
  const auto outcome = cli_detail::compare_pipeline(cfg, outdir, verbose);
  std::cout << outcome.text;
  return outcome.all_pass ? 0 : 1;
}

inline int cmd_sweep(const ExperimentConfig& cfg, const std::string& outdir, int jobs,
                     bool verbose) {
  if (cfg.sweep_r_values.empty())
    throw std::invalid_argument("sweep: the config has no sweep.r_values");
  if (cfg.profile.kind != ProfileKind::power_law)
    throw std::invalid_argument("sweep: only power_law profiles can be swept in r");

  struct Job {
    double r = 0.0;
    std::string dir;
    int code = -1;
    bool all_pass = false;
    std::string error;
  };
  std::vector<Job> jobs_out(cfg.sweep_r_values.size());
  for (std::size_t i = 0; i < jobs_out.size(); ++i) {
    jobs_out[i].r = cfg.sweep_r_values[i];
    jobs_out[i].dir =
        cli_detail::join_path(outdir, "r_" + format_double(cfg.sweep_r_values[i]));
  }

  std::atomic<std::size_t> next{0};
  std::mutex print_mutex;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs_out.size()) return;
      Job& job = jobs_out[i];
      ExperimentConfig sub = cfg;
      sub.profile.r = job.r;
      sub.expected_r = job.r;
      sub.sweep_r_values.clear();
      sub.experiment_id = cfg.experiment_id + "_r" + format_double(job.r);
      try {
        const auto outcome = cli_detail::compare_pipeline(sub, job.dir, false);
        job.all_pass = outcome.all_pass;
        job.code = outcome.all_pass ? 0 : 1;
      } catch (const std::invalid_argument& e) {
        job.code = 2;
        job.error = e.what();
      } catch (const std::exception& e) {
        job.code = 3;
        job.error = e.what();
      }
      std::lock_guard<std::mutex> lock(print_mutex);
      if (job.code == 0 || job.code == 1)
        std::cout << (job.all_pass ? "[PASS] " : "[FAIL] ") << "r = " << format_double(job.r)
                  << "\n";
      else
        std::cout << "[ERROR] r = " << format_double(job.r) << ": " << job.error << "\n";
      if (verbose)
        std::cerr << "[sgfd] sweep finished r = " << format_double(job.r) << " -> exit "
                  << job.code << "\n";
    }
  };

  const int n_threads = std::clamp<int>(jobs, 1, static_cast<int>(jobs_out.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  nlohmann::json summary = nlohmann::json::array();
  int exit_code = 0;
  for (const auto& job : jobs_out) {
    nlohmann::json jj;
    jj["r"] = job.r;
    jj["exit_code"] = job.code;
    jj["all_pass"] = job.all_pass;
    jj["output_dir"] = job.dir;
    if (!job.error.empty()) jj["error"] = job.error;
    summary.push_back(jj);
    exit_code = std::max(exit_code, job.code);  // abort > config error > check failure
  }
  write_text_file(cli_detail::join_path(outdir, "effective_config.json"), emit_config(cfg));
  write_text_file(cli_detail::join_path(outdir, "sweep_summary.json"), summary.dump(2) + "\n");
  std::cout << "sweep: " << jobs_out.size() << " experiments, overall "
            << (exit_code == 0 ? "PASS" : "FAIL") << "\n";
  return exit_code;
}

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"decay-rate toolkit for the second-grade fluid equations"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "progress output on stderr");

  std::string config_path, outdir = "out";
  int jobs = 1;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", outdir, "output directory");
  };
  CLI::App* lin = app.add_subcommand("linear-decay", "continuum linear flow decay curve");
  CLI::App* sim = app.add_subcommand("simulate", "nonlinear box simulation");
  CLI::App* chr = app.add_subcommand("decay-character", "estimate the decay character");
  CLI::App* cmp = app.add_subcommand("compare", "simulate and verify predicted rates");
  CLI::App* swp = app.add_subcommand("sweep", "compare across a list of decay characters");
  for (CLI::App* sub : {lin, sim, chr, cmp, swp}) add_common(sub);
  swp->add_option("-j,--jobs", jobs, "parallel experiments")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig cfg = load_config_file(config_path);
    std::filesystem::create_directories(outdir);
    if (app.got_subcommand(lin)) return cmd_linear_decay(cfg, outdir, verbose);
    if (app.got_subcommand(sim)) return cmd_simulate(cfg, outdir, verbose);
    if (app.got_subcommand(chr)) return cmd_decay_character(cfg, outdir, verbose);
    if (app.got_subcommand(cmp)) return cmd_compare(cfg, outdir, verbose);
    if (app.got_subcommand(swp)) return cmd_sweep(cfg, outdir, jobs, verbose);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;  // numerical abort (non-finite values, failed run, I/O)
  }
  return 2;  // unreachable: require_subcommand guarantees a dispatch
}

}  // namespace sgfd
