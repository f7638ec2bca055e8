// Predicted algebraic decay rates for the squared norms and the machinery
// that checks a recorded trajectory against them.
//
// With r the decay character of the initial data (n = 3):
//   linear flow        ||ubar||^2_{H^1_alpha}  ~ (t+1)^{-(3/2 + r)}, each
//                      derivative order adds one to the rate,
//   nonlinear solution ||u||^2_{H^1_alpha}     <= C (t+1)^{-min(3/2 + r, 5/2)},
//   difference         ||u - ubar||^2_{H^1_alpha} <= C (t+1)^{-min(5/2 + 3r/2, 5/2)},
//   lower bound        ||u||^2_{H^1_alpha}     >= c (t+1)^{-(3/2 + r)} for r in (-3/2, 1).
// For r in (-3/2, 0] the difference rate exceeds the solution rate by
// exactly 1 + r/2, which is the sharpest observable signature of the
// improved difference decay; past r = 0 the min-clamps flatten both
// formulas and the gap identity no longer holds, so it is only exposed on
// that interval.
//
// All fits happen in log(value) vs log(t + 1); a fitted slope -p matches a
// predicted rate p. On a periodic box the algebraic regime ends near the
// spectral-gap crossover time, after which the slowest lattice Fourier mode
// dominates and decay turns exponential; fit windows are clipped there.
// Even inside the window the lattice tail steepens measured slopes by
// roughly rate_1 * (t+1), so the nonlinear rate checks are one-sided (the
// theory provides upper bounds) and the difference is compared against the
// solution's own fit rather than the continuum prediction. The gap identity
// check stays opt-in for the same reason.
#pragma once

#include <optional>

#include "sgfd/fitting.hpp"
#include "sgfd/linear_grid.hpp"
#include "sgfd/solver.hpp"

namespace sgfd {

namespace detail {
inline void require_character(double r) {
  if (!(r > -1.5))
    throw std::domain_error("decay character must exceed -3/2 (got " + format_double(r) + ")");
}
}  // namespace detail

// Rate for ||D^m ubar(t)||^2 + alpha ||D^m grad ubar(t)||^2 on R^n.
inline double predicted_linear_exponent(int n, double r, int m = 0) {
  if (n != 2 && n != 3) throw std::invalid_argument("predicted_linear_exponent: n must be 2 or 3");
  if (m < 0) throw std::invalid_argument("predicted_linear_exponent: m must be >= 0");
  if (!(r > -0.5 * n))
    throw std::domain_error("predicted_linear_exponent: r must exceed -n/2");
  return 0.5 * n + r + m;
}

inline double predicted_solution_exponent(double r) {
  detail::require_character(r);
  return std::min(1.5 + r, 2.5);
}

inline double predicted_difference_exponent(double r) {
  detail::require_character(r);
  return std::min(2.5 + 1.5 * r, 2.5);
}

inline bool lower_bound_applicable(double r) { return r > -1.5 && r < 1.0; }

inline double predicted_lower_exponent(double r) {
  if (!lower_bound_applicable(r))
    throw std::domain_error("predicted_lower_exponent: only available for r in (-3/2, 1)");
  return 1.5 + r;
}

// Difference-minus-solution rate gap, valid on (-3/2, 0] only.
inline double predicted_gap(double r) {
  detail::require_character(r);
  if (r > 0.0)
    throw std::domain_error("predicted_gap: the gap identity 1 + r/2 only holds for r <= 0");
  return 1.0 + 0.5 * r;
}

struct VerifyOptions {
  FitWindow window{1.0, 50.0};
  double exponent_tolerance = 0.2;  // one-sided slack below the predicted rate
  double gap_tolerance = 0.3;
  double upper_slack = 1.5;         // envelope factor above the LS constant
  double lower_drop = 10.0;         // allowed sag below the LS constant
  double degenerate_ratio = 1e-20;  // w treated as identically zero below this
  bool check_gap = false;           // lattice tails bias the gap; opt in per run
  int min_samples = 10;
};

struct VerificationCheck {
  std::string name;
  bool pass = false;
  double measured = std::numeric_limits<double>::quiet_NaN();
  double expected = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct VerificationReport {
  std::string experiment_id;
  double r_star = 0.0;
  double predicted_solution = 0.0;
  double predicted_difference = 0.0;
  bool lower_applicable = false;
  double crossover_time = std::numeric_limits<double>::infinity();
  FitWindow window_used{0.0, 0.0};
  FitResult solution_fit;
  std::optional<FitResult> difference_fit;
  bool difference_degenerate = false;
  std::vector<VerificationCheck> checks;
  bool all_pass = false;
};

namespace detail {
// Least-squares constant for values ~ C (t+1)^{-p} at pinned exponent p:
// the geometric mean of value * (t+1)^p over the window samples.
inline double pinned_constant(const std::vector<double>& times, const std::vector<double>& values,
                              FitWindow w, double p) {
  double acc = 0.0;
  int cnt = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < w.t_lo || times[i] > w.t_hi || values[i] <= 0.0) continue;
    acc += std::log(values[i]) + p * std::log(times[i] + 1.0);
    ++cnt;
  }
  if (cnt == 0) throw std::invalid_argument("pinned_constant: no usable samples in the window");
  return std::exp(acc / cnt);
}
}  // namespace detail

// Check a recorded trajectory against the predicted rates for decay
// character r_star. The fit window is clipped at the box crossover time; the
// lower-bound floor is likewise only enforced before the crossover, since the
// lattice spectral gap legitimately beats any algebraic floor afterwards.
inline VerificationReport verify_experiment(const TrajectoryRecord& rec, double r_star,
                                            VerifyOptions opt,
                                            const std::string& expected_id = "") {
  detail::require_character(r_star);
  if (rec.times.size() < 2) throw std::invalid_argument("verify_experiment: empty record");
  if (!(opt.window.t_hi > opt.window.t_lo))
    throw std::invalid_argument("verify_experiment: empty fit window");

  VerificationReport rep;
  rep.experiment_id = rec.experiment_id;
  rep.r_star = r_star;
  rep.predicted_solution = predicted_solution_exponent(r_star);
  rep.predicted_difference = predicted_difference_exponent(r_star);
  rep.lower_applicable = lower_bound_applicable(r_star);

  {
    const double k1 = 2.0 * pi / rec.box_length;
    rep.crossover_time = (1.0 + rec.alpha * k1 * k1) / (2.0 * rec.mu * k1 * k1);
  }
  rep.window_used = opt.window;
  rep.window_used.t_hi = std::min(rep.window_used.t_hi, rep.crossover_time);
  if (!(rep.window_used.t_hi > rep.window_used.t_lo))
    throw std::invalid_argument(
        "verify_experiment: fit window starts past the spectral-gap crossover t = " +
        format_double(rep.crossover_time));

  if (!expected_id.empty()) {
    VerificationCheck c;
    c.name = "provenance";
    c.pass = rec.experiment_id == expected_id;
    c.detail = c.pass ? "experiment id matches"
                      : "expected '" + expected_id + "', record holds '" + rec.experiment_id + "'";
    rep.checks.push_back(c);
  }

  rep.solution_fit =
      fit_decay_exponent(rec.times, rec.u_h1alpha_sq, rep.window_used, opt.min_samples);
  const double measured_p = -rep.solution_fit.exponent;
  {
    VerificationCheck c;
    c.name = "solution_exponent";
    c.measured = measured_p;
    c.expected = rep.predicted_solution;
    // one-sided: the theory is an upper bound, and the lattice tail can only
    // steepen the measured slope
    c.pass = measured_p >= rep.predicted_solution - opt.exponent_tolerance;
    c.detail = "decays at least as fast as predicted minus tolerance; r^2 = " +
               format_double(rep.solution_fit.r_squared);
    rep.checks.push_back(c);
  }
  {
    VerificationCheck c;
    c.name = "solution_fit_quality";
    c.measured = rep.solution_fit.r_squared;
    c.expected = 0.99;
    c.pass = rep.solution_fit.well_conditioned;
    rep.checks.push_back(c);
  }

  // upper-bound domination against the pinned-exponent envelope
  {
    const double p = rep.predicted_solution;
    const double c_ls = detail::pinned_constant(rec.times, rec.u_h1alpha_sq, rep.window_used, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      if (rec.times[i] < rep.window_used.t_lo) continue;
      worst = std::max(worst, rec.u_h1alpha_sq[i] * std::pow(rec.times[i] + 1.0, p) / c_ls);
    }
    VerificationCheck c;
    c.name = "upper_bound";
    c.measured = worst;
    c.expected = opt.upper_slack;
    c.pass = worst <= opt.upper_slack;
    c.detail = "max of value*(t+1)^p over the LS constant, t >= " +
               format_double(rep.window_used.t_lo);
    rep.checks.push_back(c);
  }

  if (rep.lower_applicable) {
    const double q = predicted_lower_exponent(r_star);
    const double c_ls = detail::pinned_constant(rec.times, rec.u_h1alpha_sq, rep.window_used, q);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      if (rec.times[i] < rep.window_used.t_lo || rec.times[i] > rep.crossover_time) continue;
      worst = std::min(worst, rec.u_h1alpha_sq[i] * std::pow(rec.times[i] + 1.0, q) / c_ls);
    }
    VerificationCheck c;
    c.name = "lower_bound";
    c.measured = worst;
    c.expected = 1.0 / opt.lower_drop;
    c.pass = worst >= 1.0 / opt.lower_drop;
    c.detail = "min of value*(t+1)^q over the LS constant, clipped at the crossover";
    rep.checks.push_back(c);
  }

  // difference decay: either degenerate (linear-exact data) or fitted
  double w_max = 0.0;
  for (std::size_t i = 0; i < rec.times.size(); ++i)
    if (rec.times[i] >= rep.window_used.t_lo && rec.times[i] <= rep.window_used.t_hi)
      w_max = std::max(w_max, rec.w_h1alpha_sq[i]);
  const double u0 = rec.u_h1alpha_sq.front();
  if (u0 > 0.0 && w_max <= opt.degenerate_ratio * u0) {
    rep.difference_degenerate = true;
    VerificationCheck c;
    c.name = "difference_no_slower";
    c.pass = true;
    c.detail = "difference vanishes to roundoff; any rate is satisfied";
    rep.checks.push_back(c);
  } else {
    rep.difference_fit =
        fit_decay_exponent(rec.times, rec.w_h1alpha_sq, rep.window_used, opt.min_samples);
    const double measured_pw = -rep.difference_fit->exponent;
    VerificationCheck c;
    c.name = "difference_no_slower";
    c.measured = measured_pw;
    c.expected = measured_p;
    // the asymptotic-equivalence statement observable on a torus: the
    // difference decays no slower than the solution itself
    c.pass = measured_pw >= measured_p - 1e-9;
    c.detail = "difference fit vs solution fit; r^2 = " +
               format_double(rep.difference_fit->r_squared);
    rep.checks.push_back(c);

    if (opt.check_gap && r_star <= 0.0) {
      // measure the gap against the predicted solution exponent, not the fitted
      // one: the fitted solution slope carries the lattice tail (it is only ever
      // checked one-sided), and that bias would swamp the gap tolerance
      VerificationCheck gc;
      gc.name = "exponent_gap";
      gc.measured = measured_pw - rep.predicted_solution;
      gc.expected = predicted_gap(r_star);
      gc.pass = std::abs(gc.measured - gc.expected) <= opt.gap_tolerance;
      gc.detail = "difference fit minus predicted solution exponent";
      rep.checks.push_back(gc);
    }
  }

  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace sgfd
