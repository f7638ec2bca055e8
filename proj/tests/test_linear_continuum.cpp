// Quadrature engine and the continuum evaluation of the linear flow,
// checked against closed forms:
//  - power-law masses at t = 0,
//  - the heat-kernel asymptote for alpha -> 0,
//  - the h1alpha = l2 + alpha * grad identity across independently computed
//    integrals,
//  - fitted exponents -(3/2 + r + m) on late windows.
#include <catch2/catch_amalgamated.hpp>

#include "sgfd/linear_continuum.hpp"

using namespace sgfd;

TEST_CASE("gauss-kronrod and adaptive panels on smooth integrands") {
  const auto sq = [](double x) { return x * x; };
  REQUIRE(quad::adaptive(sq, 0.0, 1.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto sine = [](double x) { return std::sin(x); };
  REQUIRE(quad::adaptive(sine, 0.0, pi) == Catch::Approx(2.0).epsilon(1e-12));
  const auto bump = [](double x) { return std::exp(-40.0 * (x - 0.3) * (x - 0.3)); };
  const double s = std::sqrt(40.0);
  const double bump_exact =
      0.5 * std::sqrt(pi / 40.0) * (std::erf(0.3 * s) + std::erf(0.7 * s));
  REQUIRE(quad::adaptive(bump, 0.0, 1.0) == Catch::Approx(bump_exact).epsilon(1e-10));
}

TEST_CASE("descent to zero handles decaying and singular integrands") {
  const auto gauss = [](double x) { return std::exp(-x * x); };
  REQUIRE(quad::to_zero(gauss, 10.0) == Catch::Approx(std::sqrt(pi) / 2.0).epsilon(1e-9));
  const auto sing = [](double x) { return std::pow(x, -0.9); };
  REQUIRE(quad::to_zero(sing, 1.0) == Catch::Approx(10.0).epsilon(1e-8));
  const auto zero = [](double) { return 0.0; };
  REQUIRE(quad::to_zero(zero, 1.0) == 0.0);
}

TEST_CASE("pseudo-parabolic multiplier") {
  SimParams prm;
  prm.alpha = 2.0;
  prm.mu = 3.0;
  REQUIRE(multiplier_m(0.0, prm) == 0.0);
  REQUIRE(multiplier_m(1.0, prm) == Catch::Approx(-1.0).epsilon(1e-15));
  REQUIRE(multiplier_m(1e8, prm) == Catch::Approx(-prm.mu / prm.alpha).epsilon(1e-12));
  // bounded below by -mu/alpha, decreasing in rho
  double prev = 0.0;
  for (double rho = 0.125; rho < 1e3; rho *= 2.0) {
    const double m = multiplier_m(rho, prm);
    REQUIRE(m < prev);
    REQUIRE(m > -prm.mu / prm.alpha);
    prev = m;
  }
}

namespace {

RadialProfile sharp_power(double r, double cutoff = 1.0) {
  RadialProfile p;
  p.kind = ProfileKind::power_law;
  p.n = 3;
  p.r = r;
  p.amplitude = 0.9;
  p.cutoff_radius = cutoff;
  p.smoothing_width = 1e-7;  // taper mass stays below the oracle margins
  return p;
}

}  // namespace

TEST_CASE("initial masses match power-law closed forms") {
  SimParams prm;
  prm.alpha = 0.8;
  const double c = 1.0;
  for (double r : {-1.0, 0.0, 1.5}) {
    const RadialProfile p = sharp_power(r, c);
    const double a2 = p.amplitude * p.amplitude;
    for (int m = 0; m <= 2; ++m) {
      const double lo = 2.0 * r + 2.0 * m + 3.0;
      const double expected =
          4.0 * pi * a2 *
          (std::pow(c, lo) / lo + prm.alpha * std::pow(c, lo + 2.0) / (lo + 2.0));
      INFO("r " << r << " m " << m);
      REQUIRE(linear_norm_sq(p, prm, 0.0, m) == Catch::Approx(expected).epsilon(1e-5));
    }
  }
}

TEST_CASE("alpha to zero limit reproduces the heat kernel decay") {
  SimParams prm;
  prm.alpha = 1e-8;
  prm.mu = 0.7;
  const RadialProfile p = sharp_power(0.0);
  const double t = 300.0;
  const double expected =
      4.0 * pi * p.amplitude * p.amplitude * std::sqrt(pi) / 4.0 /
      std::pow(2.0 * prm.mu * t, 1.5);
  const LinearDecayCurve curve = compute_linear_decay_curve(p, prm, {t});
  REQUIRE(curve.l2_sq[0] == Catch::Approx(expected).epsilon(1e-5));
}

TEST_CASE("decay curve internal identities") {
  SimParams prm;
  prm.alpha = 1.0;
  const RadialProfile p = sharp_power(-0.5);
  const auto times = log_times(0.5, 2e3, 6);
  const LinearDecayCurve curve = compute_linear_decay_curve(p, prm, times);
  REQUIRE(curve.times.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    // h1alpha integrated on its own must equal l2 + alpha grad
    REQUIRE(curve.h1alpha_sq[i] ==
            Catch::Approx(curve.l2_sq[i] + prm.alpha * curve.grad_l2_sq[i]).epsilon(1e-7));
    REQUIRE(curve.h1alpha_sq[i] ==
            Catch::Approx(linear_norm_sq(p, prm, times[i])).epsilon(1e-7));
    if (i > 0) {
      REQUIRE(curve.l2_sq[i] < curve.l2_sq[i - 1]);
      REQUIRE(curve.h1alpha_sq[i] < curve.h1alpha_sq[i - 1]);
    }
  }
}

TEST_CASE("fitted exponents approach the predicted rates") {
  SimParams prm;
  const auto times = log_times(50.0, 1e4, 8);
  {
    const RadialProfile p = sharp_power(-0.5);
    const LinearDecayCurve curve = compute_linear_decay_curve(p, prm, times);
    const FitResult fit = fit_linear_exponent(curve, {1e2, 1e4});
    REQUIRE(-fit.exponent == Catch::Approx(1.0).margin(0.05));
    REQUIRE(fit.well_conditioned);
  }
  {
    const RadialProfile p = sharp_power(0.0);
    const LinearDecayCurve curve = compute_linear_decay_curve(p, prm, times, 1);
    const FitResult fit = fit_linear_exponent(curve, {1e2, 1e4});
    REQUIRE(-fit.exponent == Catch::Approx(2.5).margin(0.05));
  }
}

TEST_CASE("sandwich constants bound the curve") {
  SimParams prm;
  const double r = 0.0;
  const RadialProfile p = sharp_power(r);
  const LinearDecayCurve curve = compute_linear_decay_curve(p, prm, log_times(10.0, 1e4, 6));
  const SandwichConstants s = sandwich_constants(curve, r);
  REQUIRE(s.valid);
  REQUIRE(s.c1 > 0.0);
  REQUIRE(s.c1 <= s.c2);
  REQUIRE(s.exponent == Catch::Approx(1.5));
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double lower = s.c1 * std::pow(curve.times[i] + 1.0, -s.exponent);
    const double upper = s.c2 * std::pow(curve.times[i] + s.c3, -s.exponent);
    REQUIRE(curve.h1alpha_sq[i] >= lower * (1.0 - 1e-12));
    REQUIRE(curve.h1alpha_sq[i] <= upper * (1.0 + 1e-12));
  }
}

TEST_CASE("log time grids") {
  const auto ts = log_times(0.1, 100.0, 4);
  REQUIRE(ts.front() == Catch::Approx(0.1));
  REQUIRE(ts.back() == 100.0);
  for (std::size_t i = 1; i < ts.size(); ++i) REQUIRE(ts[i] > ts[i - 1]);
  REQUIRE_THROWS_AS(log_times(1.0, 0.5, 4), std::invalid_argument);
}

TEST_CASE("input validation") {
  SimParams prm;
  const RadialProfile p = sharp_power(0.0);
  REQUIRE_THROWS_AS(linear_norm_sq(p, prm, -1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(linear_norm_sq(p, prm, 1.0, 7), std::invalid_argument);
  REQUIRE_THROWS_AS(compute_linear_decay_curve(p, prm, {2.0, 1.0}), std::invalid_argument);
}
