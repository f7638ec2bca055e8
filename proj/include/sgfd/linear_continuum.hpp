// Exact evaluation of the linearized flow on all of R^n for radial data.
//
// The pseudo-parabolic linearization diagonalizes in frequency: each mode
// is damped by e^{t M(rho)} with
//   M(rho) = -mu rho^2 / (1 + alpha rho^2),
// a multiplier trapped in (-mu/alpha, 0]. For |v0_hat| = A(|xi|),
//   ||D^m v(t)||^2-type masses = sigma_{n-1} int_0^inf rho^{2m} w(rho)
//                                e^{2 t M(rho)} A(rho)^2 rho^{n-1} drho
// with w = 1, rho^2, (1 + alpha rho^2). These integrals carry the
// frequency-side normalization (no (2 pi)^{-n}); decay exponents are
// unaffected and the convention is noted in field.hpp.
//
// Data of decay character r makes the alpha-weighted mass fall like
// (t+1)^{-(n/2 + r + m)}, sandwiched between constants on both sides.
#pragma once

#include <vector>

#include "sgfd/fitting.hpp"
#include "sgfd/grid.hpp"
#include "sgfd/quadrature.hpp"
#include "sgfd/radial_profile.hpp"

namespace sgfd {

inline double multiplier_m(double rho, const SimParams& p) {
  const double r2 = rho * rho;
  return -p.mu * r2 / (1.0 + p.alpha * r2);
}

namespace detail {
// sigma int_0^support rho^{2m + extra} e^{2 t M} A^2 rho^{n-1} drho
inline double radial_mass(const RadialProfile& profile, const SimParams& params, double t, int m,
                          int extra_weight, bool alpha_weight, double rel_tol) {
  const auto f = [&](double s) {
    const double a = profile(s);
    if (a == 0.0) return 0.0;
    double w = 1.0;
    for (int j = 0; j < m; ++j) w *= s * s;
    if (extra_weight) w *= s * s;
    if (alpha_weight) w *= 1.0 + params.alpha * s * s;
    double sn = s;
    for (int j = 2; j < profile.n; ++j) sn *= s;
    return w * a * a * sn * std::exp(2.0 * t * multiplier_m(s, params));
  };
  return sphere_surface(profile.n) * quad::to_zero(f, profile.support_radius(), rel_tol);
}
}  // namespace detail

// The alpha-weighted squared mass of D^m applied to the linear flow at time
// t. Also the workhorse for the plain and gradient masses below.
inline double linear_norm_sq(const RadialProfile& profile, const SimParams& params, double t,
                             int m = 0, double rel_tol = 1e-9) {
  profile.validate();
  params.validate();
  if (t < 0.0) throw std::invalid_argument("linear_norm_sq: negative time");
  if (m < 0 || m > 4) throw std::invalid_argument("linear_norm_sq: m must be in 0..4");
  return detail::radial_mass(profile, params, t, m, 0, true, rel_tol);
}

struct LinearDecayCurve {
  int n = 3;
  int m = 0;  // derivative order
  std::vector<double> times;
  std::vector<double> l2_sq;
  std::vector<double> grad_l2_sq;
  std::vector<double> h1alpha_sq;
};

inline std::vector<double> log_times(double t_min, double t_max, int points_per_decade) {
  if (!(t_min > 0.0 && t_max > t_min))
    throw std::invalid_argument("log_times: need 0 < t_min < t_max");
  if (points_per_decade < 1) throw std::invalid_argument("log_times: points_per_decade >= 1");
  std::vector<double> out;
  const double decades = std::log10(t_max / t_min);
  const int total = static_cast<int>(std::ceil(decades * points_per_decade));
  for (int i = 0; i <= total; ++i)
    out.push_back(t_min * std::pow(10.0, decades * i / total));
  out.back() = t_max;
  return out;
}

// The three masses are integrated independently; h1alpha = l2 + alpha*grad
// then holds only up to quadrature error, which the tests assert.
inline LinearDecayCurve compute_linear_decay_curve(const RadialProfile& profile,
                                                   const SimParams& params,
                                                   const std::vector<double>& times, int m = 0,
                                                   double rel_tol = 1e-9) {
  profile.validate();
  params.validate();
  if (m < 0 || m > 4) throw std::invalid_argument("compute_linear_decay_curve: m must be in 0..4");
  LinearDecayCurve curve;
  curve.n = profile.n;
  curve.m = m;
  double prev = -0.0;
  for (double t : times) {
    if (!(t > 0.0) || t <= prev)
      throw std::invalid_argument("compute_linear_decay_curve: times must increase and be positive");
    prev = t;
    curve.times.push_back(t);
    curve.l2_sq.push_back(detail::radial_mass(profile, params, t, m, 0, false, rel_tol));
    curve.grad_l2_sq.push_back(detail::radial_mass(profile, params, t, m, 1, false, rel_tol));
    curve.h1alpha_sq.push_back(detail::radial_mass(profile, params, t, m, 0, true, rel_tol));
  }
  return curve;
}

inline FitResult fit_linear_exponent(const LinearDecayCurve& curve, FitWindow window) {
  return fit_decay_exponent(curve.times, curve.h1alpha_sq, window);
}

// Two-sided algebraic envelope: with p = n/2 + r + m,
//   c1 (t+1)^{-p} <= h1alpha_sq(t) <= c2 (t+c3)^{-p}
// across the sampled times, with the reporting convention c3 = 1.
struct SandwichConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 1.0;
  double exponent = 0.0;  // the p used
  bool valid = false;
};

inline SandwichConstants sandwich_constants(const LinearDecayCurve& curve, double r) {
  SandwichConstants s;
  s.exponent = 0.5 * curve.n + r + curve.m;
  if (curve.times.empty()) return s;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double q = curve.h1alpha_sq[i] * std::pow(curve.times[i] + 1.0, s.exponent);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  s.c1 = lo;
  s.c2 = hi;
  s.valid = (s.c1 > 0.0) && std::isfinite(s.c2) && s.c2 >= s.c1;
  return s;
}

}  // namespace sgfd
