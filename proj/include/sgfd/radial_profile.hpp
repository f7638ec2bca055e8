// Radial spectral amplitude profiles A(rho) >= 0 with compact support.
// |v0_hat(xi)| = A(|xi|) defines synthetic initial data whose low-frequency
// mass scaling (the decay character) is known in closed form:
//   power_law    A = a * rho^r inside the cutoff, character r
//   oscillatory  exponent sweeps [r_lo, r_hi] log-periodically, so the
//                upper/lower characters split and no single r exists
//   lp_like      the borderline power law of L^p data, r = -n(1 - 1/p)
//   custom       arbitrary callable (test hook)
// Beyond cutoff_radius the amplitude tapers to zero across smoothing_width
// with a C^2 smoothstep.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "sgfd/common.hpp"

namespace sgfd {

enum class ProfileKind { power_law, oscillatory, lp_like, custom };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::power_law: return "power_law";
    case ProfileKind::oscillatory: return "oscillatory";
    case ProfileKind::lp_like: return "lp_like";
    case ProfileKind::custom: return "custom";
  }
  return "?";
}

// Predicted decay character of data that is in L^p, 1 <= p < 2 (p = 2
// carries no extra information and is rejected).
inline double lp_predicted_character(double p, int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("lp_predicted_character: n must be 2 or 3");
  if (!(p >= 1.0 && p < 2.0))
    throw std::invalid_argument("lp_predicted_character: p must lie in [1, 2)");
  return -n * (1.0 - 1.0 / p);
}

struct RadialProfile {
  ProfileKind kind = ProfileKind::power_law;
  int n = 3;                     // ambient dimension (2 or 3)
  double r = 0.0;                // power_law exponent
  double cutoff_radius = 1.0;    // flat support end
  double smoothing_width = 0.1;  // taper width beyond the cutoff
  double amplitude = 1.0;
  // oscillatory parameters: exponent r(rho) swings over [r_lo, r_hi] with
  // period log_period in ln(rho)
  double r_lo = -1.0;
  double r_hi = 0.0;
  double log_period = 3.0;
  // lp_like parameter
  double p = 1.0;
  std::function<double(double)> custom_fn;

  void validate() const {
    if (n != 2 && n != 3) throw std::invalid_argument("RadialProfile: n must be 2 or 3");
    if (!(cutoff_radius > 0.0)) throw std::invalid_argument("RadialProfile: cutoff_radius must be > 0");
    if (!(smoothing_width > 0.0)) throw std::invalid_argument("RadialProfile: smoothing_width must be > 0");
    if (!(amplitude >= 0.0)) throw std::invalid_argument("RadialProfile: amplitude must be >= 0");
    switch (kind) {
      case ProfileKind::power_law:
        // r <= -n/2 makes the L^2 mass diverge at the origin
        if (!(r > -0.5 * n)) throw std::invalid_argument("RadialProfile: r must exceed -n/2");
        break;
      case ProfileKind::oscillatory:
        if (!(r_lo < r_hi)) throw std::invalid_argument("RadialProfile: need r_lo < r_hi");
        if (!(r_lo > -0.5 * n)) throw std::invalid_argument("RadialProfile: r_lo must exceed -n/2");
        if (!(log_period > 0.0)) throw std::invalid_argument("RadialProfile: log_period must be > 0");
        break;
      case ProfileKind::lp_like:
        lp_predicted_character(p, n);  // validates p
        break;
      case ProfileKind::custom:
        if (!custom_fn) throw std::invalid_argument("RadialProfile: custom profile needs a callable");
        break;
    }
  }

  double support_radius() const { return cutoff_radius + smoothing_width; }

  // Exponent actually used by the power envelope at radius rho.
  double exponent_at(double rho) const {
    switch (kind) {
      case ProfileKind::power_law: return r;
      case ProfileKind::lp_like: return lp_predicted_character(p, n);
      case ProfileKind::oscillatory: {
        const double mid = 0.5 * (r_lo + r_hi), half = 0.5 * (r_hi - r_lo);
        return mid + half * std::sin(2.0 * pi * std::log(rho) / log_period);
      }
      case ProfileKind::custom: return 0.0;
    }
    return 0.0;
  }

  // C^2 descending smoothstep on [0, 1].
  static double taper(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return 1.0 - x * x * x * (x * (6.0 * x - 15.0) + 10.0);
  }

  double operator()(double rho) const {
    if (!(rho > 0.0)) return 0.0;
    if (rho >= support_radius()) return 0.0;
    if (kind == ProfileKind::custom) return custom_fn(rho);
    const double cut = (rho <= cutoff_radius)
                           ? 1.0
                           : taper((rho - cutoff_radius) / smoothing_width);
    return amplitude * std::pow(rho, exponent_at(rho)) * cut;
  }
};

// Surface measure of the unit sphere in R^n.
inline double sphere_surface(int n) {
  if (n == 2) return 2.0 * pi;
  if (n == 3) return 4.0 * pi;
  throw std::invalid_argument("sphere_surface: n must be 2 or 3");
}

}  // namespace sgfd
