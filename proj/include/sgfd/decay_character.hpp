// Decay character estimation from low-frequency spectral mass.
//
// S(rho) = integral_{|xi| <= rho} |v0_hat|^2 dxi scales like rho^{2r + n}
// when the data has decay character r; the indicator rho^{-2r-n} S(rho)
// stays pinned between positive constants exactly at that r. We estimate
// characters from sampled shell energies: sliding log-log slope fits over
// the small-radius regime give an upper and a lower character, and a single
// r_hat only when the two agree within tolerance (data with genuinely
// oscillating spectral mass keeps them apart, and r_hat stays undefined).
//
// Shell energies use the frequency measure: continuum profiles integrate
// sigma_{n-1} A(s)^2 s^{n-1} ds by quadrature, lattice fields sum
// (2 pi / L)^dim |uh(k)|^2 over 0 < |k| <= rho. The two agree for matched
// data, see field.hpp for the normalization.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "sgfd/field.hpp"
#include "sgfd/quadrature.hpp"
#include "sgfd/radial_profile.hpp"
#include "sgfd/spectral_ops.hpp"

namespace sgfd {

struct SpectrumSamples {
  int n = 3;                  // ambient dimension
  std::vector<double> radii;  // strictly decreasing, positive
  std::vector<double> shell;  // S(radii[i]), nonnegative, nonincreasing along the vector

  void validate() const {
    if (n != 2 && n != 3) throw std::invalid_argument("SpectrumSamples: n must be 2 or 3");
    if (radii.size() != shell.size() || radii.size() < 2)
      throw std::invalid_argument("SpectrumSamples: need matching radii/shell with >= 2 entries");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0)) throw std::invalid_argument("SpectrumSamples: radii must be positive");
      if (!(shell[i] >= 0.0)) throw std::invalid_argument("SpectrumSamples: shell energies must be >= 0");
      if (i > 0 && !(radii[i] < radii[i - 1]))
        throw std::invalid_argument("SpectrumSamples: radii must decrease strictly");
    }
    for (std::size_t i = 1; i < shell.size(); ++i)
      if (shell[i] > shell[i - 1] * (1.0 + 1e-12))
        throw std::invalid_argument("SpectrumSamples: S(rho) must be nondecreasing in rho");
  }
};

struct EstimateOptions {
  int min_samples = 8;
  double min_span_decades = 2.0;      // below this the report is flagged narrow
  double small_radius_fraction = 0.25;  // share of smallest radii used for slopes
  int window_points = 7;              // sliding least-squares window
  double rhat_tolerance = 0.1;        // |r_plus - r_minus| <= tol defines r_hat
};

struct DecayCharacterReport {
  int n = 3;
  bool estimable = false;
  std::optional<double> r_hat;
  double r_plus = std::numeric_limits<double>::quiet_NaN();
  double r_minus = std::numeric_limits<double>::quiet_NaN();
  double p_r_estimate = std::numeric_limits<double>::quiet_NaN();
  double window_lo = 0.0, window_hi = 0.0;  // radius interval used by the fit
  double residual = std::numeric_limits<double>::quiet_NaN();
  bool narrow_span = false;  // sampled radii spanned fewer than two decades
};

struct IndicatorBracket {
  double p_lower = 0.0;
  double p_upper = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
};

// ---- shell energies ----

// Continuum: S(rho_j) = sigma_{n-1} int_0^{rho_j} s^{2w} A(s)^2 s^{n-1} ds.
// weight_exponent w = 0 for the field itself, 1 for its gradient.
inline SpectrumSamples shell_energy(const RadialProfile& profile, std::vector<double> radii,
                                    int weight_exponent = 0, double rel_tol = 1e-10) {
  profile.validate();
  if (weight_exponent < 0 || weight_exponent > 2)
    throw std::invalid_argument("shell_energy: weight_exponent must be 0..2");
  std::sort(radii.begin(), radii.end());
  if (radii.empty() || !(radii.front() > 0.0))
    throw std::invalid_argument("shell_energy: radii must be positive");
  const double sigma = sphere_surface(profile.n);
  const auto f = [&](double s) {
    double w = 1.0;
    for (int j = 0; j < weight_exponent; ++j) w *= s * s;
    const double a = profile(s);
    double sn = s;  // s^{n-1}
    for (int j = 2; j < profile.n; ++j) sn *= s;
    return w * a * a * sn;
  };
  SpectrumSamples out;
  out.n = profile.n;
  std::vector<double> acc(radii.size());
  double running = sigma * quad::to_zero(f, radii[0], rel_tol);
  acc[0] = running;
  for (std::size_t j = 1; j < radii.size(); ++j) {
    running += sigma * quad::adaptive(f, radii[j - 1], radii[j], rel_tol);
    acc[j] = running;
  }
  for (std::size_t j = radii.size(); j-- > 0;) {
    out.radii.push_back(radii[j]);
    out.shell.push_back(std::max(acc[j], 0.0));
  }
  out.validate();
  return out;
}

// Lattice: S(rho_j) = (2 pi / L)^dim sum_{0 < |k| <= rho_j} |k|^{2w} |uh(k)|^2.
// Shells below two lattice spacings carry too few modes to trust.
inline SpectrumSamples shell_energy(const SpectralVectorField& fh, std::vector<double> radii,
                                    int weight_exponent = 0) {
  const Grid& g = fh.grid;
  if (weight_exponent < 0 || weight_exponent > 2)
    throw std::invalid_argument("shell_energy: weight_exponent must be 0..2");
  std::sort(radii.begin(), radii.end());
  if (radii.empty() || !(radii.front() >= 2.0 * g.delta_k()))
    throw std::invalid_argument("shell_energy: radii below two lattice spacings are unresolved");
  std::vector<double> acc(radii.size(), 0.0);
  const auto& ksq = g.k_squared();
  for (std::size_t idx = 0; idx < g.total_modes(); ++idx) {
    if (ksq[idx] == 0.0) continue;
    const double kabs = std::sqrt(ksq[idx]);
    const auto it = std::lower_bound(radii.begin(), radii.end(), kabs);
    if (it == radii.end()) continue;
    double mag2 = 0.0;
    for (const auto& c : fh.comp) mag2 += std::norm(c[idx]);
    double w = 1.0;
    for (int j = 0; j < weight_exponent; ++j) w *= ksq[idx];
    acc[static_cast<std::size_t>(it - radii.begin())] += w * mag2;
  }
  double measure = 1.0;
  for (int d = 0; d < g.dim(); ++d) measure *= g.delta_k();
  double running = 0.0;
  SpectrumSamples out;
  out.n = g.dim();
  std::vector<double> cum(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    running += measure * acc[j];
    cum[j] = running;
  }
  for (std::size_t j = radii.size(); j-- > 0;) {
    out.radii.push_back(radii[j]);
    out.shell.push_back(cum[j]);
  }
  out.validate();
  return out;
}

// Sampling radii adapted to the lattice: one radius between each pair of
// consecutive distinct shell moduli inside [rho_min, rho_max], so the
// cumulative shell energy is strictly increasing from sample to sample and
// log-log slopes never see staircase plateaus. If max_count > 0 and more
// radii qualify, they are thinned evenly.
inline std::vector<double> lattice_shell_radii(const Grid& grid, double rho_min, double rho_max,
                                               int max_count = 0) {
  if (!(rho_min > 0.0) || !(rho_max > rho_min))
    throw std::invalid_argument("lattice_shell_radii: need 0 < rho_min < rho_max");
  const double dk = grid.delta_k();
  std::vector<long> m2s;
  const long m2_max = static_cast<long>(std::floor((rho_max / dk) * (rho_max / dk))) + 1;
  grid.for_each([&](std::size_t, int i0, int i1, int i2) {
    const long a = grid.mode(i0), b = grid.mode(i1), c = grid.mode(i2);
    const long m2 = a * a + b * b + c * c;
    if (m2 > 0 && m2 <= m2_max) m2s.push_back(m2);
  });
  std::sort(m2s.begin(), m2s.end());
  m2s.erase(std::unique(m2s.begin(), m2s.end()), m2s.end());
  std::vector<double> out;
  for (std::size_t j = 0; j + 1 < m2s.size(); ++j) {
    const double mid = 0.5 * (std::sqrt(static_cast<double>(m2s[j])) +
                              std::sqrt(static_cast<double>(m2s[j + 1]))) * dk;
    if (mid >= rho_min && mid <= rho_max) out.push_back(mid);
  }
  if (out.size() < 2)
    throw std::invalid_argument(
        "lattice_shell_radii: fewer than two lattice shells inside the requested range");
  if (max_count > 1 && static_cast<int>(out.size()) > max_count) {
    std::vector<double> thin;
    for (int i = 0; i < max_count; ++i)
      thin.push_back(out[static_cast<std::size_t>(
          std::llround(static_cast<double>(i) * (out.size() - 1) / (max_count - 1)))]);
    thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
    out = std::move(thin);
  }
  return out;
}

// ---- estimation ----

namespace detail {

struct Regime {
  std::vector<double> log_rho, log_s;  // ascending in rho, positive S only
  double lo = 0.0, hi = 0.0;
  bool narrow = false;
};

inline Regime small_radius_regime(const SpectrumSamples& s, const EstimateOptions& opt) {
  s.validate();
  if (static_cast<int>(s.radii.size()) < opt.min_samples)
    throw std::invalid_argument("decay_character: insufficient samples (need >= 8)");
  // ascending copies
  std::vector<double> rho(s.radii.rbegin(), s.radii.rend());
  std::vector<double> val(s.shell.rbegin(), s.shell.rend());
  Regime reg;
  reg.narrow = std::log10(rho.back() / rho.front()) < opt.min_span_decades;
  std::size_t count = reg.narrow
                          ? rho.size()
                          : std::max<std::size_t>(
                                static_cast<std::size_t>(std::ceil(opt.small_radius_fraction *
                                                                   static_cast<double>(rho.size()))),
                                std::min<std::size_t>(rho.size(),
                                                      static_cast<std::size_t>(opt.window_points) + 2));
  count = std::min(count, rho.size());
  reg.lo = rho.front();
  reg.hi = rho[count - 1];
  for (std::size_t i = 0; i < count; ++i) {
    if (val[i] > 0.0) {
      reg.log_rho.push_back(std::log(rho[i]));
      reg.log_s.push_back(std::log(val[i]));
    }
  }
  return reg;
}

}  // namespace detail

// Liminf/limsup proxy for the indicator rho^{-2r-n} S(rho): min and max over
// the small-radius window. At the true character both stay order one; above
// it the upper value blows up as radii shrink, below it the lower one sinks
// to zero.
inline IndicatorBracket decay_indicator(const SpectrumSamples& samples, double r,
                                        EstimateOptions opt = {}) {
  const auto reg = detail::small_radius_regime(samples, opt);
  IndicatorBracket out;
  out.window_lo = reg.lo;
  out.window_hi = reg.hi;
  if (reg.log_rho.empty()) return out;  // identically zero data: bracket collapses to 0
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < reg.log_rho.size(); ++i) {
    const double q = std::exp(reg.log_s[i] - (2.0 * r + samples.n) * reg.log_rho[i]);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  out.p_lower = lo;
  out.p_upper = hi;
  return out;
}

inline DecayCharacterReport estimate_characters(const SpectrumSamples& samples,
                                                EstimateOptions opt = {}) {
  const auto reg = detail::small_radius_regime(samples, opt);
  DecayCharacterReport rep;
  rep.n = samples.n;
  rep.narrow_span = reg.narrow;
  rep.window_lo = reg.lo;
  rep.window_hi = reg.hi;
  const std::size_t usable = reg.log_rho.size();
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(opt.window_points), usable);
  if (usable < 4 || w < 3) return rep;  // zero or near-zero data: nothing to estimate
  double slope_min = std::numeric_limits<double>::infinity();
  double slope_max = -std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start + w <= usable; ++start) {
    std::vector<double> x(reg.log_rho.begin() + start, reg.log_rho.begin() + start + w);
    std::vector<double> y(reg.log_s.begin() + start, reg.log_s.begin() + start + w);
    const double slope = fit_line(x, y).slope;
    slope_min = std::min(slope_min, slope);
    slope_max = std::max(slope_max, slope);
  }
  rep.estimable = true;
  rep.r_plus = 0.5 * (slope_max - samples.n);
  rep.r_minus = 0.5 * (slope_min - samples.n);
  const auto global = fit_line(reg.log_rho, reg.log_s);
  rep.residual = global.max_abs_residual;
  if (rep.r_plus - rep.r_minus <= opt.rhat_tolerance) {
    rep.r_hat = 0.5 * (rep.r_plus + rep.r_minus);
    double p_acc = 0.0;
    for (std::size_t i = 0; i < usable; ++i)
      p_acc += std::exp(reg.log_s[i] - (2.0 * *rep.r_hat + samples.n) * reg.log_rho[i]);
    rep.p_r_estimate = p_acc / static_cast<double>(usable);
  }
  return rep;
}

struct ShiftReport {
  std::optional<double> difference;  // grad character minus base character
  DecayCharacterReport base;
  DecayCharacterReport grad;
};

// Applying a gradient shifts the decay character by exactly one; comparing
// the two estimates is a self-consistency check of the estimator.
inline ShiftReport shift_by_gradient(const SpectrumSamples& base_samples,
                                     const SpectrumSamples& grad_samples,
                                     EstimateOptions opt = {}) {
  ShiftReport out;
  out.base = estimate_characters(base_samples, opt);
  out.grad = estimate_characters(grad_samples, opt);
  if (out.base.r_hat && out.grad.r_hat) out.difference = *out.grad.r_hat - *out.base.r_hat;
  return out;
}

// ---- synthetic data ----

// Divergence-free lattice data with |uh(k)| = A(|k|) exactly: each retained
// nonzero mode gets a random complex direction drawn inside the plane
// orthogonal to k, so the Leray projection (still applied; it is idempotent)
// does not disturb the radial magnitude profile. Conjugate symmetry is
// enforced by construction and the zero mode stays empty. target_v2_norm > 0
// rescales the result so that sqrt(norm_v2_sq) hits the target exactly.
inline SpectralVectorField make_data(const RadialProfile& profile, const Grid& grid,
                                     const SimParams& params, std::uint64_t seed,
                                     double target_v2_norm = 0.0) {
  profile.validate();
  params.validate();
  if (profile.n != grid.dim())
    throw std::invalid_argument("make_data: profile dimension does not match the grid");
  if (profile.support_radius() > grid.retained_band())
    throw std::invalid_argument(
        "make_data: grid too coarse to resolve the profile support; "
        "increase n_points or shrink the box");
  SpectralVectorField fh(grid);
  Rng rng(seed);
  const auto& mask = grid.dealias_mask();
  const auto& ksq = grid.k_squared();
  std::size_t populated = 0;
  grid.for_each([&](std::size_t idx, int i0, int i1, int i2) {
    const std::size_t jdx = grid.conjugate_index(i0, i1, i2);
    if (idx >= jdx) return;  // fill each conjugate pair once
    if (!mask[idx] || ksq[idx] == 0.0) return;
    const double kabs = std::sqrt(ksq[idx]);
    const double amp = profile(kabs);
    if (amp <= 0.0) return;
    if (grid.dim() == 2) {
      const double k0 = grid.wavenumber(i0), k1 = grid.wavenumber(i1);
      const double b0 = -k1 / kabs, b1 = k0 / kabs;
      cplx gph = rng.gaussian_cplx();
      gph /= std::abs(gph);
      fh.comp[0][idx] = amp * gph * b0;
      fh.comp[1][idx] = amp * gph * b1;
      fh.comp[0][jdx] = std::conj(fh.comp[0][idx]);
      fh.comp[1][jdx] = std::conj(fh.comp[1][idx]);
    } else {
      const double kk[3] = {grid.wavenumber(i0), grid.wavenumber(i1), grid.wavenumber(i2)};
      // orthonormal basis of the plane orthogonal to k
      int least = 0;
      for (int d = 1; d < 3; ++d)
        if (std::abs(kk[d]) < std::abs(kk[least])) least = d;
      double e[3] = {0.0, 0.0, 0.0};
      e[least] = 1.0;
      double b1[3] = {e[1] * kk[2] - e[2] * kk[1], e[2] * kk[0] - e[0] * kk[2],
                      e[0] * kk[1] - e[1] * kk[0]};
      const double b1n = std::sqrt(b1[0] * b1[0] + b1[1] * b1[1] + b1[2] * b1[2]);
      for (double& v : b1) v /= b1n;
      double b2[3] = {kk[1] * b1[2] - kk[2] * b1[1], kk[2] * b1[0] - kk[0] * b1[2],
                      kk[0] * b1[1] - kk[1] * b1[0]};
      for (double& v : b2) v /= kabs;
      const cplx g1 = rng.gaussian_cplx(), g2 = rng.gaussian_cplx();
      const double gn = std::sqrt(std::norm(g1) + std::norm(g2));
      for (int d = 0; d < 3; ++d) {
        fh.comp[d][idx] = amp * (g1 * b1[d] + g2 * b2[d]) / gn;
        fh.comp[d][jdx] = std::conj(fh.comp[d][idx]);
      }
    }
    ++populated;
  });
  if (populated == 0)
    throw std::invalid_argument("make_data: no lattice modes inside the profile support; "
                                "the box is too small for this cutoff");
  fh.zero_mean();
  leray_project(fh);
  if (target_v2_norm > 0.0) {
    if (grid.dim() != 3)
      throw std::invalid_argument("make_data: V2 rescaling requires dim 3");
    const double v2 = std::sqrt(norm_v2_sq(fh, params));
    if (!(v2 > 0.0)) throw std::invalid_argument("make_data: cannot rescale an empty field");
    scale(fh, target_v2_norm / v2);
  }
  return fh;
}

}  // namespace sgfd
