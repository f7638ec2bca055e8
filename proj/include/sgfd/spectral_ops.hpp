// Spectral calculus on the periodic box: Leray projection, curl, the
// (1 + alpha |k|^2) Helmholtz weight, Plancherel norms, the quadratic term
// of the filtered momentum equation and its per-mode a-priori bound.
//
// The quadratic forcing is G = -F{ curl(u - alpha Delta u) x u }. Every
// mode of the unprojected G obeys
//   |G(k)| <= (3/2)|k| ||u||^2 + alpha |k|^2 ||u||^2
//             + alpha ((5/2)|k| + |k|^2) ||grad u||^2,
// with L^2 norms over the box; lemma1_bound_check measures the worst ratio.
#pragma once

#include <cmath>

#include "sgfd/fft.hpp"

namespace sgfd {

// P = I - k (k . )/|k|^2 applied mode-wise; the zero mode is untouched.
// Idempotent and annihilates gradient fields.
inline void leray_project(SpectralVectorField& fh) {
  const Grid& g = fh.grid;
  const auto& ksq = g.k_squared();
  g.for_each([&](std::size_t idx, int i0, int i1, int i2) {
    if (ksq[idx] == 0.0) return;
    const double kk[3] = {g.wavenumber(i0), g.wavenumber(i1),
                          g.dim() == 3 ? g.wavenumber(i2) : 0.0};
    cplx kdotf(0.0, 0.0);
    for (int d = 0; d < g.dim(); ++d) kdotf += kk[d] * fh.comp[d][idx];
    kdotf /= ksq[idx];
    for (int d = 0; d < g.dim(); ++d) fh.comp[d][idx] -= kk[d] * kdotf;
  });
}

// q(k) = i k x f(k); three dimensional fields only.
inline SpectralVectorField curl_spectral(const SpectralVectorField& fh) {
  const Grid& g = fh.grid;
  if (g.dim() != 3) throw std::invalid_argument("curl_spectral: dim must be 3");
  SpectralVectorField out(g);
  g.for_each([&](std::size_t idx, int i0, int i1, int i2) {
    const double k0 = g.wavenumber(i0), k1 = g.wavenumber(i1), k2 = g.wavenumber(i2);
    const cplx f0 = fh.comp[0][idx], f1 = fh.comp[1][idx], f2 = fh.comp[2][idx];
    const cplx i_unit(0.0, 1.0);
    out.comp[0][idx] = i_unit * (k1 * f2 - k2 * f1);
    out.comp[1][idx] = i_unit * (k2 * f0 - k0 * f2);
    out.comp[2][idx] = i_unit * (k0 * f1 - k1 * f0);
  });
  return out;
}

// Multiply by (1 + alpha |k|^2) (forward) or its reciprocal (inverse).
// The weight is bounded away from zero, so the inverse is exact up to
// roundoff and forward-then-inverse round-trips.
inline void helmholtz_weight(SpectralVectorField& fh, double alpha, bool inverse = false) {
  if (!(alpha > 0.0)) throw std::invalid_argument("helmholtz_weight: alpha must be > 0");
  const auto& ksq = fh.grid.k_squared();
  for (auto& c : fh.comp)
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double w = 1.0 + alpha * ksq[i];
      c[i] = inverse ? c[i] / w : c[i] * w;
    }
}

namespace detail {
// (1/L^dim) sum_k weight(|k|^2) |uh(k)|^2; see field.hpp for the convention.
template <class W>
double weighted_plancherel(const SpectralVectorField& fh, W&& weight) {
  const auto& ksq = fh.grid.k_squared();
  double acc = 0.0;
  for (const auto& c : fh.comp) {
    double comp_acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) comp_acc += weight(ksq[i]) * std::norm(c[i]);
    acc += comp_acc;
  }
  double vol = 1.0;
  for (int d = 0; d < fh.grid.dim(); ++d) vol *= fh.grid.box_length();
  return acc / vol;
}
}  // namespace detail

inline double norm_l2_sq(const SpectralVectorField& fh) {
  return detail::weighted_plancherel(fh, [](double) { return 1.0; });
}

inline double norm_grad_l2_sq(const SpectralVectorField& fh) {
  return detail::weighted_plancherel(fh, [](double k2) { return k2; });
}

inline double norm_h1alpha_sq(const SpectralVectorField& fh, const SimParams& p) {
  return detail::weighted_plancherel(fh, [&](double k2) { return 1.0 + p.alpha * k2; });
}

// ||D^m u||^2 in the alpha-weighted metric: sum |k|^{2m} (1+alpha|k|^2)|uh|^2.
inline double norm_dm_h1alpha_sq(const SpectralVectorField& fh, const SimParams& p, int m) {
  if (m < 0 || m > 4) throw std::invalid_argument("norm_dm_h1alpha_sq: m must be in 0..4");
  return detail::weighted_plancherel(fh, [&](double k2) {
    double km = 1.0;
    for (int j = 0; j < m; ++j) km *= k2;
    return km * (1.0 + p.alpha * k2);
  });
}

// ||u||^2 + alpha ||grad u||^2 + ||curl(u - alpha Delta u)||^2, the curl part
// summed over the retained (dealiased) band.
inline double norm_v2_sq(const SpectralVectorField& fh, const SimParams& p) {
  if (fh.grid.dim() != 3) throw std::invalid_argument("norm_v2_sq: dim must be 3");
  const Grid& g = fh.grid;
  const auto& ksq = g.k_squared();
  const auto& mask = g.dealias_mask();
  double acc = 0.0;
  g.for_each([&](std::size_t idx, int i0, int i1, int i2) {
    if (!mask[idx]) return;
    const double w = 1.0 + p.alpha * ksq[idx];
    const double k0 = g.wavenumber(i0), k1 = g.wavenumber(i1), k2 = g.wavenumber(i2);
    const cplx f0 = w * fh.comp[0][idx], f1 = w * fh.comp[1][idx], f2 = w * fh.comp[2][idx];
    acc += std::norm(k1 * f2 - k2 * f1) + std::norm(k2 * f0 - k0 * f2) +
           std::norm(k0 * f1 - k1 * f0);
  });
  double vol = 1.0;
  for (int d = 0; d < 3; ++d) vol *= g.box_length();
  return norm_h1alpha_sq(fh, p) + acc / vol;
}

// G = -F{ q x u } with q = curl((1 + alpha |k|^2) u), the cross product
// taken pointwise in physical space, the result dealiased and mean-free.
// With project = true the Leray projection is applied on top.
inline SpectralVectorField nonlinear_term_spectral(const SpectralVectorField& uh,
                                                   const SimParams& params, bool project = true) {
  if (uh.grid.dim() != 3) throw std::invalid_argument("nonlinear_term_spectral: dim must be 3");
  const double div = uh.divergence_rel();
  if (div > 1e-8)
    throw std::invalid_argument("nonlinear_term_spectral: input not divergence-free (rel " +
                                format_double(div) + ")");
  SpectralVectorField weighted = uh;
  helmholtz_weight(weighted, params.alpha);
  SpectralVectorField qh = curl_spectral(weighted);
  RealVectorField q = to_real(qh, false);
  RealVectorField u = to_real(uh, false);
  RealVectorField cross(uh.grid);
  const std::size_t n = uh.grid.total_modes();
  for (std::size_t i = 0; i < n; ++i) {
    const double q0 = q.comp[0][i], q1 = q.comp[1][i], q2 = q.comp[2][i];
    const double u0 = u.comp[0][i], u1 = u.comp[1][i], u2 = u.comp[2][i];
    cross.comp[0][i] = q1 * u2 - q2 * u1;
    cross.comp[1][i] = q2 * u0 - q0 * u2;
    cross.comp[2][i] = q0 * u1 - q1 * u0;
  }
  SpectralVectorField gh = to_spectral(cross);
  scale(gh, -1.0);
  gh.apply_dealias_mask();
  gh.zero_mean();
  if (project) leray_project(gh);
  return gh;
}

struct Lemma1Report {
  double max_ratio = 0.0;
  bool pass = true;
};

// Worst |G(k)| / bound(k) over retained nonzero modes of the unprojected G.
inline Lemma1Report lemma1_bound_check(const SpectralVectorField& uh, const SimParams& params) {
  const SpectralVectorField gh = nonlinear_term_spectral(uh, params, false);
  const double l2 = norm_l2_sq(uh);
  const double grad = norm_grad_l2_sq(uh);
  const Grid& g = uh.grid;
  const auto& ksq = g.k_squared();
  const auto& mask = g.dealias_mask();
  Lemma1Report rep;
  for (std::size_t i = 0; i < g.total_modes(); ++i) {
    if (!mask[i] || ksq[i] == 0.0) continue;
    const double kabs = std::sqrt(ksq[i]);
    const double bound = 1.5 * kabs * l2 + params.alpha * ksq[i] * l2 +
                         params.alpha * (2.5 * kabs + ksq[i]) * grad;
    const double gmag = std::sqrt(std::norm(gh.comp[0][i]) + std::norm(gh.comp[1][i]) +
                                  std::norm(gh.comp[2][i]));
    if (bound > 0.0) rep.max_ratio = std::max(rep.max_ratio, gmag / bound);
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-6;
  return rep;
}

}  // namespace sgfd
