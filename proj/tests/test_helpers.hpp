// Shared helpers for the test binaries.
#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "sgfd/fft.hpp"
#include "sgfd/spectral_ops.hpp"

namespace sgfd::testing {

// Gaussian band-limited divergence-free field with clean symmetry.
inline SpectralVectorField random_divfree(const Grid& g, std::uint64_t seed,
                                          double amplitude = 1.0) {
  SpectralVectorField fh(g);
  Rng rng(seed);
  const auto& mask = g.dealias_mask();
  const auto& ksq = g.k_squared();
  for (std::size_t i = 0; i < g.total_modes(); ++i) {
    if (!mask[i] || ksq[i] == 0.0) continue;
    for (int d = 0; d < g.dim(); ++d) fh.comp[d][i] = amplitude * rng.gaussian_cplx();
  }
  fh.symmetrize();
  fh.zero_mean();
  fh.apply_dealias_mask();
  leray_project(fh);
  return fh;
}

inline int mode_to_index(const Grid& g, int m) { return m >= 0 ? m : m + g.n_points(); }

// Sets uh(k) = coef and uh(-k) = conj(coef) for lattice mode (m0, m1, m2).
inline void set_mode_pair(SpectralVectorField& fh, int m0, int m1, int m2,
                          const std::array<cplx, 3>& coef) {
  const Grid& g = fh.grid;
  const int i0 = mode_to_index(g, m0), i1 = mode_to_index(g, m1), i2 = mode_to_index(g, m2);
  const std::size_t idx = g.flat(i0, i1, i2);
  const std::size_t jdx = g.conjugate_index(i0, i1, i2);
  for (int d = 0; d < 3; ++d) {
    fh.comp[d][idx] = coef[d];
    fh.comp[d][jdx] = std::conj(coef[d]);
  }
}

inline double rel_max_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  double diff = 0.0, scale = 0.0;
  for (int d = 0; d < a.grid.dim(); ++d)
    for (std::size_t i = 0; i < a.comp[d].size(); ++i) {
      diff = std::max(diff, std::abs(a.comp[d][i] - b.comp[d][i]));
      scale = std::max(scale, std::abs(a.comp[d][i]));
    }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace sgfd::testing
