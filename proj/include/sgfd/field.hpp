// Vector fields on the periodic box in both representations.
//
// Spectral coefficients follow the box-integral convention
//   uh(k) = (L/n)^dim * DFT[u](k)  ~  integral over the box of e^{-i k.x} u(x) dx,
// so Parseval reads  integral |u|^2 dx = (1/L^dim) * sum_k |uh(k)|^2.
// Every norm in the library uses that (1/L^dim) weight; shell energies use
// the frequency-space measure (2*pi/L)^dim instead, which reproduces
// integral |u_hat|^2 dxi = (2*pi)^dim * integral |u|^2 dx. This is the one
// place the Fourier-side factor lives.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sgfd/common.hpp"
#include "sgfd/grid.hpp"

namespace sgfd {

struct RealVectorField {
  Grid grid;
  std::vector<dvec> comp;  // dim components, each n^dim samples

  explicit RealVectorField(const Grid& g) : grid(g) {
    comp.assign(g.dim(), dvec(g.total_modes(), 0.0));
  }
};

struct SpectralVectorField {
  Grid grid;
  std::vector<cvec> comp;

  explicit SpectralVectorField(const Grid& g) : grid(g) {
    comp.assign(g.dim(), cvec(g.total_modes(), cplx(0.0, 0.0)));
  }

  void set_zero() {
    for (auto& c : comp) std::fill(c.begin(), c.end(), cplx(0.0, 0.0));
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : comp)
      for (const cplx& z : c) m = std::max(m, std::max(std::abs(z.real()), std::abs(z.imag())));
    return m;
  }

  // Largest |uh(-k) - conj(uh(k))| relative to the largest coefficient.
  double conjugate_symmetry_error() const {
    double worst = 0.0, scale = 0.0;
    grid.for_each([&](std::size_t idx, int i0, int i1, int i2) {
      const std::size_t jdx = grid.conjugate_index(i0, i1, i2);
      for (const auto& c : comp) {
        scale = std::max(scale, std::abs(c[idx]));
        worst = std::max(worst, std::abs(c[jdx] - std::conj(c[idx])));
      }
    });
    return (scale > 0.0) ? worst / scale : 0.0;
  }

  // Project onto the conjugate-symmetric (real-field) subspace.
  void symmetrize() {
    grid.for_each([&](std::size_t idx, int i0, int i1, int i2) {
      const std::size_t jdx = grid.conjugate_index(i0, i1, i2);
      if (jdx < idx) return;
      for (auto& c : comp) {
        if (jdx == idx) {
          c[idx] = cplx(c[idx].real(), 0.0);
        } else {
          const cplx avg = 0.5 * (c[idx] + std::conj(c[jdx]));
          c[idx] = avg;
          c[jdx] = std::conj(avg);
        }
      }
    });
  }

  void zero_mean() {
    for (auto& c : comp) c[0] = cplx(0.0, 0.0);
  }

  void apply_dealias_mask() {
    const auto& mask = grid.dealias_mask();
    for (auto& c : comp)
      for (std::size_t i = 0; i < c.size(); ++i)
        if (!mask[i]) c[i] = cplx(0.0, 0.0);
  }

  // Relative divergence: ||k.uh|| / ||(|k| |uh|)|| over all modes.
  double divergence_rel() const {
    double num = 0.0, den = 0.0;
    const auto& ksq = grid.k_squared();
    grid.for_each([&](std::size_t idx, int i0, int i1, int i2) {
      cplx div(0.0, 0.0);
      double mag2 = 0.0;
      const double kk[3] = {grid.wavenumber(i0), grid.wavenumber(i1),
                            grid.dim() == 3 ? grid.wavenumber(i2) : 0.0};
      for (int d = 0; d < grid.dim(); ++d) {
        div += kk[d] * comp[d][idx];
        mag2 += std::norm(comp[d][idx]);
      }
      num += std::norm(div);
      den += ksq[idx] * mag2;
    });
    return (den > 0.0) ? std::sqrt(num / den) : 0.0;
  }
};

inline void check_same_grid(const SpectralVectorField& a, const SpectralVectorField& b,
                            const char* where) {
  if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

// y += s * x
inline void axpy(SpectralVectorField& y, double s, const SpectralVectorField& x) {
  check_same_grid(y, x, "axpy");
  for (int d = 0; d < y.grid.dim(); ++d)
    for (std::size_t i = 0; i < y.comp[d].size(); ++i) y.comp[d][i] += s * x.comp[d][i];
}

inline void scale(SpectralVectorField& y, double s) {
  for (auto& c : y.comp)
    for (auto& z : c) z *= s;
}

}  // namespace sgfd
