// FFTW-backed transforms between RealVectorField and SpectralVectorField.
//
// Plans are created once per (shape, direction) with FFTW_ESTIMATE and kept
// in a process-wide cache. ESTIMATE planning is deterministic, so repeated
// runs of one binary produce bit-identical transforms; plan creation is
// mutex guarded, execution on distinct arrays is thread safe.
#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "sgfd/field.hpp"

namespace sgfd {
namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const Grid& g, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const Key key{g.dim(), g.n_points(), sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    // Plan on a scratch buffer; all our arrays share its 64-byte alignment,
    // so the plan applies to them through fftw_execute_dft.
    cvec scratch(g.total_modes());
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = (g.dim() == 2)
                      ? fftw_plan_dft_2d(g.n_points(), g.n_points(), ptr, ptr, sign, FFTW_ESTIMATE)
                      : fftw_plan_dft_3d(g.n_points(), g.n_points(), g.n_points(), ptr, ptr, sign,
                                         FFTW_ESTIMATE);
    if (!p) throw NumericalError("fft: planning failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  using Key = std::tuple<int, int, int>;
  std::mutex mu_;
  std::map<Key, fftw_plan> plans_;
};

inline void execute(const Grid& g, int sign, const cvec& in, cvec& out) {
  fftw_plan p = PlanCache::instance().get(g, sign);
  // FFTW's complex transform is in-place safe only for equal pointers; we
  // always copy input to the output buffer and transform in place.
  if (&in != &out) out = in;
  auto* ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace detail

// Forward transform of one scalar component held as complex samples:
// out(k) = (L/n)^dim * sum_x in(x) e^{-i k.x}.
inline void forward_c2c(const Grid& g, const cvec& in, cvec& out) {
  detail::execute(g, FFTW_FORWARD, in, out);
  double s = 1.0;
  for (int d = 0; d < g.dim(); ++d) s *= g.delta_x();
  for (auto& z : out) z *= s;
}

// Inverse: out(x) = (1/L)^dim * sum_k in(k) e^{+i k.x}.
inline void inverse_c2c(const Grid& g, const cvec& in, cvec& out) {
  detail::execute(g, FFTW_BACKWARD, in, out);
  double s = 1.0;
  for (int d = 0; d < g.dim(); ++d) s /= g.box_length();
  for (auto& z : out) z *= s;
}

inline SpectralVectorField to_spectral(const RealVectorField& f) {
  SpectralVectorField out(f.grid);
  cvec buf(f.grid.total_modes());
  for (int d = 0; d < f.grid.dim(); ++d) {
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = cplx(f.comp[d][i], 0.0);
    forward_c2c(f.grid, buf, out.comp[d]);
  }
  return out;
}

// check = true enforces the public contract (conjugate symmetry within
// 1e-10, imaginary residue small). Internal hot paths that maintain the
// symmetry by construction pass check = false.
inline RealVectorField to_real(const SpectralVectorField& fh, bool check = true) {
  if (check) {
    const double sym = fh.conjugate_symmetry_error();
    if (sym > 1e-10)
      throw std::invalid_argument("to_real: conjugate symmetry violated (rel err " +
                                  format_double(sym) + ")");
  }
  RealVectorField out(fh.grid);
  cvec buf(fh.grid.total_modes());
  for (int d = 0; d < fh.grid.dim(); ++d) {
    inverse_c2c(fh.grid, fh.comp[d], buf);
    double max_im = 0.0, max_re = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
      out.comp[d][i] = buf[i].real();
      max_im = std::max(max_im, std::abs(buf[i].imag()));
      max_re = std::max(max_re, std::abs(buf[i].real()));
    }
    if (check && max_im > 1e-9 * std::max(max_re, 1e-300) && max_im > 1e-280)
      throw std::invalid_argument("to_real: imaginary residue beyond tolerance");
  }
  return out;
}

}  // namespace sgfd
