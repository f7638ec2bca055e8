// Periodic box discretization. A Grid owns the wavenumber bookkeeping for a
// uniform n^dim lattice on [0, L)^dim: signed mode indices, physical
// wavenumbers k = 2*pi*m/L, |k|^2 tables and the 2/3-rule dealias mask.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sgfd/common.hpp"

namespace sgfd {

// Material parameters: alpha multiplies the -Delta part of the filtered
// velocity u - alpha*Delta u, mu is the viscosity. Both strictly positive.
struct SimParams {
  double alpha = 1.0;
  double mu = 1.0;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("SimParams: alpha must be > 0");
    if (!(mu > 0.0)) throw std::invalid_argument("SimParams: mu must be > 0");
  }
};

class Grid {
 public:
  Grid(int dim, int n_points, double box_length)
      : dim_(dim), n_(n_points), length_(box_length) {
    if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("Grid: dim must be 2 or 3");
    if (n_ < 8 || n_ % 2 != 0) throw std::invalid_argument("Grid: n_points must be even and >= 8");
    if (!(length_ > 0.0)) throw std::invalid_argument("Grid: box_length must be > 0");
    total_ = 1;
    for (int d = 0; d < dim_; ++d) total_ *= static_cast<std::size_t>(n_);
    mode_.resize(n_);
    wave_.resize(n_);
    const double dk = 2.0 * pi / length_;
    for (int i = 0; i < n_; ++i) {
      mode_[i] = (i <= n_ / 2) ? i : i - n_;
      wave_[i] = dk * mode_[i];
    }
    build_tables();
  }

  int dim() const { return dim_; }
  int n_points() const { return n_; }
  double box_length() const { return length_; }
  std::size_t total_modes() const { return total_; }
  double delta_k() const { return 2.0 * pi / length_; }
  double delta_x() const { return length_ / n_; }

  // signed integer mode and physical wavenumber along one axis
  int mode(int i) const { return mode_[i]; }
  double wavenumber(int i) const { return wave_[i]; }

  std::size_t flat(int i0, int i1, int i2 = 0) const {
    std::size_t idx = static_cast<std::size_t>(i0) * n_ + i1;
    if (dim_ == 3) idx = idx * n_ + i2;
    return idx;
  }

  // flat index of -k (axis index i maps to (n - i) % n)
  std::size_t conjugate_index(int i0, int i1, int i2 = 0) const {
    return flat((n_ - i0) % n_, (n_ - i1) % n_, dim_ == 3 ? (n_ - i2) % n_ : 0);
  }

  const dvec& k_squared() const { return ksq_; }
  const std::vector<std::uint8_t>& dealias_mask() const { return mask_; }

  // Largest |k_i| kept by the 2/3 rule, i.e. the dealias band per axis.
  double retained_band() const { return (2.0 / 3.0) * pi * n_ / length_; }

  // Count of retained integer modes per axis on each side of zero.
  int retained_mode_limit() const { return (n_ / 3 * 3 == n_) ? n_ / 3 - 1 : n_ / 3; }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }

  // Walk all modes with their axis indices; F(f, i0, i1, i2).
  template <class F>
  void for_each(F&& f) const {
    if (dim_ == 2) {
      std::size_t idx = 0;
      for (int i0 = 0; i0 < n_; ++i0)
        for (int i1 = 0; i1 < n_; ++i1, ++idx) f(idx, i0, i1, 0);
    } else {
      std::size_t idx = 0;
      for (int i0 = 0; i0 < n_; ++i0)
        for (int i1 = 0; i1 < n_; ++i1)
          for (int i2 = 0; i2 < n_; ++i2, ++idx) f(idx, i0, i1, i2);
    }
  }

 private:
  void build_tables() {
    ksq_.resize(total_);
    mask_.resize(total_);
    // retain iff |m_i| < n/3 along every axis, which is |k_i| < (2/3)*pi*n/L
    for_each([&](std::size_t idx, int i0, int i1, int i2) {
      const double k0 = wave_[i0], k1 = wave_[i1], k2 = (dim_ == 3) ? wave_[i2] : 0.0;
      ksq_[idx] = k0 * k0 + k1 * k1 + k2 * k2;
      const int m0 = std::abs(mode_[i0]), m1 = std::abs(mode_[i1]);
      const int m2 = (dim_ == 3) ? std::abs(mode_[i2]) : 0;
      mask_[idx] = (3 * m0 < n_ && 3 * m1 < n_ && 3 * m2 < n_) ? 1 : 0;
    });
  }

  int dim_;
  int n_;
  double length_;
  std::size_t total_;
  std::vector<int> mode_;
  std::vector<double> wave_;
  dvec ksq_;
  std::vector<std::uint8_t> mask_;
};

}  // namespace sgfd
