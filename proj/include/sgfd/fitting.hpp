// Log-log decay fits. Exponents are always measured against log(t + 1) so
// that algebraic laws C (t+1)^p come out exact and early times stay usable.
#pragma once

#include <cmath>
#include <vector>

#include "sgfd/common.hpp"

namespace sgfd {

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

struct FitResult {
  double exponent = 0.0;   // slope in log(value) vs log(t + 1)
  double intercept = 0.0;  // log C at t + 1 = 1
  double r_squared = 1.0;
  FitWindow window;
  int n_samples = 0;
  bool well_conditioned = true;  // r_squared >= 0.99
};

inline FitResult fit_decay_exponent(const std::vector<double>& times,
                                    const std::vector<double>& values, FitWindow window,
                                    int min_samples = 10) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_decay_exponent: times/values length mismatch");
  if (!(window.t_hi > window.t_lo))
    throw std::invalid_argument("fit_decay_exponent: empty window");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.t_lo || times[i] > window.t_hi) continue;
    if (!(values[i] > 0.0))
      throw std::invalid_argument("fit_decay_exponent: nonpositive value inside the window");
    x.push_back(std::log(times[i] + 1.0));
    y.push_back(std::log(values[i]));
  }
  if (static_cast<int>(x.size()) < min_samples)
    throw std::invalid_argument("fit_decay_exponent: fewer than " + std::to_string(min_samples) +
                                " samples in the window");
  const LineFit f = fit_line(x, y);
  FitResult out;
  out.exponent = f.slope;
  out.intercept = f.intercept;
  out.r_squared = f.r_squared;
  out.window = window;
  out.n_samples = static_cast<int>(x.size());
  out.well_conditioned = f.r_squared >= 0.99;
  return out;
}

}  // namespace sgfd
