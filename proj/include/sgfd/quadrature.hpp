// Adaptive one dimensional quadrature: 15-point Gauss-Kronrod panels with
// worst-panel-first refinement, plus an octave descent for integrals down
// to zero whose integrand behaves like an (integrable) power there.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgfd/common.hpp"

namespace sgfd {
namespace quad {

// QUADPACK dqk15 nodes and weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

template <class F>
Panel gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kron *= h;
  gauss *= h;
  // QUADPACK's sharpened error estimate is overkill here; the plain
  // |K15 - G7| difference is conservative enough for our smooth panels.
  return Panel{a, b, kron, std::abs(kron - gauss)};
}

// Refine the worst panel until the summed error estimate is below
// max(rel_tol * |integral|, abs_floor).
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol = 1e-10, double abs_floor = 1e-300,
                int max_panels = 4000) {
  if (!(b > a)) return 0.0;
  std::vector<Panel> panels{gk15(f, a, b)};
  for (int iter = 0; iter < max_panels; ++iter) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    if (err <= std::max(rel_tol * std::abs(total), abs_floor)) return total;
    const Panel w = panels[worst];
    const double mid = 0.5 * (w.a + w.b);
    if (!(mid > w.a && mid < w.b)) return total;  // interval exhausted
    panels[worst] = gk15(f, w.a, mid);
    panels.push_back(gk15(f, mid, w.b));
  }
  throw NumericalError("quadrature: panel budget exhausted");
}

// integral_0^b f, where f may have an integrable power behavior at 0.
// Octaves [b/2^{j+1}, b/2^j] are summed until the geometric tail estimate
// drops below tolerance.
template <class F>
double to_zero(F&& f, double b, double rel_tol = 1e-10) {
  if (!(b > 0.0)) return 0.0;
  double total = 0.0, prev = 0.0;
  double hi = b;
  for (int j = 0; j < 900 && hi > 1e-280; ++j) {
    const double part = std::abs(adaptive(f, 0.5 * hi, hi, 0.25 * rel_tol));
    total += part;
    if (j >= 4 && prev > 0.0 && part < prev) {
      // descending regime: bound the remaining octaves geometrically
      const double ratio = std::min(part / prev, 0.97);
      if (part * ratio / (1.0 - ratio) <= rel_tol * std::max(total, 1e-300)) return total;
    }
    // support bounded away from zero (or an all-zero integrand)
    if (part == 0.0 && ((total != 0.0 && j >= 8) || j >= 60)) return total;
    if (part > 0.0) prev = part;
    hi *= 0.5;
  }
  return total;
}

}  // namespace quad
}  // namespace sgfd
