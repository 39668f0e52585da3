#pragma once

#include <cmath>

namespace shom {

struct LineMaximum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [a, b], stopping
/// once the bracket is narrower than abs_tol. The bracket endpoints are
/// compared against the interior result, so a maximum sitting on the boundary
/// is returned exactly. Ties go to the smaller abscissa.
template <typename F>
LineMaximum golden_section_maximize(F&& f, double a, double b, double abs_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double lo = a;
  const double hi = b;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > abs_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  LineMaximum best = fc >= fd ? LineMaximum{c, fc} : LineMaximum{d, fd};
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_hi > best.value) best = {hi, f_hi};
  if (f_lo >= best.value) best = {lo, f_lo};
  return best;
}

}  // namespace shom
