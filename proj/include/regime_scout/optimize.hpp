#pragma once

#include <cmath>
#include <utility>

namespace regime_scout::detail {

// Golden-section scan for a minimum over [lo, hi]; returns the best probe
// found (x, f(x)). `fn` may return +inf for infeasible points.
template <class Fn>
std::pair<double, double> golden_section(double lo, double hi, Fn&& fn, int iters = 32) {
  if (!(hi > lo)) return {lo, fn(lo)};
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  double best_x = f1 <= f2 ? x1 : x2;
  double best_f = f1 <= f2 ? f1 : f2;
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = fn(x2);
    }
    if (f1 < best_f) {
      best_f = f1;
      best_x = x1;
    }
    if (f2 < best_f) {
      best_f = f2;
      best_x = x2;
    }
  }
  return {best_x, best_f};
}

}  // namespace regime_scout::detail
