#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace psun {

// Adaptive Simpson integration on a finite interval. Tolerance is absolute;
// recursion splits until the Richardson error estimate is below tol or hits
// the rounding floor of the local panel values.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
  struct Impl {
    const F& f;
    int max_depth;
    double run(double a, double fa, double b, double fb, double m, double fm, double whole,
               double tol, int depth) const {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      // Below ~3e4 ulps of the panel values the refinement estimate is
      // dominated by evaluation-point rounding noise, which shrinks at the
      // same rate as the halving tolerance; stop there.
      const double floor_tol =
          3.0e4 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
      if (depth >= max_depth || std::abs(delta) <= std::max(15.0 * tol, floor_tol)) {
        return left + right + delta / 15.0;
      }
      return run(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
             run(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
    }
  };
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate_adaptive: requires a <= b");
  }
  const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Impl{f, max_depth}.run(a, fa, b, fb, m, fm, whole, tol, 0);
}

}  // namespace psun
