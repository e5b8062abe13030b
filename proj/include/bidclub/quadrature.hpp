#pragma once

#include <cmath>

namespace bidclub {

namespace detail {

template <typename Fn>
double simpson_refine(Fn& f, double a, double b, double fa, double fm, double fb, double whole,
                      double tolerance, int depth, int forced_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Accepting at |delta| <= tolerance (rather than the textbook 15x) keeps
  // integrands with an unbounded derivative at an endpoint inside budget.
  if (depth <= 0 || (forced_depth <= 0 && std::abs(delta) <= tolerance)) {
    return left + right + delta / 15.0;
  }
  return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tolerance, depth - 1, forced_depth - 1) +
         simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tolerance, depth - 1, forced_depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to an absolute tolerance.
template <typename Fn>
double adaptive_simpson(Fn&& f, double a, double b, double tolerance = 1e-10,
                        int max_depth = 60) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_refine(f, a, b, fa, fm, fb, whole, tolerance, max_depth, 3);
}

}  // namespace bidclub
