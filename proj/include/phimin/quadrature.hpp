#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phimin/error.hpp"

namespace phimin::quad {

/// Adaptive Gauss-Kronrod on a finite interval. Throws NonFinite if the
/// integrand produces NaN/inf anywhere the rule samples it.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 10) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, tol, &err);
  if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "integrand is not finite on the interval");
  return v;
}

/// Outcome of integrating a non-negative integrand over [a, +inf).
struct TailResult {
  double value = 0.0;      ///< partial sum plus geometric tail estimate (inf if divergent)
  bool converged = false;
  int panels = 0;
  double last_ratio = 0.0; ///< ratio of the last two panel contributions
};

/// Integrates a non-negative f over [a, inf) panel by panel with doubling
/// widths. A run of panels whose contributions stop shrinking is read as
/// divergence; a geometric decay below `tail_tol` is read as convergence and
/// the remaining tail is summed as a geometric series.
template <class F>
TailResult integrate_tail(F&& f, double a, double first_width = 1.0, double tail_tol = 1e-10,
                          double tol = 1e-12, int max_panels = 1100) {
  TailResult r;
  double lo = a;
  double width = first_width;
  double prev = -1.0;
  int flat_run = 0;
  for (int k = 0; k < max_panels; ++k) {
    const double hi = lo + width;
    if (!std::isfinite(hi)) break;
    double c = 0.0;
    try {
      c = integrate(f, lo, hi, tol);
    } catch (const Error&) {
      break;  // integrand overflowed: decide from what has been seen
    }
    c = std::abs(c);
    r.value += c;
    r.panels = k + 1;
    if (prev > 0.0) {
      r.last_ratio = c / prev;
      if (r.last_ratio >= 0.999)
        ++flat_run;
      else
        flat_run = 0;
      if (flat_run >= 12 || r.value > 1e300) {
        r.value = std::numeric_limits<double>::infinity();
        r.converged = false;
        return r;
      }
      if (r.last_ratio < 0.999) {
        const double tail = c * r.last_ratio / (1.0 - r.last_ratio);
        if (tail < tail_tol * std::max(1.0, r.value) && c < tail_tol * std::max(1.0, r.value)) {
          r.value += tail;
          r.converged = true;
          return r;
        }
      }
    } else if (c == 0.0 && k > 2) {
      r.converged = true;
      return r;
    }
    prev = c > 0.0 ? c : prev;
    if (c == 0.0 && prev > 0.0) {
      r.converged = true;
      return r;
    }
    lo = hi;
    width *= 2.0;
  }
  // Ran out of panels or range without a clear verdict: the contributions
  // were still shrinking, so report convergence only if the last ratio
  // indicates summable decay.
  r.converged = r.last_ratio < 0.999 && r.last_ratio > 0.0;
  if (!r.converged) r.value = std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace phimin::quad
