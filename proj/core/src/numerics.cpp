#include "lqsd/numerics.hpp"

#include <string>

#include "lqsd/errors.hpp"

namespace lqsd::numerics {

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double sinhc_sqrt(double u) {
  if (std::abs(u) < 1e-4) {
    // Taylor series in u; truncation below 1e-22 for |u| < 1e-4.
    return 1.0 + u / 6.0 * (1.0 + u / 20.0 * (1.0 + u / 42.0 * (1.0 + u / 72.0)));
  }
  if (u > 0.0) {
    const double s = std::sqrt(u);
    return std::sinh(s) / s;
  }
  const double s = std::sqrt(-u);
  return std::sin(s) / s;
}

double cosh_sqrt(double u) {
  if (u >= 0.0) return std::cosh(std::sqrt(u));
  return std::cos(std::sqrt(-u));
}

namespace {

bool opposite_or_zero(double a, double b) {
  return a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0);
}

}  // namespace

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const RootOptions& opts) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!opposite_or_zero(flo, fhi)) {
    throw ConvergenceError("bisect: no sign change on [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int i = 0; i < opts.max_bisection && hi - lo > opts.abs_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double newton_bracketed(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo,
                        double hi, const RootOptions& opts) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!opposite_or_zero(flo, fhi)) {
    throw ConvergenceError("newton_bracketed: no sign change on [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  double x = 0.5 * (lo + hi);
  double fx = f(x);
  int newton_steps = 0;
  int bisection_steps = 0;
  while (newton_steps < opts.max_newton && bisection_steps < opts.max_bisection) {
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = x - fx / d;
    bool newton_ok = std::isfinite(next) && next > lo && next < hi;
    if (newton_ok) {
      ++newton_steps;
      const double step = std::abs(next - x);
      const double fn = f(next);
      if (std::abs(fn) > 0.5 * std::abs(fx) && step > opts.abs_tol) {
        // Slow progress (near a double root): take a bisection step too.
        if ((fn < 0.0) == (flo < 0.0)) {
          lo = next;
          flo = fn;
        } else {
          hi = next;
        }
        next = 0.5 * (lo + hi);
        ++bisection_steps;
        x = next;
        fx = f(x);
        continue;
      }
      x = next;
      fx = fn;
      if (step <= opts.abs_tol) return x;
    } else {
      ++bisection_steps;
      x = 0.5 * (lo + hi);
      fx = f(x);
    }
    if (hi - lo <= opts.abs_tol) return x;
  }
  return x;
}

}  // namespace lqsd::numerics
