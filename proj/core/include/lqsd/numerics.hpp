#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace lqsd::numerics {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// sinh(sqrt(u))/sqrt(u), continued analytically to u < 0 as sin(sqrt(-u))/sqrt(-u).
double sinhc_sqrt(double u);

/// cosh(sqrt(u)), continued to u < 0 as cos(sqrt(-u)).
double cosh_sqrt(double u);

struct RootOptions {
  double abs_tol = 1e-13;
  int max_bisection = 200;
  int max_newton = 50;
};

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs (zero counts
/// as either). Plain bisection; throws ConvergenceError if the signs agree.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              const RootOptions& opts = {});

/// Newton iteration safeguarded by a bracket [lo, hi] with a sign change.
/// Falls back to bisection whenever a Newton step leaves the bracket or fails
/// to halve the residual.
double newton_bracketed(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo,
                        double hi, const RootOptions& opts = {});

}  // namespace lqsd::numerics
