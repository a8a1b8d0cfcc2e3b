#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lqsd/spectral.hpp"

namespace lqsd {

enum class ScaleMethod { kClosedForm, kSeries, kRenewal };

std::string to_string(ScaleMethod m);

/// Uniform grid 0 = x_0 < ... < x_N = x_max with step h.
struct GridSpec {
  double h = 1e-3;
  double x_max = 50.0;

  [[nodiscard]] std::size_t intervals() const;
};

/// Tabulated W^(q) on a uniform grid. Values at x_i = i h; W^(q)(0) is the
/// right limit. Immutable once built.
class ScaleGrid {
 public:
  ScaleGrid(double q, GridSpec grid, std::vector<double> values, ScaleMethod method,
            double err_estimate);

  [[nodiscard]] double q() const { return q_; }
  [[nodiscard]] double h() const { return grid_.h; }
  [[nodiscard]] double x_max() const { return grid_.x_max; }
  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] ScaleMethod method() const { return method_; }
  [[nodiscard]] double err_estimate() const { return err_estimate_; }

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double x(std::size_t i) const { return static_cast<double>(i) * grid_.h; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

  /// Linear interpolation; 0 for x < 0, clamps to the last node beyond x_max.
  [[nodiscard]] double value_at(double x) const;

  /// max_i |a_i - b_i| over the common prefix of the two grids (same h).
  [[nodiscard]] double sup_distance(const ScaleGrid& other) const;

  /// Trapezoid integral of e^{-beta x} W(x) over [0, x_max].
  [[nodiscard]] double weighted_integral(double beta) const;

 private:
  double q_;
  GridSpec grid_;
  std::vector<double> values_;
  ScaleMethod method_;
  double err_estimate_;
};

/// Closed-form evaluator for W^(q), constructed once per q.
///
/// Brownian and compound Poisson families accept every real q (below the
/// degenerate point the hyperbolic functions turn trigonometric). The
/// meromorphic family needs q >= -lambda0; within 1e-8 of -lambda0 the
/// double-root form is used.
class ClosedFormScale {
 public:
  ClosedFormScale(const SpectralData& spectral, double q);

  [[nodiscard]] double q() const { return q_; }
  [[nodiscard]] double operator()(double x) const;

  /// Drops meromorphic root terms with e^{-zeta x_min}/|psi'(-zeta)| < 1e-14.
  void truncate_for(double x_min);

 private:
  struct Term {
    double rate;       // exponent
    double slope;      // coefficient of x
    double intercept;  // constant coefficient
  };

  LevyModel model_;
  double q_;
  std::vector<Term> terms_;  // meromorphic only
};

double scale_closed_form(const SpectralData& spectral, double q, double x);
double scale_closed_form(const LevyModel& model, double q, double x);

/// True when scale_closed_form accepts q for this model.
bool has_closed_form(const SpectralData& spectral, double q);

ScaleGrid scale_grid_closed_form(const SpectralData& spectral, double q, GridSpec grid = {});

/// Convolution series sum_k q^k W^{*(k+1)} with trapezoid convolutions.
/// Throws ConvergenceError if the terms have not become negligible by k = 200.
ScaleGrid scale_series(const SpectralData& spectral, double q, GridSpec grid = {});

/// Solves f = W^(r) + (q - r) W^(r) * f by forward substitution (trapezoid).
/// Requires r >= 0; throws ConvergenceError when the diagonal weight vanishes.
ScaleGrid scale_renewal(const SpectralData& spectral, double q, double r,
                        GridSpec grid = {});

/// Closed form where available, otherwise renewal from r = 0.
ScaleGrid scale_grid(const SpectralData& spectral, double q, GridSpec grid = {});

/// Roots zeta_i(q) > 0 of psi(-zeta) = q for the meromorphic family, sorted.
/// One root per atom interval; an additional root beyond the last atom when
/// sigma > 0. Valid for q >= -lambda0 (zeta_1 = theta0 at equality).
std::vector<double> meromorphic_roots(const SpectralData& spectral, double q);

/// Asymptotic form W^(q)(x) ~ (slope x + intercept) e^{rate x} for large x:
/// Phi'(q) e^{Phi(q) x} in general, the double-root form at q = -lambda0.
struct ExponentialTail {
  double rate = 0.0;
  double slope = 0.0;
  double intercept = 0.0;

  [[nodiscard]] double operator()(double x) const;
  /// int_{x0}^inf e^{-beta x} tail(x) dx; requires beta > rate.
  [[nodiscard]] double integral_from(double x0, double beta) const;
};

ExponentialTail scale_tail(const SpectralData& spectral, double q);

/// |trapezoid int e^{-beta x} W + analytic tail - 1/(psi(beta) - q)|.
double laplace_residual(const SpectralData& spectral, const ScaleGrid& grid, double beta);

/// u^(q)(x, y) = e^{-x Phi(q)} W^(q)(y) - W^(q)(y - x) for q >= 0.
double potential_density(const SpectralData& spectral, double q, double x, double y);

/// e^{-Phi(-lambda) x} W^(-lambda)(x) for lambda in (0, lambda0].
double w_phi(const SpectralData& spectral, double lambda, double x);

/// int_0^inf e^{-Phi(-r) x} W^(-lambda)(x) dx from a grid for q = -lambda
/// plus the analytic tail. Should equal 1/(lambda - r) for 0 <= r < lambda.
double tilted_integral(const SpectralData& spectral, const ScaleGrid& grid, double r);

}  // namespace lqsd
