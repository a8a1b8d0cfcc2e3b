#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lqsd/rng.hpp"
#include "lqsd/scale.hpp"

namespace lqsd {

/// Quasi-stationary distribution nu_lambda(dx) = lambda W^(-lambda)(x) dx,
/// tabulated on [0, x_max] with an analytic tail beyond.
class QsdDensity {
 public:
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] const ScaleGrid& grid() const { return grid_; }
  [[nodiscard]] const ExponentialTail& scale_tail() const { return tail_; }

  /// lambda W^(-lambda)(x); uses the analytic tail beyond x_max.
  [[nodiscard]] double density(double x) const;
  /// P(X <= x) under the table plus tail.
  [[nodiscard]] double cdf(double x) const;

  [[nodiscard]] double table_mass() const { return cdf_table_.back(); }
  [[nodiscard]] double tail_mass() const { return tail_mass_; }
  [[nodiscard]] double mass() const { return table_mass() + tail_mass_; }
  [[nodiscard]] const std::vector<double>& cdf_table() const { return cdf_table_; }

  /// Inverse-CDF draw: linear interpolation on the table, exact sampling of
  /// the exponential(-polynomial) tail.
  [[nodiscard]] double sample(RandomStream& rng) const;

 private:
  friend QsdDensity build_qsd(const SpectralData&, double, GridSpec);
  QsdDensity(double lambda, ScaleGrid grid, ExponentialTail tail);

  [[nodiscard]] double sample_tail(RandomStream& rng) const;

  double lambda_;
  ScaleGrid grid_;
  ExponentialTail tail_;
  std::vector<double> cdf_table_;
  double tail_mass_ = 0.0;
};

/// Tolerance on |mass - 1| enforced by build_qsd.
inline constexpr double kQsdMassTolerance = 1e-5;

/// Builds nu_lambda for lambda in (0, lambda0]. The mass is checked against 1
/// (ToleranceError beyond kQsdMassTolerance) and never rescaled.
QsdDensity build_qsd(const SpectralData& spectral, double lambda, GridSpec grid = {});

/// Laplace transform lambda / (psi(beta) + lambda) of nu_lambda, beta >= 0.
double qsd_laplace(const LevyModel& model, double lambda, double beta);

/// n draws from nu_lambda; draw i uses substream (seed, i) of the sampling domain.
std::vector<double> qsd_sample(const QsdDensity& qsd, std::size_t n, std::uint64_t seed);

struct OrderVerdict {
  bool pass = true;
  /// max over the grid of R(beta_{k+1}) - R(beta_k) for each ratio (<= 0 when monotone).
  double max_increment_scaled = 0.0;  ///< (lambda/lambda') (psi + lambda')/(psi + lambda)
  double max_increment_plain = 0.0;   ///< (psi + lambda')/(psi + lambda)
};

/// Checks that both Laplace-ratio functions are non-increasing on beta_grid,
/// i.e. nu_lambda' precedes nu_lambda in both orders. Requires
/// 0 < lambda <= lambda_prime.
OrderVerdict order_check(const LevyModel& model, double lambda, double lambda_prime,
                         const std::vector<double>& beta_grid);

struct LambdaScanRow {
  double lambda;
  double min_scale;   ///< min over the grid of W^(-lambda)
  double mass;        ///< lambda * (grid integral + analytic tail when lambda <= lambda0)
  bool tail_included;
  ScaleMethod method;
};

/// Positivity and mass diagnostics over a list of lambdas on [0, grid.x_max].
std::vector<LambdaScanRow> lambda_scan(const SpectralData& spectral,
                                       const std::vector<double>& lambdas,
                                       GridSpec grid = {});

}  // namespace lqsd
