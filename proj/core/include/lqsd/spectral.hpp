#pragma once

#include "lqsd/levy_model.hpp"

namespace lqsd {

/// Spectral summary of a model: theta0 (location of the minimum of psi on the
/// negative half-axis), lambda0 = -psi(-theta0) and the right inverse Phi.
///
/// `argmin` is the minimiser of psi over (-r, inf); it equals -theta0 when
/// psi'(0) > 0 and is >= 0 otherwise (then theta0 = lambda0 = 0).
class SpectralData {
 public:
  explicit SpectralData(LevyModel model);

  [[nodiscard]] const LevyModel& model() const { return model_; }
  [[nodiscard]] double theta0() const { return theta0_; }
  [[nodiscard]] double lambda0() const { return lambda0_; }
  [[nodiscard]] double moment_boundary() const { return r_; }
  [[nodiscard]] double argmin() const { return argmin_; }
  /// min psi over (-r, inf).
  [[nodiscard]] double psi_min() const { return psi_min_; }

 private:
  LevyModel model_;
  double theta0_ = 0.0;
  double lambda0_ = 0.0;
  double r_ = 0.0;
  double argmin_ = 0.0;
  double psi_min_ = 0.0;
};

/// Validates the model and computes theta0, lambda0 (closed forms for the
/// Brownian and compound Poisson families, bracketed root search otherwise).
SpectralData compute_spectral(const LevyModel& model);

/// Right inverse for q >= 0: the largest beta >= 0 with psi(beta) = q.
double phi(const SpectralData& spectral, double q);

/// The increasing root branch of psi(beta) = q on (-lambda0, inf); extends
/// phi continuously below 0. Accepts q == -lambda0 (returns -theta0). When
/// lambda0 = 0 the domain is q >= 0. Throws DomainError otherwise.
double phi_extended(const SpectralData& spectral, double q);

/// 1 / psi'(phi_extended(q)); +inf at q = -lambda0.
double phi_prime(const SpectralData& spectral, double q);

}  // namespace lqsd
