#include "lqsd/spectral.hpp"

#include <cmath>
#include <limits>

#include "lqsd/errors.hpp"
#include "lqsd/numerics.hpp"

namespace lqsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double psi_finite(const LevyModel& model, double beta) { return psi(model, beta).value(); }

// Minimiser of psi over (-r, inf) for the meromorphic family: unique root of
// the increasing function psi'.
double meromorphic_argmin(const LevyModel& model) {
  const double r = model.moment_boundary();
  const auto d1 = [&](double b) { return psi_derivative(model, b, 1); };
  const auto d2 = [&](double b) { return psi_derivative(model, b, 2); };
  const double lo = -r + 1e-12 * r;
  double hi = 0.0;
  if (d1(hi) == 0.0) return 0.0;
  if (d1(hi) < 0.0) {
    hi = 1.0;
    for (int i = 0; i < 200 && d1(hi) < 0.0; ++i) hi *= 2.0;
  }
  return numerics::newton_bracketed(d1, d2, lo, hi);
}

double increasing_branch_root(const SpectralData& s, double q, double lower) {
  const LevyModel& model = s.model();
  const auto f = [&](double b) { return psi_finite(model, b) - q; };
  const auto df = [&](double b) { return psi_derivative(model, b, 1); };
  double hi = std::max(1.0, lower + 1.0);
  for (int i = 0; i < 1100 && f(hi) <= 0.0; ++i) hi *= 2.0;
  if (s.lambda0() > 0.0 && std::abs(q + s.lambda0()) < 1e-6 * s.lambda0()) {
    // Double root at -theta0: Newton stalls, bisect on [-theta0, 0].
    return numerics::bisect(f, lower, std::min(hi, 0.0));
  }
  return numerics::newton_bracketed(f, df, lower, hi);
}

}  // namespace

SpectralData::SpectralData(LevyModel model) : model_(std::move(model)) {
  const ValidationReport report = validate(model_);
  r_ = report.moment_boundary;
  const double slope0 = report.psi_prime_at_zero;

  switch (model_.family()) {
    case Family::kBMDrift: {
      const auto& m = std::get<BMDrift>(model_.variant());
      argmin_ = -m.mu / (m.sigma * m.sigma);
      psi_min_ = -m.mu * m.mu / (2.0 * m.sigma * m.sigma);
      break;
    }
    case Family::kCPExpDrift: {
      const auto& m = std::get<CPExpDrift>(model_.variant());
      argmin_ = std::sqrt(m.c * m.rho / m.mu) - m.rho;
      const double gap = std::sqrt(m.mu * m.rho) - std::sqrt(m.c);
      psi_min_ = -gap * gap;
      break;
    }
    case Family::kMeromorphic: {
      argmin_ = meromorphic_argmin(model_);
      psi_min_ = psi_finite(model_, argmin_);
      break;
    }
  }

  if (slope0 > 0.0) {
    theta0_ = -argmin_;
    lambda0_ = -psi_min_;
    if (model_.family() == Family::kMeromorphic) lambda0_ = -psi_finite(model_, -theta0_);
  } else {
    theta0_ = 0.0;
    lambda0_ = 0.0;
  }
}

SpectralData compute_spectral(const LevyModel& model) { return SpectralData(model); }

double phi(const SpectralData& spectral, double q) {
  if (!(q >= 0.0)) throw DomainError("phi: q must be non-negative");
  if (q == 0.0 && spectral.argmin() <= 0.0) return 0.0;
  return phi_extended(spectral, q);
}

double phi_extended(const SpectralData& spectral, double q) {
  const double lambda0 = spectral.lambda0();
  if (!std::isfinite(q)) throw DomainError("phi_extended: q must be finite");
  if (lambda0 > 0.0 ? q < -lambda0 : q < 0.0) {
    throw DomainError("phi_extended: q must exceed -lambda0");
  }
  if (lambda0 > 0.0 && q == -lambda0) return -spectral.theta0();
  if (q == 0.0 && spectral.argmin() <= 0.0) return 0.0;

  const LevyModel& model = spectral.model();
  switch (model.family()) {
    case Family::kBMDrift: {
      const auto& m = std::get<BMDrift>(model.variant());
      const double s2 = m.sigma * m.sigma;
      const double root = std::sqrt(std::max(0.0, m.mu * m.mu + 2.0 * q * s2));
      if (m.mu > 0.0) return 2.0 * q / (root + m.mu);
      return (root - m.mu) / s2;
    }
    case Family::kCPExpDrift: {
      const auto& m = std::get<CPExpDrift>(model.variant());
      const double gamma = m.mu * m.rho - m.c - q;
      const double disc = std::max(0.0, gamma * gamma + 4.0 * m.mu * m.rho * q);
      const double root = std::sqrt(disc);
      if (gamma > 0.0) return 2.0 * m.rho * q / (gamma + root);
      return (-gamma + root) / (2.0 * m.mu);
    }
    case Family::kMeromorphic: {
      const double lower = q >= 0.0 ? std::max(0.0, spectral.argmin()) : spectral.argmin();
      return increasing_branch_root(spectral, q, lower);
    }
  }
  return 0.0;
}

double phi_prime(const SpectralData& spectral, double q) {
  if (spectral.lambda0() > 0.0 && q == -spectral.lambda0()) return kInf;
  const double beta = phi_extended(spectral, q);
  const double slope = psi_derivative(spectral.model(), beta, 1);
  if (!(slope > 0.0)) return kInf;
  return 1.0 / slope;
}

}  // namespace lqsd
