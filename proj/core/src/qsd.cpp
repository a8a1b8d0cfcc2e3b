#include "lqsd/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lqsd/errors.hpp"
#include "lqsd/numerics.hpp"

namespace lqsd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_qsd_range(const SpectralData& spectral, double lambda) {
  if (!(spectral.lambda0() > 0.0)) {
    throw DomainError("no quasi-stationary distribution exists: lambda0 = 0 (psi'(0) <= 0)");
  }
  if (!(lambda > 0.0) || !(lambda <= spectral.lambda0())) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda = " << lambda << " is outside (0, lambda0] with lambda0 = "
       << spectral.lambda0()
       << "; quasi-stationary distributions exist exactly for 0 < lambda <= lambda0";
    throw DomainError(os.str());
  }
}

}  // namespace

QsdDensity::QsdDensity(double lambda, ScaleGrid grid, ExponentialTail tail)
    : lambda_(lambda), grid_(std::move(grid)), tail_(tail) {
  const std::size_t n = grid_.size();
  const double h = grid_.h();
  cdf_table_.assign(n, 0.0);
  numerics::CompensatedSum acc;
  for (std::size_t i = 1; i < n; ++i) {
    acc.add(0.5 * h * lambda_ * (grid_[i - 1] + grid_[i]));
    cdf_table_[i] = acc.value();
  }
  tail_mass_ = lambda_ * tail_.integral_from(grid_.x_max(), 0.0);
}

double QsdDensity::density(double x) const {
  if (x < 0.0) return 0.0;
  if (x <= grid_.x_max()) return lambda_ * grid_.value_at(x);
  return lambda_ * tail_(x);
}

double QsdDensity::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= grid_.x_max()) {
    return table_mass() + tail_mass_ - lambda_ * tail_.integral_from(x, 0.0);
  }
  const double pos = x / grid_.h();
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= cdf_table_.size()) return cdf_table_.back();
  const double t = pos - static_cast<double>(i);
  return cdf_table_[i] + t * (cdf_table_[i + 1] - cdf_table_[i]);
}

double QsdDensity::sample(RandomStream& rng) const {
  const double u = rng.uniform();
  if (u >= table_mass()) return sample_tail(rng);
  const auto it = std::upper_bound(cdf_table_.begin(), cdf_table_.end(), u);
  const auto i = static_cast<std::size_t>(it - cdf_table_.begin()) - 1;
  const double width = cdf_table_[i + 1] - cdf_table_[i];
  const double t = width > 0.0 ? (u - cdf_table_[i]) / width : 0.0;
  return (static_cast<double>(i) + t) * grid_.h();
}

double QsdDensity::sample_tail(RandomStream& rng) const {
  // Beyond x_max the density is (s x + c) e^{rate x}: with y = x - x_max it is a
  // mixture of Exp(a) and Gamma(2, a), a = -rate.
  const double x0 = grid_.x_max();
  const double a = -tail_.rate;
  const double w_exp = (tail_.slope * x0 + tail_.intercept) / a;
  const double w_gamma = tail_.slope / (a * a);
  double y = rng.exponential(a);
  if (w_gamma > 0.0 && rng.uniform() * (w_exp + w_gamma) >= w_exp) y += rng.exponential(a);
  return x0 + y;
}

QsdDensity build_qsd(const SpectralData& spectral, double lambda, GridSpec grid) {
  require_qsd_range(spectral, lambda);
  ScaleGrid table = scale_grid(spectral, -lambda, grid);
  const ExponentialTail tail = scale_tail(spectral, -lambda);
  QsdDensity qsd(lambda, std::move(table), tail);
  if (std::abs(qsd.mass() - 1.0) > kQsdMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "build_qsd: total mass " << qsd.mass() << " differs from 1 by more than "
       << kQsdMassTolerance << " (grid too coarse or x_max too short)";
    throw ToleranceError(os.str());
  }
  return qsd;
}

double qsd_laplace(const LevyModel& model, double lambda, double beta) {
  require_qsd_range(compute_spectral(model), lambda);
  if (!(beta >= 0.0)) throw DomainError("qsd_laplace: beta must be non-negative");
  return lambda / (psi(model, beta).value() + lambda);
}

std::vector<double> qsd_sample(const QsdDensity& qsd, std::size_t n, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, StreamDomain::kQsdSample, i);
    out.push_back(qsd.sample(rng));
  }
  return out;
}

OrderVerdict order_check(const LevyModel& model, double lambda, double lambda_prime,
                         const std::vector<double>& beta_grid) {
  if (!(lambda > 0.0) || !(lambda <= lambda_prime)) {
    throw DomainError("order_check: need 0 < lambda <= lambda_prime");
  }
  OrderVerdict v;
  v.max_increment_scaled = -std::numeric_limits<double>::infinity();
  v.max_increment_plain = -std::numeric_limits<double>::infinity();
  double prev_scaled = 0.0;
  double prev_plain = 0.0;
  double tol = 0.0;
  for (std::size_t k = 0; k < beta_grid.size(); ++k) {
    const double beta = beta_grid[k];
    if (!(beta >= 0.0)) throw DomainError("order_check: beta grid must be non-negative");
    const double p = psi(model, beta).value();
    const double plain = (p + lambda_prime) / (p + lambda);
    const double scaled = (lambda / lambda_prime) * plain;
    tol = std::max(tol, 8.0 * kEps * std::max(1.0, std::abs(plain)));
    if (k > 0) {
      v.max_increment_scaled = std::max(v.max_increment_scaled, scaled - prev_scaled);
      v.max_increment_plain = std::max(v.max_increment_plain, plain - prev_plain);
    }
    prev_scaled = scaled;
    prev_plain = plain;
  }
  if (beta_grid.size() < 2) {
    v.max_increment_scaled = 0.0;
    v.max_increment_plain = 0.0;
  }
  v.pass = v.max_increment_scaled <= tol && v.max_increment_plain <= tol;
  return v;
}

std::vector<LambdaScanRow> lambda_scan(const SpectralData& spectral,
                                       const std::vector<double>& lambdas, GridSpec grid) {
  std::vector<LambdaScanRow> rows;
  rows.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw DomainError("lambda_scan: lambda values must be positive");
    const ScaleGrid w = scale_grid(spectral, -lambda, grid);
    LambdaScanRow row{lambda, 0.0, 0.0, false, w.method()};
    row.min_scale = *std::min_element(w.values().begin(), w.values().end());
    double integral = w.weighted_integral(0.0);
    if (lambda <= spectral.lambda0()) {
      integral += scale_tail(spectral, -lambda).integral_from(w.x_max(), 0.0);
      row.tail_included = true;
    }
    row.mass = lambda * integral;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lqsd
