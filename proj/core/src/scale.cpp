#include "lqsd/scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqsd/errors.hpp"
#include "lqsd/numerics.hpp"

namespace lqsd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kDegenerateWindow = 1e-8;
constexpr int kMaxSeriesTerms = 200;

double psi_finite(const LevyModel& model, double beta) { return psi(model, beta).value(); }

// W^(q) for X_t = -mu t + sigma B_t:
//   2 e^{-mu x/s2} sinh(x sqrt(D)/s2)/sqrt(D),  D = mu^2 + 2 q s2.
double bm_scale(const BMDrift& m, double q, double x) {
  const double s2 = m.sigma * m.sigma;
  const double disc = m.mu * m.mu + 2.0 * q * s2;
  const double u = disc * x * x / (s2 * s2);
  if (u > 1.0) {
    const double root = std::sqrt(disc);
    return (std::exp((root - m.mu) * x / s2) - std::exp((-root - m.mu) * x / s2)) / root;
  }
  return 2.0 * std::exp(-m.mu * x / s2) * (x / s2) * numerics::sinhc_sqrt(u);
}

// W^(q) for drift -mu plus Exp(rho) jumps at rate c:
//   e^{-g x/(2mu)} ((2rho - g/mu) sinh(sqrt(D) x/(2mu))/sqrt(D) + cosh(sqrt(D) x/(2mu))/mu)
// with g = mu rho - c - q and D = g^2 + 4 mu rho q.
double cp_scale(const CPExpDrift& m, double q, double x) {
  const double g = m.mu * m.rho - m.c - q;
  const double disc = g * g + 4.0 * m.mu * m.rho * q;
  const double half = x / (2.0 * m.mu);
  const double u = disc * half * half;
  if (u > 1.0) {
    const double root = std::sqrt(disc);
    // Roots (-g +- root)/(2mu), each in its cancellation-free form.
    double up;
    double down;
    if (g > 0.0) {
      up = 2.0 * m.rho * q / (g + root);
      down = (-g - root) / (2.0 * m.mu);
    } else {
      up = (-g + root) / (2.0 * m.mu);
      down = -2.0 * m.rho * q / (-g + root);
    }
    return ((up + m.rho) * std::exp(up * x) - (down + m.rho) * std::exp(down * x)) / root;
  }
  const double envelope = std::exp(-g * half);
  return envelope * ((2.0 * m.rho - g / m.mu) * half * numerics::sinhc_sqrt(u) +
                     numerics::cosh_sqrt(u) / m.mu);
}

// Point just inside (pole, pole + gap) or (pole - gap, pole) where f has the
// wanted sign; the pole term dominates close enough to the pole.
double approach_pole(const std::function<double(double)>& f, double pole, double gap,
                     double direction, bool want_positive) {
  double step = gap;
  for (int k = 0; k < 1000; ++k) {
    step *= 0.5;
    const double b = pole + direction * step;
    if (b == pole) break;
    const double v = f(b);
    if (want_positive ? v > 0.0 : v < 0.0) return b;
  }
  throw ConvergenceError("meromorphic_roots: could not bracket near pole");
}

double trapezoid_weighted(const std::vector<double>& values, double h, double beta) {
  numerics::CompensatedSum s;
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s.add(w * values[i] * std::exp(-beta * static_cast<double>(i) * h));
  }
  return h * s.value();
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Trapezoid convolution (f * g)(x_n) on the grid, for every n.
std::vector<double> convolve(const std::vector<double>& f, const std::vector<double>& g,
                             double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.5 * (f[i] * g[0] + f[0] * g[i]);
    for (std::size_t j = 1; j < i; ++j) acc += f[i - j] * g[j];
    out[i] = h * acc;
  }
  return out;
}

struct SeriesResult {
  std::vector<double> values;
  double truncation = 0.0;
};

SeriesResult series_values(const std::vector<double>& base, double q, double h) {
  SeriesResult res;
  res.values = base;
  if (q == 0.0) return res;
  std::vector<double> term = base;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    term = convolve(term, base, h);
    for (double& t : term) t *= q;
    for (std::size_t i = 0; i < term.size(); ++i) res.values[i] += term[i];
    const double tn = sup_norm(term);
    if (tn < 1e-10 * sup_norm(res.values)) {
      res.truncation = tn;
      return res;
    }
  }
  throw ConvergenceError(
      "scale_series: terms did not decay within 200 convolutions (grid too long or "
      "|q| too large)");
}

std::vector<double> renewal_values(const std::vector<double>& base, double k, double h) {
  const std::size_t n = base.size();
  std::vector<double> f(n, 0.0);
  if (n == 0) return f;
  const double diag = 1.0 - k * 0.5 * h * base[0];
  if (std::abs(diag) < 1e-8) {
    throw ConvergenceError("scale_renewal: diagonal weight vanishes; reduce the step");
  }
  f[0] = base[0];
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.5 * base[i] * f[0];
    for (std::size_t j = 1; j < i; ++j) acc += base[i - j] * f[j];
    f[i] = (base[i] + k * h * acc) / diag;
  }
  return f;
}

std::vector<double> every_other(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size() / 2 + 1);
  for (std::size_t i = 0; i < v.size(); i += 2) out.push_back(v[i]);
  return out;
}

// Richardson-style estimate of the O(h^2) quadrature error from a 2h solve.
double richardson(const std::vector<double>& fine, const std::vector<double>& coarse) {
  double m = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    m = std::max(m, std::abs(fine[2 * i] - coarse[i]));
  }
  return m / 3.0;
}

std::vector<double> closed_form_values(const SpectralData& spectral, double q,
                                       const GridSpec& grid) {
  ClosedFormScale w(spectral, q);
  w.truncate_for(grid.h);
  const std::size_t n = grid.intervals() + 1;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = w(static_cast<double>(i) * grid.h);
  return values;
}

}  // namespace

std::string to_string(ScaleMethod m) {
  switch (m) {
    case ScaleMethod::kClosedForm: return "closed_form";
    case ScaleMethod::kSeries: return "series";
    case ScaleMethod::kRenewal: return "renewal";
  }
  return "unknown";
}

std::size_t GridSpec::intervals() const {
  if (!(h > 0.0) || !(x_max > 0.0)) throw DomainError("GridSpec: h and x_max must be positive");
  return static_cast<std::size_t>(std::llround(x_max / h));
}

ScaleGrid::ScaleGrid(double q, GridSpec grid, std::vector<double> values,
                     ScaleMethod method, double err_estimate)
    : q_(q), grid_(grid), values_(std::move(values)), method_(method),
      err_estimate_(err_estimate) {}

double ScaleGrid::value_at(double x) const {
  if (x < 0.0 || values_.empty()) return 0.0;
  const double pos = x / grid_.h;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values_.size()) return values_.back();
  const double t = pos - static_cast<double>(i);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

double ScaleGrid::sup_distance(const ScaleGrid& other) const {
  const std::size_t n = std::min(size(), other.size());
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(values_[i] - other.values_[i]));
  return m;
}

double ScaleGrid::weighted_integral(double beta) const {
  return trapezoid_weighted(values_, grid_.h, beta);
}

ClosedFormScale::ClosedFormScale(const SpectralData& spectral, double q)
    : model_(spectral.model()), q_(q) {
  if (!std::isfinite(q)) throw DomainError("scale_closed_form: q must be finite");
  if (model_.family() != Family::kMeromorphic) return;
  if (!has_closed_form(spectral, q)) {
    throw DomainError("scale_closed_form: meromorphic closed form needs q >= -lambda0");
  }

  const double lambda0 = spectral.lambda0();
  const std::vector<double> zetas = meromorphic_roots(spectral, q);
  const bool double_root = lambda0 > 0.0 && std::abs(q + lambda0) <= kDegenerateWindow;
  if (double_root) {
    const double b = -spectral.theta0();
    const double d2 = psi_derivative(model_, b, 2);
    const double d3 = psi_derivative(model_, b, 3);
    terms_.push_back({b, 2.0 / d2, -2.0 * d3 / (3.0 * d2 * d2)});
    for (std::size_t i = 1; i < zetas.size(); ++i) {
      terms_.push_back({-zetas[i], 0.0, 1.0 / meromorphic_continuation(model_, -zetas[i], 1)});
    }
  } else {
    const double b = phi_extended(spectral, q);
    terms_.push_back({b, 0.0, 1.0 / psi_derivative(model_, b, 1)});
    for (double z : zetas) {
      terms_.push_back({-z, 0.0, 1.0 / meromorphic_continuation(model_, -z, 1)});
    }
  }
}

void ClosedFormScale::truncate_for(double x_min) {
  if (terms_.size() < 2 || !(x_min > 0.0)) return;
  const auto negligible = [&](const Term& t) {
    return t.rate < 0.0 && std::abs(t.intercept) * std::exp(t.rate * x_min) < 1e-14;
  };
  terms_.erase(std::remove_if(terms_.begin() + 1, terms_.end(), negligible), terms_.end());
}

double ClosedFormScale::operator()(double x) const {
  if (x < 0.0) return 0.0;
  switch (model_.family()) {
    case Family::kBMDrift: return bm_scale(std::get<BMDrift>(model_.variant()), q_, x);
    case Family::kCPExpDrift: return cp_scale(std::get<CPExpDrift>(model_.variant()), q_, x);
    case Family::kMeromorphic: {
      numerics::CompensatedSum s;
      for (const Term& t : terms_) s.add((t.slope * x + t.intercept) * std::exp(t.rate * x));
      return s.value();
    }
  }
  return 0.0;
}

bool has_closed_form(const SpectralData& spectral, double q) {
  if (spectral.model().family() != Family::kMeromorphic) return true;
  const double lambda0 = spectral.lambda0();
  if (lambda0 > 0.0) return q >= -lambda0 - kDegenerateWindow;
  return q >= 0.0;
}

double scale_closed_form(const SpectralData& spectral, double q, double x) {
  if (x < 0.0) return 0.0;
  return ClosedFormScale(spectral, q)(x);
}

double scale_closed_form(const LevyModel& model, double q, double x) {
  if (x < 0.0) return 0.0;
  return scale_closed_form(compute_spectral(model), q, x);
}

ScaleGrid scale_grid_closed_form(const SpectralData& spectral, double q, GridSpec grid) {
  std::vector<double> values = closed_form_values(spectral, q, grid);
  const double err = 64.0 * kEps * sup_norm(values);
  return ScaleGrid(q, grid, std::move(values), ScaleMethod::kClosedForm, err);
}

ScaleGrid scale_series(const SpectralData& spectral, double q, GridSpec grid) {
  const std::vector<double> base = closed_form_values(spectral, 0.0, grid);
  SeriesResult fine = series_values(base, q, grid.h);
  double err = fine.truncation;
  if (q != 0.0) {
    const SeriesResult coarse = series_values(every_other(base), q, 2.0 * grid.h);
    err += richardson(fine.values, coarse.values);
  }
  return ScaleGrid(q, grid, std::move(fine.values), ScaleMethod::kSeries, err);
}

ScaleGrid scale_renewal(const SpectralData& spectral, double q, double r, GridSpec grid) {
  if (!(r >= 0.0)) throw DomainError("scale_renewal: reference index r must be >= 0");
  std::vector<double> base = closed_form_values(spectral, r, grid);
  if (q == r) {
    return ScaleGrid(q, grid, std::move(base), ScaleMethod::kRenewal, 0.0);
  }
  std::vector<double> fine = renewal_values(base, q - r, grid.h);
  const std::vector<double> coarse = renewal_values(every_other(base), q - r, 2.0 * grid.h);
  const double err = richardson(fine, coarse);
  return ScaleGrid(q, grid, std::move(fine), ScaleMethod::kRenewal, err);
}

ScaleGrid scale_grid(const SpectralData& spectral, double q, GridSpec grid) {
  if (has_closed_form(spectral, q)) return scale_grid_closed_form(spectral, q, grid);
  return scale_renewal(spectral, q, 0.0, grid);
}

std::vector<double> meromorphic_roots(const SpectralData& spectral, double q) {
  const LevyModel& model = spectral.model();
  if (model.family() != Family::kMeromorphic) {
    throw DomainError("meromorphic_roots: model is not meromorphic");
  }
  if (!has_closed_form(spectral, q)) {
    throw DomainError("meromorphic_roots: q must be >= -lambda0");
  }
  const auto& atoms = std::get<Meromorphic>(model.variant()).atoms;
  const auto f = [&](double b) { return meromorphic_continuation(model, b, 0) - q; };

  std::vector<double> roots;
  roots.reserve(atoms.size() + 1);

  // Decreasing branch on (-rho_1, argmin).
  const double argmin = spectral.argmin();
  if (spectral.lambda0() > 0.0 && q <= -spectral.lambda0()) {
    roots.push_back(spectral.theta0());
  } else {
    const double rho1 = atoms.front().rho;
    const double lo = approach_pole(f, -rho1, argmin + rho1, +1.0, true);
    roots.push_back(-numerics::bisect(f, lo, argmin));
  }

  // One root between consecutive poles: +inf at -rho_i+, -inf at -rho_{i-1}-.
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    const double left = -atoms[i].rho;
    const double right = -atoms[i - 1].rho;
    const double gap = 0.5 * (right - left);
    const double lo = approach_pole(f, left, gap, +1.0, true);
    const double hi = approach_pole(f, right, gap, -1.0, false);
    roots.push_back(-numerics::bisect(f, lo, hi));
  }

  // sigma > 0: psi -> +inf as beta -> -inf, one more root left of the last pole.
  if (model.gaussian_coefficient() > 0.0) {
    const double last = -atoms.back().rho;
    const double hi = approach_pole(f, last, 1.0, -1.0, false);
    double lo = last - 1.0;
    for (int k = 0; k < 1100 && !(f(lo) > 0.0); ++k) lo = last - 2.0 * (last - lo);
    roots.push_back(-numerics::bisect(f, lo, hi));
  }
  return roots;
}

double ExponentialTail::operator()(double x) const {
  return (slope * x + intercept) * std::exp(rate * x);
}

double ExponentialTail::integral_from(double x0, double beta) const {
  const double a = beta - rate;
  if (!(a > 0.0)) throw DomainError("ExponentialTail: beta must exceed the tail rate");
  return std::exp(-a * x0) * (slope * (x0 / a + 1.0 / (a * a)) + intercept / a);
}

ExponentialTail scale_tail(const SpectralData& spectral, double q) {
  const double lambda0 = spectral.lambda0();
  if (lambda0 > 0.0 && std::abs(q + lambda0) <= kDegenerateWindow) {
    const double b = -spectral.theta0();
    const double d2 = psi_derivative(spectral.model(), b, 2);
    const double d3 = psi_derivative(spectral.model(), b, 3);
    return {b, 2.0 / d2, -2.0 * d3 / (3.0 * d2 * d2)};
  }
  return {phi_extended(spectral, q), 0.0, phi_prime(spectral, q)};
}

double laplace_residual(const SpectralData& spectral, const ScaleGrid& grid, double beta) {
  const double q = grid.q();
  if (!(beta > phi(spectral, std::abs(q)))) {
    throw DomainError("laplace_residual: beta must exceed Phi(|q|)");
  }
  const ExponentialTail tail = scale_tail(spectral, q);
  const double approx = grid.weighted_integral(beta) + tail.integral_from(grid.x_max(), beta);
  const double exact = 1.0 / (psi_finite(spectral.model(), beta) - q);
  return std::abs(approx - exact);
}

double potential_density(const SpectralData& spectral, double q, double x, double y) {
  if (!(q >= 0.0) || !(x >= 0.0) || !(y >= 0.0)) {
    throw DomainError("potential_density: q, x, y must be non-negative");
  }
  if (q == 0.0 && psi_derivative(spectral.model(), 0.0, 1) < 0.0) {
    throw DomainError("potential_density: q = 0 requires psi'(0) >= 0 (certain exit)");
  }
  const ClosedFormScale w(spectral, q);
  const double value = std::exp(-x * phi(spectral, q)) * w(y) - w(y - x);
  // Exact zero at x = 0; only rounding can push it below.
  return std::max(0.0, value);
}

double w_phi(const SpectralData& spectral, double lambda, double x) {
  if (!(lambda > 0.0) || !(lambda <= spectral.lambda0())) {
    throw DomainError("w_phi: lambda must lie in (0, lambda0]");
  }
  if (x < 0.0) return 0.0;
  return std::exp(-phi_extended(spectral, -lambda) * x) *
         scale_closed_form(spectral, -lambda, x);
}

double tilted_integral(const SpectralData& spectral, const ScaleGrid& grid, double r) {
  const double lambda = -grid.q();
  if (!(r >= 0.0) || !(r < lambda) || !(lambda <= spectral.lambda0())) {
    throw DomainError("tilted_integral: need 0 <= r < lambda <= lambda0");
  }
  const double beta = phi_extended(spectral, -r);
  const ExponentialTail tail = scale_tail(spectral, grid.q());
  return grid.weighted_integral(beta) + tail.integral_from(grid.x_max(), beta);
}

}  // namespace lqsd
