#include "lqsd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "lqsd/errors.hpp"
#include "lqsd/numerics.hpp"
#include "lqsd/stats.hpp"

namespace lqsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kBridgeBisections = 24;
constexpr int kMaxBridgeRejections = 1 << 20;

// exp(x) underflows to 0 below this.
constexpr double kExpUnderflow = -745.0;

unsigned worker_count(const SimConfig& cfg) {
  unsigned n = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  if (n == 0) n = 1;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(cfg.n_paths, 1)));
}

}  // namespace

SimConfig SimConfig::defaults_for(const SpectralData& spectral) {
  SimConfig cfg;
  if (spectral.lambda0() > 0.0) cfg.horizon = std::min(80.0 / spectral.lambda0(), 200.0);
  return cfg;
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw DomainError("SimConfig: dt must be positive");
  if (!(horizon > 0.0) || !(dt <= horizon)) {
    throw DomainError("SimConfig: need 0 < dt <= horizon");
  }
  if (n_paths < 1) throw DomainError("SimConfig: n_paths must be at least 1");
}

PathSimulator::PathSimulator(const LevyModel& model, const SimConfig& cfg)
    : dt_(cfg.dt), bridge_(cfg.bridge_correction) {
  cfg.validate();
  const JumpDiffusionForm form = model.jump_diffusion();
  drift_ = form.drift;
  sigma_ = form.sigma;
  numerics::CompensatedSum total;
  for (const auto& c : form.components) total.add(c.density_weight / c.rate);
  jump_rate_ = total.value();
  if (!std::isfinite(jump_rate_)) {
    throw DomainError("PathSimulator: simulation requires finite jump activity");
  }
  numerics::CompensatedSum acc;
  for (const auto& c : form.components) {
    acc.add(c.density_weight / c.rate);
    mark_cdf_.push_back(acc.value() / jump_rate_);
    mark_rates_.push_back(c.rate);
  }
  if (!mark_cdf_.empty()) mark_cdf_.back() = 1.0;
  if (sigma_ == 0.0 && !(drift_ > 0.0)) {
    throw DomainError("PathSimulator: bounded-variation path needs a positive downward drift");
  }
}

double PathSimulator::draw_jump(RandomStream& rng) const {
  std::size_t k = 0;
  if (mark_rates_.size() > 1) {
    const double u = rng.uniform();
    k = static_cast<std::size_t>(std::upper_bound(mark_cdf_.begin(), mark_cdf_.end(), u) -
                                 mark_cdf_.begin());
    k = std::min(k, mark_rates_.size() - 1);
  }
  return rng.exponential(mark_rates_[k]);
}

double PathSimulator::locate_crossing(double u, double v, double step, bool certain,
                                      RandomStream& rng) const {
  // Brownian bridge from u > 0 to v over `step`, conditioned to hit 0 (certain
  // when v < 0). Halve the interval, keeping the half with the first hit.
  const double s2 = sigma_ * sigma_;
  double offset = 0.0;
  for (int depth = 0; depth < kBridgeBisections; ++depth) {
    const double half = 0.5 * step;
    int attempts = 0;
    for (;;) {
      const double mid = 0.5 * (u + v) + sigma_ * std::sqrt(0.5 * half) * rng.normal();
      if (mid <= 0.0) {
        v = mid;
        certain = true;
        break;
      }
      const double p_first = std::exp(-2.0 * u * mid / (s2 * half));
      if (rng.uniform() < p_first) {
        v = mid;
        certain = false;
        break;
      }
      const double p_second = v <= 0.0 ? 1.0 : std::exp(-2.0 * mid * v / (s2 * half));
      if (certain || rng.uniform() < p_second) {
        u = mid;
        offset += half;
        break;
      }
      if (++attempts > kMaxBridgeRejections) return offset + 0.5 * step;
    }
    step = half;
  }
  return offset + 0.5 * step;
}

ExitSample PathSimulator::run_piecewise_linear(double x0, double stop, bool record,
                                               RandomStream& rng) const {
  double t = 0.0;
  double x = x0;
  for (;;) {
    const double gap = jump_rate_ > 0.0 ? rng.exponential(jump_rate_) : kInf;
    const double hit = t + x / drift_;
    const double next = t + gap;
    if (hit <= std::min(next, stop)) return {hit, false, std::nullopt};
    if (next >= stop) {
      ExitSample s{stop, true, std::nullopt};
      if (record) s.x_at = x - drift_ * (stop - t);
      return s;
    }
    x += -drift_ * gap + draw_jump(rng);
    t = next;
  }
}

ExitSample PathSimulator::run_diffusive(double x0, double stop, bool record,
                                        RandomStream& rng) const {
  const double s2 = sigma_ * sigma_;
  double t = 0.0;
  double x = x0;
  double next_jump = jump_rate_ > 0.0 ? rng.exponential(jump_rate_) : kInf;
  while (t < stop) {
    const double segment_end = std::min(next_jump, stop);
    while (t < segment_end) {
      double step = dt_;
      double t_next = t + step;
      if (t_next >= segment_end) {
        t_next = segment_end;
        step = segment_end - t;
      }
      const double v = x - drift_ * step + sigma_ * std::sqrt(step) * rng.normal();
      if (v < 0.0) {
        const double at = bridge_ ? locate_crossing(x, v, step, true, rng) : step;
        return {t + at, false, std::nullopt};
      }
      if (bridge_) {
        const double exponent = -2.0 * x * v / (s2 * step);
        if (exponent > kExpUnderflow && rng.uniform() < std::exp(exponent)) {
          return {t + locate_crossing(x, v, step, false, rng), false, std::nullopt};
        }
      }
      x = v;
      t = t_next;
    }
    if (t >= stop) break;
    x += draw_jump(rng);
    next_jump = t + rng.exponential(jump_rate_);
  }
  ExitSample s{stop, true, std::nullopt};
  if (record) s.x_at = x;
  return s;
}

ExitSample PathSimulator::run(double x0, double stop, bool record_position,
                              RandomStream& rng) const {
  if (!(x0 >= 0.0)) throw DomainError("simulate_exit: x0 must be non-negative");
  if (sigma_ == 0.0) return run_piecewise_linear(x0, stop, record_position, rng);
  return run_diffusive(x0, stop, record_position, rng);
}

ExitSample simulate_exit(const LevyModel& model, double x0, const SimConfig& cfg,
                         std::optional<double> t_obs, std::uint64_t path_index) {
  const PathSimulator sim(model, cfg);
  RandomStream rng(cfg.seed, StreamDomain::kPath, path_index);
  if (t_obs) {
    if (!(*t_obs >= 0.0)) throw DomainError("simulate_exit: t_obs must be non-negative");
    if (*t_obs == 0.0) return {0.0, true, x0};
    return sim.run(x0, *t_obs, true, rng);
  }
  return sim.run(x0, cfg.horizon, false, rng);
}

std::vector<ExitSample> simulate_paths(const LevyModel& model, const SimConfig& cfg,
                                       double stop, bool record_position,
                                       const std::function<double(RandomStream&)>& initial) {
  const PathSimulator sim(model, cfg);
  std::vector<ExitSample> out(cfg.n_paths);
  const unsigned workers = worker_count(cfg);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(cfg.seed, StreamDomain::kPath, i);
      const double x0 = initial(rng);
      if (stop == 0.0) {
        out[i] = {0.0, true, record_position ? std::optional<double>(x0) : std::nullopt};
      } else {
        out[i] = sim.run(x0, stop, record_position, rng);
      }
    }
  };
  if (workers <= 1) {
    work(0, cfg.n_paths);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (cfg.n_paths + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(cfg.n_paths, w * chunk);
    const std::size_t end = std::min(cfg.n_paths, begin + chunk);
    pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return out;
}

double McEstimate::z_score() const {
  if (std_err == 0.0) return estimate == target ? 0.0 : kInf;
  return std::abs(estimate - target) / std_err;
}

bool McEstimate::within(double n_std_err) const {
  return std::abs(estimate - target) <= n_std_err * std_err + censor_bound;
}

std::vector<ExitSample> simulate_exits(const LevyModel& model, double x,
                                       const SimConfig& cfg) {
  if (!(x >= 0.0)) throw DomainError("simulate_exits: x must be non-negative");
  return simulate_paths(model, cfg, cfg.horizon, false, [x](RandomStream&) { return x; });
}

McEstimate exit_laplace_from(const std::vector<ExitSample>& samples,
                             const SpectralData& spectral, double x, double q,
                             const SimConfig& cfg) {
  if (!(q >= 0.0)) throw DomainError("exit_laplace_from: q must be non-negative");
  std::vector<double> values(samples.size());
  McEstimate est;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].censored) {
      ++est.censored;
      values[i] = 0.0;
    } else {
      values[i] = std::exp(-q * samples[i].tau);
    }
  }
  const auto me = stats::mean_and_error(values);
  est.estimate = me.mean;
  est.std_err = me.std_err;
  est.n = samples.size();
  est.target = std::exp(-x * phi(spectral, q));
  // A censored path would contribute at most e^{-q horizon}.
  est.censor_bound = est.n == 0 ? 0.0
                                : static_cast<double>(est.censored) /
                                      static_cast<double>(est.n) * std::exp(-q * cfg.horizon);
  return est;
}

McEstimate estimate_exit_laplace(const SpectralData& spectral, double x, double q,
                                 const SimConfig& cfg) {
  if (!(q >= 0.0)) throw DomainError("estimate_exit_laplace: q must be non-negative");
  return exit_laplace_from(simulate_exits(spectral.model(), x, cfg), spectral, x, q, cfg);
}

McEstimate estimate_survival(const LevyModel& model, const QsdDensity& qsd, double t,
                             const SimConfig& cfg) {
  if (!(t >= 0.0) || !(t <= cfg.horizon)) {
    throw DomainError("estimate_survival: need 0 <= t <= horizon");
  }
  McEstimate est;
  est.n = cfg.n_paths;
  est.target = std::exp(-qsd.lambda() * t);
  if (t == 0.0) {
    est.estimate = 1.0;
    return est;
  }
  const auto paths = simulate_paths(model, cfg, t, false,
                                    [&qsd](RandomStream& rng) { return qsd.sample(rng); });
  std::vector<double> alive(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) alive[i] = paths[i].censored ? 1.0 : 0.0;
  const auto me = stats::mean_and_error(alive);
  est.estimate = me.mean;
  est.std_err = me.std_err;
  return est;
}

namespace {

ConditionalLaw collect_survivors(const std::vector<ExitSample>& paths, const QsdDensity& ref) {
  ConditionalLaw law;
  law.n_started = paths.size();
  for (const auto& p : paths) {
    if (p.x_at) law.samples.push_back(*p.x_at);
  }
  if (law.samples.size() < kMinSurvivors) {
    std::ostringstream os;
    os << "too few survivors: " << law.samples.size() << " < " << kMinSurvivors
       << "; increase n_paths or reduce t_obs";
    throw ToleranceError(os.str());
  }
  law.ks = stats::ks_statistic(law.samples, [&ref](double x) { return ref.cdf(x); });
  law.ks_critical = stats::ks_critical_1pct(law.samples.size());
  return law;
}

}  // namespace

ConditionalLaw conditional_law(const LevyModel& model, const QsdDensity& qsd, double t_obs,
                               const SimConfig& cfg) {
  if (!(t_obs >= 0.0)) throw DomainError("conditional_law: t_obs must be non-negative");
  const double expected = static_cast<double>(cfg.n_paths) * std::exp(-qsd.lambda() * t_obs);
  if (expected < static_cast<double>(kMinSurvivors)) {
    std::ostringstream os;
    os << "too few survivors expected: " << expected << " < " << kMinSurvivors;
    throw ToleranceError(os.str());
  }
  const auto paths = simulate_paths(model, cfg, t_obs, true,
                                    [&qsd](RandomStream& rng) { return qsd.sample(rng); });
  return collect_survivors(paths, qsd);
}

ConditionalLaw yaglom_estimate(const LevyModel& model, double x0, double t_obs,
                               const SimConfig& cfg, const QsdDensity& reference) {
  if (!(t_obs >= 0.0)) throw DomainError("yaglom_estimate: t_obs must be non-negative");
  if (!(x0 >= 0.0)) throw DomainError("yaglom_estimate: x0 must be non-negative");
  const auto paths =
      simulate_paths(model, cfg, t_obs, true, [x0](RandomStream&) { return x0; });
  return collect_survivors(paths, reference);
}

}  // namespace lqsd
