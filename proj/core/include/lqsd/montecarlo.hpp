#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lqsd/qsd.hpp"
#include "lqsd/rng.hpp"
#include "lqsd/spectral.hpp"

namespace lqsd {

struct SimConfig {
  double dt = 1e-3;
  double horizon = 200.0;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  bool bridge_correction = true;
  /// Worker threads; 0 means hardware concurrency. Never affects results.
  unsigned threads = 0;

  /// Defaults with horizon = min(80 / lambda0, 200).
  static SimConfig defaults_for(const SpectralData& spectral);
  void validate() const;
};

/// One killed path. `tau` is the exit time below 0, or the stopping time when
/// `censored` (the path survived the whole simulated window).
struct ExitSample {
  double tau = 0.0;
  bool censored = false;
  /// Position at the observation time, present iff the path survived it.
  std::optional<double> x_at;
};

/// Simulates X = -drift t + sigma B + compound Poisson jumps, killed on
/// entering (-inf, 0).
///
/// Jump times and marks are exact. Without a Gaussian part the path is
/// piecewise linear and the crossing time is exact. With sigma > 0 the
/// diffusion is advanced in sub-steps of length <= dt; after each sub-step
/// from u > 0 to v > 0 the path is killed with the Brownian-bridge crossing
/// probability exp(-2uv / (sigma^2 step)), and a detected crossing is located
/// by recursive bridge bisection.
class PathSimulator {
 public:
  PathSimulator(const LevyModel& model, const SimConfig& cfg);

  /// Runs one path from x0 until exit or `stop` (horizon or observation time).
  [[nodiscard]] ExitSample run(double x0, double stop, bool record_position,
                               RandomStream& rng) const;

 private:
  [[nodiscard]] double draw_jump(RandomStream& rng) const;
  [[nodiscard]] double locate_crossing(double u, double v, double step, bool certain,
                                       RandomStream& rng) const;
  [[nodiscard]] ExitSample run_piecewise_linear(double x0, double stop, bool record,
                                                RandomStream& rng) const;
  [[nodiscard]] ExitSample run_diffusive(double x0, double stop, bool record,
                                         RandomStream& rng) const;

  double drift_;
  double sigma_;
  double jump_rate_;
  std::vector<double> mark_cdf_;
  std::vector<double> mark_rates_;
  double dt_;
  bool bridge_;
};

/// Single path using substream (cfg.seed, path_index). With `t_obs` the path
/// is stopped at t_obs and its position recorded when it survives.
ExitSample simulate_exit(const LevyModel& model, double x0, const SimConfig& cfg,
                         std::optional<double> t_obs = std::nullopt,
                         std::uint64_t path_index = 0);

/// cfg.n_paths paths; path i draws its start from `initial` and then runs on
/// substream (cfg.seed, i). Output order and values are independent of
/// cfg.threads.
std::vector<ExitSample> simulate_paths(const LevyModel& model, const SimConfig& cfg,
                                       double stop, bool record_position,
                                       const std::function<double(RandomStream&)>& initial);

struct McEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
  double target = 0.0;
  /// Bound on the bias from paths still alive at the horizon.
  double censor_bound = 0.0;
  std::size_t n = 0;
  std::size_t censored = 0;

  [[nodiscard]] double z_score() const;
  [[nodiscard]] bool within(double n_std_err) const;
};

/// cfg.n_paths exit samples from x, censored at cfg.horizon.
std::vector<ExitSample> simulate_exits(const LevyModel& model, double x, const SimConfig& cfg);

/// Mean of e^{-q tau} 1{tau < horizon} over `samples` started from x, with
/// target e^{-x Phi(q)}.
McEstimate exit_laplace_from(const std::vector<ExitSample>& samples,
                             const SpectralData& spectral, double x, double q,
                             const SimConfig& cfg);

/// Estimates E_x[e^{-q tau}, tau < inf] against e^{-x Phi(q)}.
McEstimate estimate_exit_laplace(const SpectralData& spectral, double x, double q,
                                 const SimConfig& cfg);

/// Estimates P_{nu_lambda}[tau > t] against e^{-lambda t}.
McEstimate estimate_survival(const LevyModel& model, const QsdDensity& qsd, double t,
                             const SimConfig& cfg);

struct ConditionalLaw {
  std::vector<double> samples;  ///< survivor positions in path order
  std::size_t n_started = 0;
  double ks = 0.0;              ///< two-sided KS distance to the reference CDF
  double ks_critical = 0.0;     ///< 1.63 / sqrt(survivors)
};

/// Minimum survivor count accepted by the conditional-law estimators.
inline constexpr std::size_t kMinSurvivors = 1000;

/// Law at t_obs of paths started from nu_lambda and conditioned on survival,
/// compared with nu_lambda. Throws ToleranceError if fewer than kMinSurvivors
/// are expected or observed.
ConditionalLaw conditional_law(const LevyModel& model, const QsdDensity& qsd, double t_obs,
                               const SimConfig& cfg);

/// Conditioned law at t_obs from the point mass at x0, with its KS distance to
/// `reference` reported as a diagnostic.
ConditionalLaw yaglom_estimate(const LevyModel& model, double x0, double t_obs,
                               const SimConfig& cfg, const QsdDensity& reference);

}  // namespace lqsd
