#include "cli/run.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

#include "lqsd/errors.hpp"
#include "lqsd/montecarlo.hpp"
#include "lqsd/qsd.hpp"
#include "lqsd/scale.hpp"
#include "lqsd/spectral.hpp"

namespace lqsd::cli {

namespace {

using Row = std::vector<std::string>;

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const Row& header) : path_(path), f_(path) {
    if (!f_) throw std::runtime_error("cannot write " + path);
    write(header);
  }

  void write(const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) f_ << ',';
      f_ << row[i];
    }
    f_ << '\n';
  }

 private:
  std::string path_;
  std::ofstream f_;
};

struct Check {
  std::string name;
  double target;
  double achieved;
  double tolerance;
  bool pass;
};

struct Context {
  const RunConfig& cfg;
  std::string prefix;
  std::ostream& out;
  LevyModel model;
  SpectralData spectral;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<Check> checks;

  void note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
  void note(const std::string& key, double value) { note(key, format_real(value)); }

  std::string path(const std::string& name) const { return prefix + "-" + name + ".csv"; }

  GridSpec grid(double default_x_max) const {
    GridSpec g{cfg.number_or("h", 1e-3), cfg.number_or("x_max", default_x_max)};
    if (!(g.h > 0.0) || !(g.x_max > g.h)) throw ParseError("need 0 < h < x_max");
    return g;
  }

  void check(std::string name, double target, double achieved, double tolerance, bool pass) {
    checks.push_back({std::move(name), target, achieved, tolerance, pass});
    const auto& c = checks.back();
    out << c.name << ',' << format_real(c.target) << ',' << format_real(c.achieved) << ','
        << format_real(c.tolerance) << ',' << (c.pass ? "pass" : "fail") << '\n';
  }

  void check_abs(std::string name, double target, double achieved, double tolerance) {
    check(std::move(name), target, achieved, tolerance, std::abs(achieved - target) <= tolerance);
  }
};

std::string bool_text(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError("expected true or false, got '" + s + "'");
}

std::size_t parse_count(double v, const std::string& key) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) {
    throw ParseError(key + " must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::string label(const std::string& base, std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os << base;
  for (const auto& [k, v] : kv) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    os << '[' << k << '=' << buf << ']';
  }
  return os.str();
}

void write_summary(const Context& ctx) {
  CsvWriter w(ctx.path("summary"), {"key", "value"});
  for (const auto& [k, v] : ctx.summary) w.write({k, v});
}

void write_checks(const Context& ctx) {
  CsvWriter w(ctx.path(to_string(ctx.cfg.task)),
              {"name", "target", "achieved", "tolerance", "status"});
  for (const auto& c : ctx.checks) {
    w.write({c.name, format_real(c.target), format_real(c.achieved), format_real(c.tolerance),
             c.pass ? "pass" : "fail"});
  }
}

void describe_model(Context& ctx) {
  const ValidationReport report = validate(ctx.model);
  ctx.note("family", ctx.model.family_name());
  ctx.note("model", ctx.model.describe());
  ctx.note("path_condition", to_string(report.condition));
  ctx.note("psi_prime_at_zero", report.psi_prime_at_zero);
  ctx.note("moment_boundary", report.moment_boundary);
  ctx.note("qsd_exists", bool_text(report.qsd_exists));
  ctx.note("theta0", ctx.spectral.theta0());
  ctx.note("lambda0", ctx.spectral.lambda0());
}

void task_spectral(Context& ctx) {
  const double l0 = ctx.spectral.lambda0();
  const double q_min = ctx.cfg.number_or("q_min", -l0);
  const double q_max = ctx.cfg.number_or("q_max", 10.0);
  const auto n = parse_count(ctx.cfg.number_or("q_points", 101), "q_points");
  if (!(q_max >= q_min)) throw ParseError("need q_min <= q_max");
  CsvWriter w(ctx.path("spectral"), {"q", "phi", "phi_prime", "psi_at_phi"});
  for (double q : linspace(q_min, q_max, n)) {
    const double b = phi_extended(ctx.spectral, q);
    w.write({format_real(q), format_real(b), format_real(phi_prime(ctx.spectral, q)),
             format_real(psi(ctx.model, b).value())});
  }
  ctx.note("q_points", static_cast<double>(n));
}

void task_scale(Context& ctx) {
  const double q = ctx.cfg.number("q");
  const GridSpec g = ctx.grid(50.0);
  const std::string method = ctx.cfg.string_or("method", "auto");
  ScaleGrid w = [&] {
    if (method == "auto") return scale_grid(ctx.spectral, q, g);
    if (method == "closed_form") {
      if (!has_closed_form(ctx.spectral, q)) {
        throw DomainError("no closed form for this model at q = " + format_real(q));
      }
      return scale_grid_closed_form(ctx.spectral, q, g);
    }
    if (method == "series") return scale_series(ctx.spectral, q, g);
    if (method == "renewal") return scale_renewal(ctx.spectral, q, ctx.cfg.number_or("r", 0.0), g);
    throw ParseError("unknown method '" + method + "'");
  }();
  CsvWriter out(ctx.path("scale"), {"x", "value"});
  for (std::size_t i = 0; i < w.size(); ++i) out.write({format_real(w.x(i)), format_real(w[i])});
  ctx.note("q", q);
  ctx.note("method", to_string(w.method()));
  ctx.note("h", g.h);
  ctx.note("x_max", g.x_max);
  ctx.note("err_estimate", w.err_estimate());
  ctx.note("min_value", *std::min_element(w.values().begin(), w.values().end()));
}

void task_qsd(Context& ctx) {
  const double lambda = ctx.cfg.number("lambda");
  const QsdDensity qsd = build_qsd(ctx.spectral, lambda, ctx.grid(50.0));
  CsvWriter out(ctx.path("qsd"), {"x", "density", "cdf"});
  const auto& g = qsd.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.write({format_real(g.x(i)), format_real(qsd.density(g.x(i))),
               format_real(qsd.cdf_table()[i])});
  }
  ctx.note("lambda", lambda);
  ctx.note("method", to_string(g.method()));
  ctx.note("mass", qsd.mass());
  ctx.note("table_mass", qsd.table_mass());
  ctx.note("tail_mass", qsd.tail_mass());
}

void task_verify_analytic(Context& ctx) {
  const SpectralData& s = ctx.spectral;
  const double l0 = s.lambda0();

  double roundtrip = 0.0;
  for (double q : linspace(l0 > 0.0 ? -0.99 * l0 : 0.0, 10.0, 60)) {
    const double b = phi_extended(s, q);
    roundtrip = std::max(roundtrip, std::abs(psi(ctx.model, b).value() - q) / std::max(1.0, std::abs(q)));
  }
  ctx.check("psi_phi_roundtrip", 0.0, roundtrip, 1e-10, roundtrip <= 1e-10);

  const GridSpec short_grid{ctx.cfg.number_or("h", 1e-3), 5.0};
  std::vector<double> qs{0.0};
  if (l0 > 0.0) qs.insert(qs.end(), {-0.5 * l0, -l0});
  for (double q : qs) {
    const ScaleGrid series = scale_series(s, q, short_grid);
    const ScaleGrid renewal = scale_renewal(s, q, 0.0, short_grid);
    double d = series.sup_distance(renewal);
    if (has_closed_form(s, q)) {
      const ScaleGrid closed = scale_grid_closed_form(s, q, short_grid);
      d = std::max({d, closed.sup_distance(series), closed.sup_distance(renewal)});
    }
    ctx.check(label("scale_agreement", {{"q", q}}), 0.0, d, 1e-5, d <= 1e-5);
  }

  const GridSpec g = ctx.grid(50.0);
  std::vector<double> laplace_qs{0.0, 0.5, 1.0};
  if (l0 > 0.0) laplace_qs.push_back(-0.5 * l0);
  for (double q : laplace_qs) {
    const ScaleGrid w = scale_grid(s, q, g);
    for (double extra : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      const double beta = phi(s, std::abs(q)) + extra;
      const double res = laplace_residual(s, w, beta);
      ctx.check(label("laplace_residual", {{"q", q}, {"beta", beta}}), 0.0, res, 1e-6, res <= 1e-6);
    }
  }

  if (!(l0 > 0.0)) {
    ctx.out << "# lambda0 = 0: no quasi-stationary distribution, QSD checks skipped\n";
    return;
  }
  const std::vector<double> lambdas{0.25 * l0, 0.5 * l0, l0};
  for (const auto& row : lambda_scan(s, lambdas, g)) {
    ctx.check_abs(label("qsd_mass", {{"lambda", row.lambda}}), 1.0, row.mass, kQsdMassTolerance);
  }
  const auto scan = lambda_scan(s, {l0, 1.05 * l0}, g);
  ctx.check(label("min_scale_nonnegative", {{"lambda", scan[0].lambda}}), 0.0, scan[0].min_scale,
            1e-10, scan[0].min_scale >= -1e-10);
  ctx.check(label("min_scale_negative", {{"lambda", scan[1].lambda}}), 0.0, scan[1].min_scale, 0.0,
            scan[1].min_scale < 0.0);

  const auto betas = linspace(0.0, 10.0, 100);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      const OrderVerdict v = order_check(ctx.model, lambdas[i], lambdas[j], betas);
      const double inc = std::max(v.max_increment_scaled, v.max_increment_plain);
      ctx.check(label("order", {{"lambda", lambdas[i]}, {"lambda_prime", lambdas[j]}}), 0.0, inc,
                0.0, v.pass);
    }
  }

  const double lambda = 0.5 * l0;
  double prev = 0.0;
  double worst_drop = 0.0;
  for (double x : linspace(0.0, g.x_max, 1001)) {
    const double v = w_phi(s, lambda, x);
    worst_drop = std::max(worst_drop, prev - v);
    prev = v;
  }
  // Rounding noise once w_phi has reached its plateau.
  const double noise = 1e-12 * prev;
  ctx.check(label("w_phi_monotone", {{"lambda", lambda}}), 0.0, worst_drop, noise,
            worst_drop <= noise);
  ctx.check_abs(label("w_phi_limit", {{"lambda", lambda}, {"x", g.x_max}}),
                phi_prime(s, -lambda), w_phi(s, lambda, g.x_max), 1e-4);
  const ScaleGrid w = scale_grid(s, -lambda, g);
  for (double r : {0.0, 0.5 * lambda}) {
    ctx.check_abs(label("tilted_integral", {{"lambda", lambda}, {"r", r}}), 1.0 / (lambda - r),
                  tilted_integral(s, w, r), 1e-5);
  }
}

SimConfig sim_config(const Context& ctx, const RunOverrides& overrides) {
  SimConfig sim = ctx.spectral.lambda0() > 0.0 ? SimConfig::defaults_for(ctx.spectral) : SimConfig{};
  sim.dt = ctx.cfg.number_or("dt", sim.dt);
  sim.horizon = ctx.cfg.number_or("horizon", sim.horizon);
  sim.n_paths = parse_count(ctx.cfg.number_or("n_paths", static_cast<double>(sim.n_paths)), "n_paths");
  sim.bridge_correction = parse_bool(ctx.cfg.string_or("bridge_correction", "true"));
  sim.seed = overrides.seed ? *overrides.seed : ctx.cfg.seed_or(sim.seed);
  if (overrides.threads) {
    sim.threads = *overrides.threads;
  } else if (ctx.cfg.has("threads")) {
    const double t = ctx.cfg.number("threads");
    if (!(t >= 0.0) || t != std::floor(t) || t > 4096) throw ParseError("threads must be 0..4096");
    sim.threads = static_cast<unsigned>(t);
  }
  sim.validate();
  return sim;
}

void task_verify_mc(Context& ctx, const RunOverrides& overrides) {
  const SimConfig sim = sim_config(ctx, overrides);
  ctx.note("seed", std::to_string(sim.seed));
  ctx.note("n_paths", std::to_string(sim.n_paths));
  ctx.note("dt", sim.dt);
  ctx.note("horizon", sim.horizon);

  CsvWriter taus(ctx.path("tau"), {"x", "path", "tau", "censored"});
  for (double x : ctx.cfg.list_or("x_list", {0.5, 1.0, 2.0})) {
    const auto samples = simulate_exits(ctx.model, x, sim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      taus.write({format_real(x), std::to_string(i), format_real(samples[i].tau),
                  samples[i].censored ? "1" : "0"});
    }
    for (double q : ctx.cfg.list_or("q_list", {0.5, 1.0})) {
      const McEstimate e = exit_laplace_from(samples, ctx.spectral, x, q, sim);
      ctx.check(label("exit_laplace", {{"x", x}, {"q", q}}), e.target, e.estimate,
                3.0 * e.std_err + e.censor_bound, e.within(3.0));
    }
  }

  const double l0 = ctx.spectral.lambda0();
  if (!(l0 > 0.0)) {
    ctx.out << "# lambda0 = 0: no quasi-stationary distribution, QSD checks skipped\n";
    return;
  }
  const GridSpec g = ctx.grid(50.0);
  for (double frac : ctx.cfg.list_or("lambda_fractions", {0.5, 1.0})) {
    const QsdDensity qsd = build_qsd(ctx.spectral, frac * l0, g);
    for (double t : ctx.cfg.list_or("t_list", {1.0, 2.0})) {
      const McEstimate e = estimate_survival(ctx.model, qsd, t, sim);
      ctx.check(label("survival", {{"lambda", qsd.lambda()}, {"t", t}}), e.target, e.estimate,
                3.0 * e.std_err, e.within(3.0));
    }
  }
  const QsdDensity qsd = build_qsd(ctx.spectral, l0, g);
  const ConditionalLaw law = conditional_law(ctx.model, qsd, ctx.cfg.number_or("t_obs", 2.0), sim);
  ctx.check(label("stationarity_ks", {{"lambda", l0}}), 0.0, law.ks, law.ks_critical,
            law.ks < law.ks_critical);
}

int dispatch(const RunConfig& cfg, const RunOverrides& overrides, std::ostream& out) {
  LevyModel model = build_model(cfg.model_section);
  SpectralData spectral = compute_spectral(model);
  Context ctx{cfg, overrides.out_prefix.value_or(cfg.out_prefix), out, model, spectral, {}, {}};
  ctx.note("task", to_string(cfg.task));
  describe_model(ctx);
  switch (cfg.task) {
    case Task::kDescribe: break;
    case Task::kSpectral: task_spectral(ctx); break;
    case Task::kScale: task_scale(ctx); break;
    case Task::kQsd: task_qsd(ctx); break;
    case Task::kVerifyAnalytic: task_verify_analytic(ctx); break;
    case Task::kVerifyMc: task_verify_mc(ctx, overrides); break;
  }
  const bool verify = cfg.task == Task::kVerifyAnalytic || cfg.task == Task::kVerifyMc;
  const auto failed = std::count_if(ctx.checks.begin(), ctx.checks.end(),
                                    [](const Check& c) { return !c.pass; });
  if (verify) {
    write_checks(ctx);
    ctx.note("checks", std::to_string(ctx.checks.size()));
    ctx.note("failed", std::to_string(failed));
  }
  write_summary(ctx);
  if (cfg.task == Task::kDescribe) {
    for (const auto& [k, v] : ctx.summary) out << k << '=' << v << '\n';
  }
  return failed > 0 ? kStatusTolerance : kStatusOk;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

int run(const RunConfig& config, const RunOverrides& overrides, std::ostream& out,
        std::ostream& err) {
  try {
    const int status = dispatch(config, overrides, out);
    if (status == kStatusTolerance) err << "lqsd: verification failed\n";
    return status;
  } catch (const ParseError& e) {
    err << "lqsd: config error: " << e.what() << '\n';
    return kStatusParse;
  } catch (const ModelError& e) {
    err << "lqsd: invalid model: " << e.what() << '\n';
    return kStatusModel;
  } catch (const DomainError& e) {
    err << "lqsd: invalid parameters: " << e.what() << '\n';
    return kStatusModel;
  } catch (const ToleranceError& e) {
    err << "lqsd: tolerance failure: " << e.what() << '\n';
    return kStatusTolerance;
  } catch (const ConvergenceError& e) {
    err << "lqsd: tolerance failure: " << e.what() << '\n';
    return kStatusTolerance;
  } catch (const std::exception& e) {
    err << "lqsd: " << e.what() << '\n';
    return kStatusFailure;
  }
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-stationary distributions of spectrally positive Levy processes"};
  std::string config_path;
  RunOverrides overrides;
  std::string out_prefix;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--config", config_path, "Run configuration file")->required();
  auto* out_opt = app.add_option("--out", out_prefix, "Output path prefix");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the config)");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kStatusOk;
  } catch (const CLI::ParseError& e) {
    err << "lqsd: " << e.what() << '\n';
    return kStatusParse;
  }
  if (*out_opt) overrides.out_prefix = out_prefix;
  if (*seed_opt) overrides.seed = seed;
  if (*threads_opt) overrides.threads = threads;
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ParseError& e) {
    err << "lqsd: config error: " << e.what() << '\n';
    return kStatusParse;
  }
  return run(cfg, overrides, out, err);
}

}  // namespace lqsd::cli
