#include "lqsd/levy_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lqsd/errors.hpp"
#include "lqsd/numerics.hpp"

namespace lqsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void check(const BMDrift& m) {
  // mu = 0 is reachable only through an Esscher tilt at theta0.
  if (!std::isfinite(m.mu) || m.mu < 0.0) {
    throw ModelError("BMDrift: mu must be positive");
  }
  if (!finite_positive(m.sigma)) throw ModelError("BMDrift: sigma must be positive");
}

void check(const CPExpDrift& m) {
  if (!finite_positive(m.mu)) throw ModelError("CPExpDrift: mu must be positive");
  if (!finite_positive(m.c)) throw ModelError("CPExpDrift: c must be positive");
  if (!finite_positive(m.rho)) throw ModelError("CPExpDrift: rho must be positive");
}

JumpDiffusionForm meromorphic_form(const Meromorphic& m) {
  JumpDiffusionForm f;
  f.sigma = m.sigma;
  numerics::CompensatedSum linear;
  linear.add(-m.a);
  f.components.reserve(m.atoms.size());
  for (const auto& atom : m.atoms) {
    const double w = atom.a * atom.rho * std::exp(-atom.rho);
    f.components.push_back({w, atom.rho});
    linear.add(w / (atom.rho * atom.rho));
    linear.add(-atom.a * std::exp(-2.0 * atom.rho) * (atom.rho + 1.0) / atom.rho);
  }
  f.drift = linear.value();
  return f;
}

void check(const Meromorphic& m) {
  if (!std::isfinite(m.a)) throw ModelError("Meromorphic: a must be finite");
  if (!std::isfinite(m.sigma) || m.sigma < 0.0) {
    throw ModelError("Meromorphic: sigma must be non-negative");
  }
  if (m.atoms.empty()) throw ModelError("Meromorphic: at least one atom is required");
  double prev = 0.0;
  for (const auto& atom : m.atoms) {
    if (!finite_positive(atom.a)) throw ModelError("Meromorphic: atom weight must be positive");
    if (!finite_positive(atom.rho)) throw ModelError("Meromorphic: atom rate must be positive");
    if (!(atom.rho > prev)) {
      throw ModelError("Meromorphic: atom rates must be strictly increasing");
    }
    prev = atom.rho;
  }
  if (m.sigma == 0.0 && !(meromorphic_form(m).drift > 0.0)) {
    throw ModelError(
        "Meromorphic: with sigma = 0 the downward drift must be positive "
        "(otherwise the process is a subordinator)");
  }
}

double jd_psi(const JumpDiffusionForm& f, double beta) {
  numerics::CompensatedSum s;
  s.add(f.drift * beta);
  s.add(0.5 * f.sigma * f.sigma * beta * beta);
  for (const auto& c : f.components) {
    // 1/(b+rho) - 1/rho = -b / (rho (b + rho)), cancellation-free near b = 0.
    s.add(-c.density_weight * beta / (c.rate * (beta + c.rate)));
  }
  return s.value();
}

double jd_derivative(const JumpDiffusionForm& f, double beta, int order) {
  numerics::CompensatedSum s;
  switch (order) {
    case 1:
      s.add(f.drift);
      s.add(f.sigma * f.sigma * beta);
      for (const auto& c : f.components) {
        const double d = beta + c.rate;
        s.add(-c.density_weight / (d * d));
      }
      break;
    case 2:
      s.add(f.sigma * f.sigma);
      for (const auto& c : f.components) {
        const double d = beta + c.rate;
        s.add(2.0 * c.density_weight / (d * d * d));
      }
      break;
    case 3:
      for (const auto& c : f.components) {
        const double d = beta + c.rate;
        const double d2 = d * d;
        s.add(-6.0 * c.density_weight / (d2 * d2));
      }
      break;
    default:
      throw DomainError("psi_derivative: order must be 1, 2 or 3");
  }
  return s.value();
}

}  // namespace

LevyModel LevyModel::bm_drift(double mu, double sigma) {
  BMDrift m{mu, sigma};
  if (!finite_positive(mu)) throw ModelError("BMDrift: mu must be positive");
  check(m);
  return LevyModel(m);
}

LevyModel LevyModel::cp_exp_drift(double mu, double c, double rho) {
  CPExpDrift m{mu, c, rho};
  check(m);
  return LevyModel(m);
}

LevyModel LevyModel::meromorphic(double a, double sigma,
                                 std::vector<MeromorphicAtom> atoms) {
  Meromorphic m{a, sigma, std::move(atoms)};
  check(m);
  return LevyModel(std::move(m));
}

Family LevyModel::family() const {
  return std::visit(Overloaded{[](const BMDrift&) { return Family::kBMDrift; },
                               [](const CPExpDrift&) { return Family::kCPExpDrift; },
                               [](const Meromorphic&) { return Family::kMeromorphic; }},
                    variant_);
}

std::string LevyModel::family_name() const {
  switch (family()) {
    case Family::kBMDrift: return "bm_drift";
    case Family::kCPExpDrift: return "cp_exp_drift";
    case Family::kMeromorphic: return "meromorphic";
  }
  return "unknown";
}

std::string LevyModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const BMDrift& m) {
                   os << "bm_drift(mu=" << m.mu << ", sigma=" << m.sigma << ")";
                 },
                 [&](const CPExpDrift& m) {
                   os << "cp_exp_drift(mu=" << m.mu << ", c=" << m.c
                      << ", rho=" << m.rho << ")";
                 },
                 [&](const Meromorphic& m) {
                   os << "meromorphic(a=" << m.a << ", sigma=" << m.sigma << ", atoms=[";
                   for (std::size_t i = 0; i < m.atoms.size(); ++i) {
                     if (i) os << ", ";
                     os << m.atoms[i].a << ":" << m.atoms[i].rho;
                   }
                   os << "])";
                 }},
             variant_);
  return os.str();
}

double LevyModel::moment_boundary() const {
  return std::visit(Overloaded{[](const BMDrift&) { return kInf; },
                               [](const CPExpDrift& m) { return m.rho; },
                               [](const Meromorphic& m) { return m.atoms.front().rho; }},
                    variant_);
}

double LevyModel::gaussian_coefficient() const {
  return std::visit(Overloaded{[](const BMDrift& m) { return m.sigma; },
                               [](const CPExpDrift&) { return 0.0; },
                               [](const Meromorphic& m) { return m.sigma; }},
                    variant_);
}

JumpDiffusionForm LevyModel::jump_diffusion() const {
  return std::visit(
      Overloaded{[](const BMDrift& m) { return JumpDiffusionForm{m.mu, m.sigma, {}}; },
                 [](const CPExpDrift& m) {
                   // Levy density c rho e^{-rho x}.
                   return JumpDiffusionForm{m.mu, 0.0, {{m.c * m.rho, m.rho}}};
                 },
                 [](const Meromorphic& m) { return meromorphic_form(m); }},
      variant_);
}

double LevyModel::jump_intensity() const {
  numerics::CompensatedSum s;
  for (const auto& c : jump_diffusion().components) s.add(c.density_weight / c.rate);
  return s.value();
}

ExtendedReal psi(const LevyModel& model, double beta) {
  if (beta == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const BMDrift& m) -> ExtendedReal {
            return m.mu * beta + 0.5 * m.sigma * m.sigma * beta * beta;
          },
          [&](const CPExpDrift& m) -> ExtendedReal {
            if (beta <= -m.rho) return ExtendedReal::infinity();
            return m.mu * beta - m.c * beta / (beta + m.rho);
          },
          [&](const Meromorphic& m) -> ExtendedReal {
            if (beta <= -m.atoms.front().rho) return ExtendedReal::infinity();
            return jd_psi(meromorphic_form(m), beta);
          }},
      model.variant());
}

double psi_derivative(const LevyModel& model, double beta, int order) {
  if (order < 1 || order > 3) throw DomainError("psi_derivative: order must be 1, 2 or 3");
  if (!(beta > -model.moment_boundary())) {
    throw DomainError("psi_derivative: beta must exceed -r");
  }
  return std::visit(
      Overloaded{[&](const BMDrift& m) {
                   if (order == 1) return m.mu + m.sigma * m.sigma * beta;
                   if (order == 2) return m.sigma * m.sigma;
                   return 0.0;
                 },
                 [&](const CPExpDrift& m) {
                   const double d = beta + m.rho;
                   if (order == 1) return m.mu - m.c * m.rho / (d * d);
                   if (order == 2) return 2.0 * m.c * m.rho / (d * d * d);
                   return -6.0 * m.c * m.rho / (d * d * d * d);
                 },
                 [&](const Meromorphic& m) {
                   return jd_derivative(meromorphic_form(m), beta, order);
                 }},
      model.variant());
}

double meromorphic_continuation(const LevyModel& model, double beta, int order) {
  const auto* m = std::get_if<Meromorphic>(&model.variant());
  if (m == nullptr) throw DomainError("meromorphic_continuation: model is not meromorphic");
  const JumpDiffusionForm form = meromorphic_form(*m);
  return order == 0 ? jd_psi(form, beta) : jd_derivative(form, beta, order);
}

ValidationReport validate(const LevyModel& model) {
  std::visit([](const auto& m) { check(m); }, model.variant());
  ValidationReport report{};
  report.condition = model.gaussian_coefficient() > 0.0 ? PathCondition::kGaussian
                                                        : PathCondition::kBoundedVariation;
  report.psi_prime_at_zero = psi_derivative(model, 0.0, 1);
  report.moment_boundary = model.moment_boundary();
  report.qsd_exists = report.psi_prime_at_zero > 0.0 && report.moment_boundary > 0.0;
  return report;
}

LevyModel esscher(const LevyModel& model, double theta) {
  if (theta == 0.0) return model;
  if (!(theta > 0.0) || !(theta < model.moment_boundary())) {
    throw DomainError("esscher: theta must lie in [0, r)");
  }
  if (psi_derivative(model, -theta, 1) < 0.0) {
    // Allow rounding noise at theta0 itself.
    const double scale = std::abs(psi_derivative(model, 0.0, 1)) + 1.0;
    if (psi_derivative(model, -theta, 1) < -1e-12 * scale) {
      throw DomainError("esscher: psi'(-theta) < 0, theta exceeds theta0");
    }
  }
  return std::visit(
      Overloaded{
          [&](const BMDrift& m) {
            const double mu = m.mu - m.sigma * m.sigma * theta;
            return LevyModel(BMDrift{mu > 0.0 ? mu : 0.0, m.sigma});
          },
          [&](const CPExpDrift& m) {
            const double rho = m.rho - theta;
            return LevyModel(CPExpDrift{m.mu, m.c * m.rho / rho, rho});
          },
          [&](const Meromorphic& m) {
            // Tilting keeps w_i, shifts rho_i -> rho_i - theta and the linear
            // coefficient by -sigma^2 theta; map back to (a, a_i).
            const JumpDiffusionForm f = meromorphic_form(m);
            Meromorphic out{0.0, m.sigma, {}};
            out.atoms.reserve(m.atoms.size());
            numerics::CompensatedSum a;
            a.add(-(f.drift - m.sigma * m.sigma * theta));
            for (const auto& atom : m.atoms) {
              const double rho = atom.rho - theta;
              const double ai = atom.a * atom.rho * std::exp(-theta) / rho;
              out.atoms.push_back({ai, rho});
              const double w = ai * rho * std::exp(-rho);
              a.add(w / (rho * rho));
              a.add(-ai * std::exp(-2.0 * rho) * (rho + 1.0) / rho);
            }
            out.a = a.value();
            return LevyModel(std::move(out));
          }},
      model.variant());
}

std::string to_string(PathCondition c) {
  switch (c) {
    case PathCondition::kGaussian: return "gaussian";
    case PathCondition::kInfiniteVariation: return "infinite_variation";
    case PathCondition::kBoundedVariation: return "bounded_variation";
  }
  return "unknown";
}

}  // namespace lqsd
