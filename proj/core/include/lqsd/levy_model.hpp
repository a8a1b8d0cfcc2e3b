#pragma once

#include <string>
#include <variant>
#include <vector>

#include "lqsd/extended_real.hpp"

namespace lqsd {

/// X_t = -mu t + sigma B_t.
struct BMDrift {
  double mu;
  double sigma;
};

/// X_t = -mu t + compound Poisson with intensity c and Exp(rho) jump sizes.
struct CPExpDrift {
  double mu;
  double c;
  double rho;
};

/// One atom of the mixing measure: weight a_i > 0 at rate rho_i > 0.
struct MeromorphicAtom {
  double a;
  double rho;
};

/// Finite meromorphic class with Laplace exponent
///
///   psi(b) = -a b + sigma^2 b^2 / 2
///            + sum_i a_i rho_i e^{-rho_i} (1/(b + rho_i) - 1/rho_i + b/rho_i^2)
///            - b sum_i a_i e^{-2 rho_i} (rho_i + 1) / rho_i.
///
/// Note: the drift correction carries e^{-2 rho_i}, while writing the same
/// process through its completely monotone Levy density would give e^{-rho_i}.
/// The difference only shifts the linear coefficient; the formula above is
/// implemented verbatim and everything downstream (roots, scale functions,
/// simulation) is derived from it, so results are internally consistent.
struct Meromorphic {
  double a;
  double sigma;
  std::vector<MeromorphicAtom> atoms;  ///< rho strictly increasing
};

enum class Family { kBMDrift, kCPExpDrift, kMeromorphic };

/// Equivalent form of a meromorphic exponent used for evaluation:
///   psi(b) = linear b + sigma^2 b^2 / 2 + sum_i w_i (1/(b + rho_i) - 1/rho_i)
/// with w_i = a_i rho_i e^{-rho_i}. The process is then
///   X_t = -linear t + sigma B_t + compound Poisson(rate w_i / rho_i, Exp(rho_i)).
struct JumpDiffusionForm {
  double drift;  ///< downward drift rate (coefficient of b)
  double sigma;
  struct Component {
    double density_weight;  ///< w_i: Levy density w_i e^{-rho_i x}
    double rate;            ///< rho_i
  };
  std::vector<Component> components;
};

/// A spectrally positive Levy process from one of the supported families.
/// Immutable after construction; the factories enforce the family invariants.
class LevyModel {
 public:
  using Variant = std::variant<BMDrift, CPExpDrift, Meromorphic>;

  static LevyModel bm_drift(double mu, double sigma);
  static LevyModel cp_exp_drift(double mu, double c, double rho);
  static LevyModel meromorphic(double a, double sigma,
                               std::vector<MeromorphicAtom> atoms);

  [[nodiscard]] Family family() const;
  [[nodiscard]] const Variant& variant() const { return variant_; }
  [[nodiscard]] std::string family_name() const;
  [[nodiscard]] std::string describe() const;

  /// Exponential-moment boundary r: psi is finite exactly on (-r, inf).
  [[nodiscard]] double moment_boundary() const;
  [[nodiscard]] double gaussian_coefficient() const;

  /// Canonical jump-diffusion description (all families).
  [[nodiscard]] JumpDiffusionForm jump_diffusion() const;

  /// Total jump intensity (finite for every supported family).
  [[nodiscard]] double jump_intensity() const;

 private:
  explicit LevyModel(Variant v) : variant_(std::move(v)) {}
  friend LevyModel esscher(const LevyModel& model, double theta);

  Variant variant_;
};

/// Laplace exponent psi(b) = log E[exp(-b X_1)]; +inf for b <= -r.
ExtendedReal psi(const LevyModel& model, double beta);

/// d^order psi / d beta^order for order in {1,2,3}. Throws DomainError for
/// beta <= -r or an unsupported order.
double psi_derivative(const LevyModel& model, double beta, int order);

/// Rational continuation of a meromorphic exponent (order 0) or of its
/// derivatives (orders 1..3) to every beta other than the poles -rho_i.
/// Throws DomainError for the other families.
double meromorphic_continuation(const LevyModel& model, double beta, int order);

enum class PathCondition {
  kGaussian,          ///< sigma > 0
  kInfiniteVariation, ///< sigma = 0 with int_0^1 x Pi(dx) = inf (not reachable here)
  kBoundedVariation,  ///< sigma = 0, finite variation, strictly positive downward drift
};

struct ValidationReport {
  PathCondition condition;
  double psi_prime_at_zero;
  double moment_boundary;  ///< r, possibly +inf
  bool qsd_exists;         ///< psi'(0) > 0 and r > 0
};

/// Re-checks the family invariants (throws ModelError) and classifies the model.
ValidationReport validate(const LevyModel& model);

/// Exponentially tilted model with exponent psi(b - theta) - psi(-theta), in
/// the same family. Requires 0 <= theta < r and psi'(-theta) >= 0.
LevyModel esscher(const LevyModel& model, double theta);

std::string to_string(PathCondition c);

}  // namespace lqsd
