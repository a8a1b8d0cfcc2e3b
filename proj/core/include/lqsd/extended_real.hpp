#pragma once

#include <cmath>
#include <limits>

namespace lqsd {

/// A real number or +infinity. Used for the Laplace exponent, which may blow
/// up to the left of the exponential-moment boundary.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr ExtendedReal infinity() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }

  [[nodiscard]] constexpr bool is_finite() const {
    return value_ != std::numeric_limits<double>::infinity();
  }
  [[nodiscard]] constexpr bool is_infinite() const { return !is_finite(); }

  /// The stored value; +inf when infinite.
  [[nodiscard]] constexpr double value() const { return value_; }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) = default;

 private:
  double value_ = 0.0;
};

}  // namespace lqsd
