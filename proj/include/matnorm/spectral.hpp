#pragma once

// Divided differences (a^q - b^q) / (a^2 - b^2) that appear in every
// cross term over singular-value pairs. They are evaluated through
// x = min/max so that near-equal arguments keep full relative accuracy, and
// replaced by their limit (q/2) a^(q-2) when the two arguments tie.

#include <algorithm>
#include <cmath>

namespace matnorm {

/// Relative gap below which two singular values are treated as tied.
inline constexpr double kTieTolerance = 1e-9;

inline bool tied(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b));
}

/// (a^q - b^q) / (a^2 - b^2) for a, b >= 0 not both zero, q >= 0.
inline double power_divided_difference(double a, double b, double q) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (q == 0.0) return 0.0;
  if (tied(hi, lo)) return 0.5 * q * std::pow(hi, q - 2.0);
  const double rel = (lo - hi) / hi;               // x - 1 with x = lo / hi
  const double num = std::expm1(q * std::log1p(rel));  // x^q - 1
  const double den = rel * (2.0 + rel);             // x^2 - 1
  return std::pow(hi, q - 2.0) * (num / den);
}

/// Partial derivative of power_divided_difference(a, b, q) with respect to a.
inline double power_divided_difference_da(double a, double b, double q) {
  // The direct quotient loses ~eps/gap^2 relative accuracy, so the limit is
  // used over a wider band than the value itself.
  constexpr double kDerivativeTieBand = 1e-5;
  if (q == 0.0) return 0.0;
  if (std::abs(a - b) <= kDerivativeTieBand * std::max(a, b))
    return 0.25 * q * (q - 2.0) * std::pow(a, q - 3.0);
  const double d = power_divided_difference(a, b, q);
  return (q * std::pow(a, q - 1.0) - 2.0 * a * d) / ((a - b) * (a + b));
}

}  // namespace matnorm
