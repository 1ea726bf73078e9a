#pragma once

#include <cmath>

namespace ionbath {

/// A value with a one-sigma uncertainty, in whatever unit the caller uses.
struct Measured {
  double value = 0.0;
  double sigma = 0.0;

  Measured scaled(double factor) const { return {value * factor, sigma * std::abs(factor)}; }
};

/// Sum with uncertainties added in quadrature (independent errors).
inline Measured add_quadrature(const Measured& a, const Measured& b) {
  return {a.value + b.value, std::hypot(a.sigma, b.sigma)};
}

/// Sum with uncertainties added linearly (fully correlated errors).
inline Measured add_linear(const Measured& a, const Measured& b) {
  return {a.value + b.value, a.sigma + b.sigma};
}

}  // namespace ionbath
