#pragma once

#include <cmath>
#include <numbers>

namespace langevin {

/// Standard normal CDF, evaluated through erfc.
inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Density of N(0, sigma^2) at x.
inline double norm_pdf(double x, double sigma = 1.0) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// P(|Z| <= s) = 1 - 2*Phi(-s) for a standard normal Z.
/// The erf form avoids the cancellation of 1 - 2*Phi(-s) for small s.
inline double gauss_central_prob(double s) {
  return std::erf(s / std::numbers::sqrt2);
}

}  // namespace langevin
