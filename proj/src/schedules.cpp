#include "langevin/schedules.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "langevin/errors.hpp"

namespace langevin {

StepSchedule::StepSchedule(ScheduleKind kind, double gamma1, double alpha,
                           std::optional<double> cap)
    : kind_(kind), gamma1_(gamma1), alpha_(alpha), cap_(cap) {
  if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) {
    throw invalid_parameter("step schedule: gamma1 must be positive, got " +
                            std::to_string(gamma1));
  }
  if (cap_ && gamma1_ > *cap_) {
    throw invalid_parameter("step schedule: gamma1 = " + std::to_string(gamma1_) +
                            " exceeds cap " + std::to_string(*cap_));
  }
}

StepSchedule StepSchedule::constant(double gamma, std::optional<double> cap) {
  return StepSchedule(ScheduleKind::Constant, gamma, 0.0, cap);
}

StepSchedule StepSchedule::polynomial(double gamma1, double alpha, std::optional<double> cap) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw invalid_parameter("step schedule: alpha must lie in (0,1], got " +
                            std::to_string(alpha));
  }
  return StepSchedule(ScheduleKind::Polynomial, gamma1, alpha, cap);
}

double StepSchedule::gamma(std::int64_t k) const {
  if (k < 1) throw invalid_parameter("step index must be >= 1, got " + std::to_string(k));
  if (kind_ == ScheduleKind::Constant) return gamma1_;
  return gamma1_ * std::pow(static_cast<double>(k), -alpha_);
}

double StepSchedule::sum(std::int64_t n, std::int64_t l) const {
  if (n < 1) throw invalid_parameter("partial sum start must be >= 1");
  if (l < n) return 0.0;
  if (kind_ == ScheduleKind::Constant) return gamma1_ * static_cast<double>(l - n + 1);
  // Compensated accumulation: million-term sums of k^-alpha would otherwise
  // drift at the 1e-10 level.
  double s = 0.0, c = 0.0;
  for (std::int64_t k = n; k <= l; ++k) {
    const double y = gamma(k) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double StepSchedule::contraction_product(double rate, std::int64_t n, std::int64_t l) const {
  if (n < 1) throw invalid_parameter("product start must be >= 1");
  if (l < n) return 1.0;
  const double worst = 1.0 - rate * gamma(n);  // smallest factor: gamma is nonincreasing
  if (worst < 0.0) {
    throw invalid_parameter("contraction product: rate*gamma_" + std::to_string(n) +
                            " exceeds 1 (factor " + std::to_string(worst) + " < 0)");
  }
  if (kind_ == ScheduleKind::Constant) {
    if (worst == 0.0) return 0.0;
    return std::pow(worst, static_cast<double>(l - n + 1));
  }
  if (worst < 1e-3) {
    // Log-space keeps horizons of 1e6 steps from underflowing mid-product.
    return std::exp(log_contraction_product(rate, n, l));
  }
  double p = 1.0;
  for (std::int64_t k = n; k <= l; ++k) p *= 1.0 - rate * gamma(k);
  return p;
}

double StepSchedule::log_contraction_product(double rate, std::int64_t n, std::int64_t l) const {
  if (n < 1) throw invalid_parameter("product start must be >= 1");
  if (l < n) return 0.0;
  const double worst = 1.0 - rate * gamma(n);
  if (worst < 0.0) {
    throw invalid_parameter("contraction product: rate*gamma_" + std::to_string(n) +
                            " exceeds 1");
  }
  if (kind_ == ScheduleKind::Constant) {
    if (worst == 0.0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(l - n + 1) * std::log1p(-rate * gamma1_);
  }
  double s = 0.0, c = 0.0;
  for (std::int64_t k = n; k <= l; ++k) {
    const double f = -rate * gamma(k);
    if (f <= -1.0) return -std::numeric_limits<double>::infinity();
    const double y = std::log1p(f) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace langevin
