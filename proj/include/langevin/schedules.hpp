#pragma once

#include <cstdint>
#include <optional>

namespace langevin {

enum class ScheduleKind { Constant, Polynomial };

/// Nonincreasing step-size sequence: either gamma_k = gamma, or
/// gamma_k = gamma1 * k^(-alpha) with alpha in (0, 1]. Immutable value type;
/// all queries are pure.
class StepSchedule {
 public:
  static StepSchedule constant(double gamma, std::optional<double> cap = {});
  static StepSchedule polynomial(double gamma1, double alpha, std::optional<double> cap = {});

  ScheduleKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == ScheduleKind::Constant; }
  double first() const { return gamma1_; }
  double alpha() const { return alpha_; }
  const std::optional<double>& cap() const { return cap_; }

  /// gamma_k, k >= 1.
  double gamma(std::int64_t k) const;

  /// Partial sum sum_{k=n}^{l} gamma_k; 0 when l < n (empty-sum convention).
  double sum(std::int64_t n, std::int64_t l) const;

  /// prod_{k=n}^{l} (1 - rate*gamma_k); 1 when l < n (empty-product
  /// convention). Requires rate*gamma_n <= 1 so every factor is nonnegative.
  double contraction_product(double rate, std::int64_t n, std::int64_t l) const;

  /// sum_{k=n}^{l} log(1 - rate*gamma_k); -inf when a factor is 0.
  /// Same admissibility requirement as contraction_product.
  double log_contraction_product(double rate, std::int64_t n, std::int64_t l) const;

 private:
  StepSchedule(ScheduleKind kind, double gamma1, double alpha, std::optional<double> cap);

  ScheduleKind kind_;
  double gamma1_;
  double alpha_;
  std::optional<double> cap_;
};

}  // namespace langevin
