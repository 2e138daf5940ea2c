#pragma once

#include <cstdint>
#include <vector>

#include "langevin/bounds.hpp"
#include "langevin/samplers.hpp"
#include "langevin/schedules.hpp"

namespace langevin {

/// Configuration of the weighted empirical-measure estimator
/// pi_hat = sum_{k=N+1}^{N+n} w_k f(X_k), w_k = gamma_{k+1} / Gamma_{N+2,N+n+1}.
struct WeightedEstimatorConfig {
  std::int64_t burn_in = 0;  // N
  std::int64_t length = 1;   // n
  StepSchedule schedule;
  double osc = 1.0;  // oscillation sup |f(x)-f(y)| of the functional
};

/// The weights w_{N+1}..w_{N+n}; they sum to 1 up to rounding.
std::vector<double> weights(const WeightedEstimatorConfig& config);

/// Weighted average of the run's recorded functional values.
double estimate(const ChainRun& run, const WeightedEstimatorConfig& config);

/// u4 / u5 variance functionals (kappa-dependent, dimension-free).
double u4(const WeightedEstimatorConfig& config, double kappa);
double u5(const WeightedEstimatorConfig& config, double kappa);

/// Variance bound osc^2 { 2 gamma_1 / Gamma_{N+2,N+n+1} + u4 }.
double variance_bound(const WeightedEstimatorConfig& config, const ConvexityConstants& constants);

/// Gaussian deviation bound for P(pi_hat >= E[pi_hat] + r); returns 1 at or
/// below the threshold r = osc / Gamma_{N+2,N+n+1}.
double concentration_bound(const WeightedEstimatorConfig& config,
                           const ConvexityConstants& constants, double r);

/// Squared bias (assembled from the TV bounds per chain index) plus the
/// variance bound; intermediates expose both parts.
BoundReport mse_bound(const WeightedEstimatorConfig& config, const ConvexityConstants& constants,
                      int d, double start_dist2, Variant variant);

/// Gamma_n * u4_{0,n} for n = 1..n_max in one incremental sweep (the shape of
/// the variance functional along the horizon).
std::vector<double> u4_times_gamma_sweep(const StepSchedule& schedule, double kappa,
                                         std::int64_t n_max, std::int64_t burn_in = 0);

}  // namespace langevin
