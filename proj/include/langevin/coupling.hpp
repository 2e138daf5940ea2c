#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "langevin/potentials.hpp"
#include "langevin/rng.hpp"
#include "langevin/schedules.hpp"

namespace langevin {

/// Inhomogeneous Gaussian functional autoregressive chain
/// X_{k+1} = h_{k+1}(X_k) + sigma_{k+1} Z_{k+1}, with h_k being
/// (1 - deficit_k)-Lipschitz. Maps are indexed by the step k >= 1.
struct ARCouplingSpec {
  int dim = 1;
  std::function<Eigen::VectorXd(std::int64_t, const Eigen::VectorXd&)> map;  // h_k
  std::function<double(std::int64_t)> deficit;                               // varpi_k
  std::function<double(std::int64_t)> noise_scale;                           // sigma_k > 0
};

struct CoupledPair {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  bool coupled = false;  // exact equality by construction, not a threshold
};

/// One step of the maximal reflection-type coupling: both marginals follow
/// the AR transition law; the chains coalesce with the maximal one-step
/// probability 2*Phi(-|h_k(y)-h_k(x)|/(2 sigma_k)), otherwise the second
/// chain receives the mirrored noise.
CoupledPair coupling_step(const ARCouplingSpec& spec, std::int64_t k, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y, RngStream& rng);

/// Xi_{k1,k2} = sum_{i=k1}^{k2} sigma_i^2 prod_{j=k1}^{i} (1-varpi_j)^{-2};
/// 0 for an empty range.
double xi(const ARCouplingSpec& spec, std::int64_t k1, std::int64_t k2);

/// TV bound 1 - 2*Phi(-|x-y| / (2 sqrt(Xi_{1,n}))); 0 on the diagonal.
double tv_bound_ar(const ARCouplingSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, std::int64_t n);

struct FractionEstimate {
  double fraction = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of P(X_n != Y_n) under the coupling, with binomial
/// standard error. Replica r runs on stream seed ^ r.
FractionEstimate simulate_uncoupled_fraction(const ARCouplingSpec& spec,
                                             const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                             std::int64_t n, std::int64_t reps,
                                             std::uint64_t seed, int threads = 0);

/// Wraps ULA as a functional AR chain: h_k(x) = x - gamma_k grad U(x),
/// 1 - varpi_k = (1 - kappa gamma_k)^(1/2), sigma_k = sqrt(2 gamma_k).
ARCouplingSpec ula_as_ar_spec(const Potential& potential, const StepSchedule& schedule,
                              std::int64_t horizon);

}  // namespace langevin
