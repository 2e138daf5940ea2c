#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "langevin/potentials.hpp"
#include "langevin/rng.hpp"
#include "langevin/schedules.hpp"

namespace langevin {

struct ChainState {
  Eigen::VectorXd position;
  std::int64_t step_index = 0;
};

enum class Algo { Ula, Mala };

/// Trajectory summary. acceptance_rate is 1 for ULA; for MALA it is measured
/// over the post-burn-in steps (over all steps when burn_in = 0).
struct ChainRun {
  ChainState final_state;
  std::int64_t n_steps = 0;
  std::int64_t burn_in = 0;
  double acceptance_rate = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> functional_stream;  // f(X_k) for k in (N, N+n], optional
};

/// One Euler step x' = x - gamma * grad U(x) + sqrt(2 gamma) * noise.
ChainState ula_step(const ChainState& state, const Potential& potential, double gamma,
                    const Eigen::VectorXd& noise);

struct MalaStep {
  ChainState state;
  bool accepted = false;
};

/// log of pi(y) q(y,x) / (pi(x) q(x,y)) for the Euler proposal kernel q; the
/// acceptance probability is exp(min(0, log_ratio)).
double mala_log_ratio(const Potential& potential, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y, double gamma);

/// ULA proposal corrected by a Metropolis-Hastings accept/reject step; the
/// rejected state keeps its position with the step index advanced.
MalaStep mala_step(const ChainState& state, const Potential& potential, double gamma,
                   RngStream& rng);

using Functional = std::function<double(const Eigen::VectorXd&)>;

/// Runs burn_in + n steps from `start` (default: the potential's minimizer).
/// Deterministic given (seed, config); streams f(X_k) for the n post-burn-in
/// states when f is supplied. Aborts with the last finite step index when the
/// chain diverges.
ChainRun run_chain(const Potential& potential, const StepSchedule& schedule, Algo algo,
                   std::int64_t n, std::int64_t burn_in, std::uint64_t seed,
                   const Functional& functional = {},
                   const std::optional<Eigen::VectorXd>& start = {});

/// Burn-in defaults matching the experiment protocol: ceil(sqrt(n)) for
/// constant steps, ceil(log(n)) for decreasing ones.
std::int64_t default_burn_in(const StepSchedule& schedule, std::int64_t n);

/// Advances two ULA chains with the same Gaussian increment. Requires
/// gamma <= 2/(m+L); the shared noise makes |x'-y'| <= (1-kappa*gamma)^(1/2)
/// |x-y| hold pathwise.
std::pair<Eigen::VectorXd, Eigen::VectorXd> synchronous_pair_step(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Potential& potential, double gamma,
    const Eigen::VectorXd& shared_noise);

}  // namespace langevin
