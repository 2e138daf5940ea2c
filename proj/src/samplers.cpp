#include "langevin/samplers.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

constexpr double kDivergenceRadius = 1e10;

void check_finite(const Eigen::VectorXd& x, std::int64_t step) {
  if (!x.allFinite() || x.norm() > kDivergenceRadius) {
    throw numeric_error("chain diverged at step " + std::to_string(step) +
                        " (last finite step " + std::to_string(step - 1) + ")");
  }
}

}  // namespace

ChainState ula_step(const ChainState& state, const Potential& potential, double gamma,
                    const Eigen::VectorXd& noise) {
  if (!(gamma > 0.0)) throw invalid_parameter("ula_step: gamma must be positive");
  ChainState next;
  next.position = state.position - gamma * potential.gradient(state.position) +
                  std::sqrt(2.0 * gamma) * noise;
  next.step_index = state.step_index + 1;
  check_finite(next.position, next.step_index);
  return next;
}

double mala_log_ratio(const Potential& potential, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y, double gamma) {
  if (!(gamma > 0.0)) throw invalid_parameter("mala_log_ratio: gamma must be positive");
  const double forward = (y - x + gamma * potential.gradient(x)).squaredNorm();
  const double backward = (x - y + gamma * potential.gradient(y)).squaredNorm();
  return potential.value(x) - potential.value(y) + (forward - backward) / (4.0 * gamma);
}

MalaStep mala_step(const ChainState& state, const Potential& potential, double gamma,
                   RngStream& rng) {
  if (!(gamma > 0.0)) throw invalid_parameter("mala_step: gamma must be positive");
  const Eigen::VectorXd& x = state.position;
  const Eigen::VectorXd grad_x = potential.gradient(x);
  const Eigen::VectorXd y =
      x - gamma * grad_x + std::sqrt(2.0 * gamma) * rng.normal_vector(x.size());
  const double log_ratio = mala_log_ratio(potential, x, y, gamma);
  if (!std::isfinite(log_ratio)) {
    throw numeric_error("mala_step: non-finite acceptance log-ratio at step " +
                        std::to_string(state.step_index));
  }
  MalaStep out;
  out.accepted = std::log(rng.uniform()) < log_ratio;
  out.state.position = out.accepted ? y : x;
  out.state.step_index = state.step_index + 1;
  if (out.accepted) check_finite(out.state.position, out.state.step_index);
  return out;
}

std::int64_t default_burn_in(const StepSchedule& schedule, std::int64_t n) {
  if (schedule.is_constant()) {
    return static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  }
  return static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(std::max<std::int64_t>(n, 2)))));
}

ChainRun run_chain(const Potential& potential, const StepSchedule& schedule, Algo algo,
                   std::int64_t n, std::int64_t burn_in, std::uint64_t seed,
                   const Functional& functional, const std::optional<Eigen::VectorXd>& start) {
  if (n < 1) throw invalid_parameter("run_chain: n must be >= 1");
  if (burn_in < 0) throw invalid_parameter("run_chain: burn-in must be >= 0");
  // ULA stays well defined beyond the analysis thresholds, so oversized steps
  // warn rather than error; divergence is caught by the runtime guard.
  const double contraction_cap = 2.0 / (potential.constants().m + potential.constants().L);
  if (algo == Algo::Ula && schedule.first() > contraction_cap) {
    std::cerr << "warning: gamma1 = " << schedule.first() << " exceeds 2/(m+L) = "
              << contraction_cap << "; contraction guarantees do not apply\n";
  } else if (algo == Algo::Ula && schedule.first() > contraction_cap / 2.0) {
    std::cerr << "warning: gamma1 = " << schedule.first() << " exceeds 1/(m+L) = "
              << contraction_cap / 2.0 << "; discretization bounds do not apply\n";
  }

  RngStream rng(seed);
  ChainState state;
  state.position = start ? *start : potential.start_point();
  state.step_index = 0;
  if (state.position.size() != potential.dim()) {
    throw invalid_parameter("run_chain: start point dimension mismatch");
  }

  ChainRun run;
  run.burn_in = burn_in;
  run.n_steps = n;
  run.seed = seed;
  if (functional) run.functional_stream.reserve(static_cast<std::size_t>(n));

  std::int64_t accepted = 0, counted = 0;
  const std::int64_t total = burn_in + n;

  if (algo == Algo::Ula) {
    for (std::int64_t k = 1; k <= total; ++k) {
      state = ula_step(state, potential, schedule.gamma(k),
                       rng.normal_vector(potential.dim()));
      if (functional && k > burn_in) run.functional_stream.push_back(functional(state.position));
    }
    run.acceptance_rate = 1.0;
  } else {
    // Cache U and grad U of the current point: MALA costs one fresh value and
    // gradient per step instead of two.
    double value_x = potential.value(state.position);
    Eigen::VectorXd grad_x = potential.gradient(state.position);
    for (std::int64_t k = 1; k <= total; ++k) {
      const double gamma = schedule.gamma(k);
      const Eigen::VectorXd y = state.position - gamma * grad_x +
                                std::sqrt(2.0 * gamma) * rng.normal_vector(potential.dim());
      const double value_y = potential.value(y);
      const Eigen::VectorXd grad_y = potential.gradient(y);
      const double forward = (y - state.position + gamma * grad_x).squaredNorm();
      const double backward = (state.position - y + gamma * grad_y).squaredNorm();
      const double log_ratio = value_x - value_y + (forward - backward) / (4.0 * gamma);
      if (!std::isfinite(log_ratio)) {
        throw numeric_error("run_chain: non-finite MALA log-ratio at step " + std::to_string(k));
      }
      const bool accept = std::log(rng.uniform()) < log_ratio;
      if (accept) {
        state.position = y;
        value_x = value_y;
        grad_x = grad_y;
        check_finite(state.position, k);
      }
      state.step_index = k;
      if (k > burn_in) {
        counted += 1;
        accepted += accept ? 1 : 0;
      }
      if (functional && k > burn_in) run.functional_stream.push_back(functional(state.position));
    }
    run.acceptance_rate = counted > 0 ? static_cast<double>(accepted) / counted : 0.0;
  }

  run.final_state = state;
  return run;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> synchronous_pair_step(
    const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Potential& potential, double gamma,
    const Eigen::VectorXd& shared_noise) {
  const double admissible = 2.0 / (potential.constants().m + potential.constants().L);
  if (!(gamma > 0.0) || gamma > admissible) {
    throw invalid_parameter("synchronous_pair_step: gamma must lie in (0, 2/(m+L)]");
  }
  const double scale = std::sqrt(2.0 * gamma);
  return {x - gamma * potential.gradient(x) + scale * shared_noise,
          y - gamma * potential.gradient(y) + scale * shared_noise};
}

}  // namespace langevin
