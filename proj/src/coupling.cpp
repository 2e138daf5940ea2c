#include "langevin/coupling.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "langevin/errors.hpp"
#include "langevin/normal.hpp"
#include "langevin/parallel.hpp"

namespace langevin {

CoupledPair coupling_step(const ARCouplingSpec& spec, std::int64_t k, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y, RngStream& rng) {
  const double sigma = spec.noise_scale(k);
  if (!(sigma > 0.0)) throw invalid_parameter("coupling_step: noise scale must be positive");
  const Eigen::VectorXd hx = spec.map(k, x);
  const Eigen::VectorXd hy = spec.map(k, y);
  const Eigen::VectorXd gap = hy - hx;  // E_k(x, y)
  const Eigen::VectorXd noise = sigma * rng.normal_vector(spec.dim);

  CoupledPair out;
  out.x = hx + noise;
  const double gap_norm = gap.norm();
  if (gap_norm == 0.0) {
    // Synchronous branch: identical noise keeps (and creates) coalescence.
    out.y = hy + noise;
    out.coupled = true;
    return out;
  }
  const Eigen::VectorXd e = gap / gap_norm;
  const double along = e.dot(noise);
  // log alpha = (<e,z>^2 - (|E| - <e,z>)^2) / (2 sigma^2); the density ratio
  // itself overflows for large |E|/sigma.
  const double log_alpha =
      (along * along - (gap_norm - along) * (gap_norm - along)) / (2.0 * sigma * sigma);
  if (std::log(rng.uniform()) <= log_alpha) {
    out.y = out.x;
    out.coupled = true;
  } else {
    out.y = hy + noise - 2.0 * along * e;  // reflected noise
    out.coupled = false;
  }
  return out;
}

double xi(const ARCouplingSpec& spec, std::int64_t k1, std::int64_t k2) {
  if (k1 < 1) throw invalid_parameter("xi: start index must be >= 1");
  double total = 0.0;
  double inv_sq = 1.0;  // prod_{j=k1}^{i} (1-varpi_j)^{-2}
  for (std::int64_t i = k1; i <= k2; ++i) {
    const double lip = 1.0 - spec.deficit(i);
    if (!(lip > 0.0)) {
      throw invalid_parameter("xi: deficit at step " + std::to_string(i) + " must be < 1");
    }
    inv_sq /= lip * lip;
    const double sigma = spec.noise_scale(i);
    total += sigma * sigma * inv_sq;
  }
  return total;
}

double tv_bound_ar(const ARCouplingSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, std::int64_t n) {
  if (n < 1) throw invalid_parameter("tv_bound_ar: n must be >= 1");
  if (x == y) return 0.0;
  return gauss_central_prob((x - y).norm() / (2.0 * std::sqrt(xi(spec, 1, n))));
}

FractionEstimate simulate_uncoupled_fraction(const ARCouplingSpec& spec,
                                             const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                             std::int64_t n, std::int64_t reps,
                                             std::uint64_t seed, int threads) {
  if (reps < 1) throw invalid_parameter("simulate_uncoupled_fraction: reps must be >= 1");
  if (n < 1) throw invalid_parameter("simulate_uncoupled_fraction: n must be >= 1");
  std::atomic<std::int64_t> uncoupled{0};
  parallel_for(reps, threads, [&](std::int64_t r) {
    RngStream rng(seed ^ static_cast<std::uint64_t>(r));
    CoupledPair pair{x, y, x == y};
    for (std::int64_t k = 1; k <= n && !pair.coupled; ++k) {
      pair = coupling_step(spec, k, pair.x, pair.y, rng);
    }
    if (!pair.coupled) uncoupled.fetch_add(1, std::memory_order_relaxed);
  });
  FractionEstimate est;
  est.fraction = static_cast<double>(uncoupled.load()) / static_cast<double>(reps);
  est.std_error =
      std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(reps));
  return est;
}

ARCouplingSpec ula_as_ar_spec(const Potential& potential, const StepSchedule& schedule,
                              std::int64_t horizon) {
  const ConvexityConstants& c = potential.constants();
  if (schedule.first() > 2.0 / (c.m + c.L) * (1.0 + 1e-12)) {
    throw invalid_parameter("ula_as_ar_spec: gamma_1 exceeds 2/(m+L)");
  }
  if (horizon < 1) throw invalid_parameter("ula_as_ar_spec: horizon must be >= 1");
  const double kappa = c.kappa();
  ARCouplingSpec spec;
  spec.dim = potential.dim();
  spec.map = [potential, schedule](std::int64_t k, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - schedule.gamma(k) * potential.gradient(v);
  };
  spec.deficit = [schedule, kappa](std::int64_t k) {
    return 1.0 - std::sqrt(1.0 - kappa * schedule.gamma(k));
  };
  spec.noise_scale = [schedule](std::int64_t k) { return std::sqrt(2.0 * schedule.gamma(k)); };
  return spec;
}

}  // namespace langevin
