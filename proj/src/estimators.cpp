#include "langevin/estimators.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

void validate(const WeightedEstimatorConfig& config) {
  if (config.burn_in < 0) throw invalid_parameter("estimator: burn-in must be >= 0");
  if (config.length < 1) throw invalid_parameter("estimator: length must be >= 1");
  if (!(config.osc >= 0.0)) throw invalid_parameter("estimator: osc must be >= 0");
}

void require_lambda_admissible(const WeightedEstimatorConfig& config, double kappa) {
  if (kappa * config.schedule.first() >= 1.0) {
    throw invalid_parameter("estimator: kappa*gamma_1 must stay below 1");
  }
}

// Prefix sums S_j = sum_{i<=j} log(1 - kappa gamma_i); Lambda_{a,b} =
// expm1(S_{a-1} - S_b) / kappa follows in O(1) per query.
std::vector<double> log_product_prefix(const StepSchedule& schedule, double kappa,
                                       std::int64_t up_to) {
  std::vector<double> s(static_cast<std::size_t>(up_to) + 1, 0.0);
  for (std::int64_t j = 1; j <= up_to; ++j) {
    s[static_cast<std::size_t>(j)] =
        s[static_cast<std::size_t>(j - 1)] + std::log1p(-kappa * schedule.gamma(j));
  }
  return s;
}

// The two u-functionals share everything except the 4*pi vs pi normalizer of
// the burn-in term.
double u_functional(const WeightedEstimatorConfig& config, double kappa,
                    double tail_normalizer) {
  validate(config);
  require_lambda_admissible(config, kappa);
  const std::int64_t big_n = config.burn_in;
  const std::int64_t n = config.length;
  const double norm = config.schedule.sum(big_n + 2, big_n + n + 1);
  const double pi = std::numbers::pi;

  if (config.schedule.is_constant()) {
    const double gamma = config.schedule.first();
    const double log_q = std::log1p(-kappa * gamma);
    // g(len) = 1/sqrt(pi * Lambda(len)) with Lambda(len) = expm1(-len log q)/kappa.
    double inner_sq_sum = 0.0;  // sum over k of { sum_i w_i g }^2 * n^2 ... accumulated as G(M)^2
    double g_prefix = 0.0;
    double tail_sum = 0.0;
    inner_sq_sum += g_prefix * g_prefix;  // M = 0 (empty inner sum)
    for (std::int64_t len = 1; len <= n; ++len) {
      const double lambda = std::expm1(-static_cast<double>(len) * log_q) / kappa;
      g_prefix += 1.0 / std::sqrt(pi * lambda);
      if (len <= n - 1) inner_sq_sum += g_prefix * g_prefix;
      tail_sum += 1.0 / std::sqrt(tail_normalizer * pi * lambda);
    }
    const double w = gamma / norm;
    return gamma * w * w * inner_sq_sum + (w * tail_sum) * (w * tail_sum) / kappa;
  }

  const auto s = log_product_prefix(config.schedule, kappa, big_n + n);
  auto lambda = [&](std::int64_t a, std::int64_t b) {
    return std::expm1(s[static_cast<std::size_t>(a - 1)] - s[static_cast<std::size_t>(b)]) /
           kappa;
  };
  auto weight = [&](std::int64_t i) { return config.schedule.gamma(i + 1) / norm; };

  double total = 0.0;
  for (std::int64_t k = big_n; k <= big_n + n - 1; ++k) {
    double inner = 0.0;
    for (std::int64_t i = k + 2; i <= big_n + n; ++i) {
      inner += weight(i) / std::sqrt(pi * lambda(k + 2, i));
    }
    total += config.schedule.gamma(k + 1) * inner * inner;
  }
  double tail = 0.0;
  for (std::int64_t i = big_n + 1; i <= big_n + n; ++i) {
    tail += weight(i) / std::sqrt(tail_normalizer * pi * lambda(big_n + 1, i));
  }
  return total + tail * tail / kappa;
}

}  // namespace

std::vector<double> weights(const WeightedEstimatorConfig& config) {
  validate(config);
  const double norm = config.schedule.sum(config.burn_in + 2, config.burn_in + config.length + 1);
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(config.length));
  for (std::int64_t k = config.burn_in + 1; k <= config.burn_in + config.length; ++k) {
    w.push_back(config.schedule.gamma(k + 1) / norm);
  }
  return w;
}

double estimate(const ChainRun& run, const WeightedEstimatorConfig& config) {
  validate(config);
  if (static_cast<std::int64_t>(run.functional_stream.size()) != config.length) {
    throw invalid_parameter("estimate: functional stream length " +
                            std::to_string(run.functional_stream.size()) +
                            " does not match config length " + std::to_string(config.length));
  }
  const std::vector<double> w = weights(config);
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double y = w[i] * run.functional_stream[i] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double u4(const WeightedEstimatorConfig& config, double kappa) {
  return u_functional(config, kappa, 4.0);
}

double u5(const WeightedEstimatorConfig& config, double kappa) {
  return u_functional(config, kappa, 1.0);
}

double variance_bound(const WeightedEstimatorConfig& config,
                      const ConvexityConstants& constants) {
  validate(config);
  if (config.schedule.first() > 2.0 / (constants.m + constants.L) * (1.0 + 1e-12)) {
    throw invalid_parameter("variance_bound: gamma_1 exceeds 2/(m+L)");
  }
  const double norm = config.schedule.sum(config.burn_in + 2, config.burn_in + config.length + 1);
  return config.osc * config.osc *
         (2.0 * config.schedule.first() / norm + u4(config, constants.kappa()));
}

double concentration_bound(const WeightedEstimatorConfig& config,
                           const ConvexityConstants& constants, double r) {
  validate(config);
  if (config.osc == 0.0) return r > 0.0 ? 0.0 : 1.0;
  const double norm = config.schedule.sum(config.burn_in + 2, config.burn_in + config.length + 1);
  const double threshold = config.osc / norm;
  if (r <= threshold) return 1.0;
  const double dev = r - threshold;
  const double scale = 2.0 * config.osc * config.osc * u5(config, constants.kappa());
  return std::min(1.0, std::exp(-dev * dev / scale));
}

BoundReport mse_bound(const WeightedEstimatorConfig& config, const ConvexityConstants& constants,
                      int d, double start_dist2, Variant variant) {
  validate(config);
  const std::vector<double> w = weights(config);
  BoundInputs inputs{constants, d, config.schedule, start_dist2};

  // TV bound between the k-step chain law and the target: stationary-law
  // route for constant steps, semigroup + discretization split otherwise.
  auto tv_total = [&](std::int64_t k) -> double {
    if (config.schedule.is_constant()) {
      const double gamma = config.schedule.first();
      return std::min(1.0, tv_kernel_stationary(inputs, gamma, k) +
                               tv_bias(constants, d, gamma, variant).value);
    }
    if (k < 2) return 1.0;
    const double alpha = config.schedule.alpha();
    const double exponent = variant == Variant::Smooth ? alpha / 2.0 : alpha;
    auto back = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(k), exponent)));
    std::int64_t split = k - std::max<std::int64_t>(back, 1);
    split = std::min<std::int64_t>(std::max<std::int64_t>(split, 1), k - 1);
    const double semigroup = tv_semigroup_stationary(constants.m, d, std::sqrt(start_dist2),
                                                     config.schedule.sum(1, k));
    return std::min(1.0, semigroup + tv_discretization(inputs, k, split, variant).value);
  };

  double bias_sq = 0.0;
  for (std::int64_t k = config.burn_in + 1; k <= config.burn_in + config.length; ++k) {
    const double tv = tv_total(k);
    bias_sq += w[static_cast<std::size_t>(k - config.burn_in - 1)] * tv * tv;
  }
  bias_sq *= config.osc * config.osc;
  const double variance = variance_bound(config, constants);

  BoundReport report;
  report.name = "mse_bound";
  report.intermediates["bias_sq"] = bias_sq;
  report.intermediates["variance"] = variance;
  report.value = bias_sq + variance;
  return report;
}

std::vector<double> u4_times_gamma_sweep(const StepSchedule& schedule, double kappa,
                                         std::int64_t n_max, std::int64_t burn_in) {
  if (n_max < 1) throw invalid_parameter("u4 sweep: n_max must be >= 1");
  if (burn_in < 0) throw invalid_parameter("u4 sweep: burn-in must be >= 0");
  if (kappa * schedule.first() >= 1.0) {
    throw invalid_parameter("u4 sweep: kappa*gamma_1 must stay below 1");
  }
  const std::int64_t big_n = burn_in;
  const double pi = std::numbers::pi;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));

  if (schedule.is_constant()) {
    // Everything collapses onto prefix sums over the range length.
    const double gamma = schedule.first();
    const double log_q = std::log1p(-kappa * gamma);
    double g_prefix = 0.0;       // G(M) = sum_{len<=M} g(len)
    double g_sq_running = 0.0;   // sum_{M=0}^{n-1} G(M)^2
    double horizon = 0.0;        // Gamma_{1,n}
    for (std::int64_t n = 1; n <= n_max; ++n) {
      g_sq_running += g_prefix * g_prefix;  // adds M = n-1
      const double lambda = std::expm1(-static_cast<double>(n) * log_q) / kappa;
      g_prefix += 1.0 / std::sqrt(pi * lambda);
      horizon += gamma;
      const double norm = gamma * static_cast<double>(n);
      const double w = gamma / norm;
      // Tail prefix at normalizer 4*pi is half of g_prefix.
      const double tail = 0.5 * g_prefix;
      const double u = gamma * w * w * g_sq_running + (w * tail) * (w * tail) / kappa;
      out.push_back(horizon * u);
    }
    return out;
  }

  std::vector<double> s{0.0};  // prefix log-products
  auto extend_prefix = [&](std::int64_t j) {
    while (static_cast<std::int64_t>(s.size()) <= j) {
      s.push_back(s.back() + std::log1p(-kappa * schedule.gamma(static_cast<std::int64_t>(s.size()))));
    }
  };
  auto lambda = [&](std::int64_t a, std::int64_t b) {
    return std::expm1(s[static_cast<std::size_t>(a - 1)] - s[static_cast<std::size_t>(b)]) / kappa;
  };

  std::vector<double> inner;  // unnormalized inner sums, slot k - big_n
  double tail = 0.0;          // unnormalized burn-in sum
  double norm = 0.0;          // Gamma_{N+2, N+n+1}
  double horizon = schedule.sum(1, big_n);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const std::int64_t top = big_n + n;
    extend_prefix(top);
    const double g_top = schedule.gamma(top + 1);
    for (std::int64_t k = big_n; k <= top - 2; ++k) {
      inner[static_cast<std::size_t>(k - big_n)] +=
          g_top / std::sqrt(pi * lambda(k + 2, top));
    }
    inner.push_back(0.0);  // slot for k = top - 1
    tail += g_top / std::sqrt(4.0 * pi * lambda(big_n + 1, top));
    norm += g_top;
    horizon += schedule.gamma(big_n + n);

    double total = 0.0;
    for (std::int64_t k = big_n; k <= top - 1; ++k) {
      const double a = inner[static_cast<std::size_t>(k - big_n)];
      total += schedule.gamma(k + 1) * a * a;
    }
    const double u = (total + tail * tail / kappa) / (norm * norm);
    out.push_back(horizon * u);
  }
  return out;
}

}  // namespace langevin
