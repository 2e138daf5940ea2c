#include "langevin/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "langevin/errors.hpp"
#include "langevin/normal.hpp"

namespace langevin {

namespace {

constexpr double kInvSqrt4Pi = 0.28209479177387814;  // (4*pi)^(-1/2)

void validate_inputs(const BoundInputs& in) {
  if (in.dim < 1) throw invalid_parameter("bound inputs: dim must be >= 1");
  if (!(in.start_dist2 >= 0.0)) throw invalid_parameter("bound inputs: start_dist2 must be >= 0");
  if (!(in.constants.m > 0.0) || in.constants.m > in.constants.L) {
    throw invalid_parameter("bound inputs: constants must satisfy 0 < m <= L");
  }
}

void require_step(const BoundInputs& in, double max_first, const char* what) {
  if (in.schedule.first() > max_first * (1.0 + 1e-12)) {
    throw invalid_parameter(std::string(what) + ": gamma_1 = " +
                            std::to_string(in.schedule.first()) + " exceeds " +
                            std::to_string(max_first));
  }
}

double require_hessian_lipschitz(const ConvexityConstants& c, const char* what) {
  if (!c.hessian_lipschitz) {
    throw invalid_parameter(std::string(what) +
                            ": Smooth variant needs the Hessian Lipschitz constant");
  }
  return *c.hessian_lipschitz;
}

double rho_from_product(const BoundInputs& in, double product) {
  const double kappa = in.constants.kappa();
  const double inner =
      in.rho_reading == RhoReading::Verbatim ? 1.0 - product / kappa : 1.0 - product;
  return product * in.start_dist2 + 2.0 * in.dim / kappa * inner;
}

// Shared accumulation for u2 / u3 / vartheta-style sums: iterates i = n..1
// with the tail product prod_{k=i+1}^{n} (1 - kappa gamma_k / 2) maintained
// backwards and compensated summation.
template <typename TermFn>
double tail_weighted_sum(const StepSchedule& schedule, double kappa, std::int64_t n,
                         TermFn term) {
  double sum = 0.0, comp = 0.0, tail = 1.0;
  for (std::int64_t i = n; i >= 1; --i) {
    const double y = term(i) * tail - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    tail *= 1.0 - kappa * schedule.gamma(i) / 2.0;
  }
  return sum;
}

}  // namespace

double drift_rho(const BoundInputs& inputs, std::int64_t n, std::int64_t l) {
  validate_inputs(inputs);
  const ConvexityConstants& c = inputs.constants;
  require_step(inputs, 2.0 / (c.m + c.L), "drift_rho");
  return rho_from_product(inputs, inputs.schedule.contraction_product(c.kappa(), n, l));
}

double w2_contraction(const BoundInputs& inputs, double distance2, std::int64_t n,
                      std::int64_t l) {
  validate_inputs(inputs);
  if (!(distance2 >= 0.0)) throw invalid_parameter("w2_contraction: distance2 must be >= 0");
  const ConvexityConstants& c = inputs.constants;
  require_step(inputs, 2.0 / (c.m + c.L), "w2_contraction");
  return std::sqrt(inputs.schedule.contraction_product(c.kappa(), n, l) * distance2);
}

double w2_stationary_contraction(const BoundInputs& inputs, double gamma, std::int64_t n) {
  validate_inputs(inputs);
  const ConvexityConstants& c = inputs.constants;
  if (!(gamma > 0.0) || gamma >= 2.0 / (c.m + c.L)) {
    throw invalid_parameter("w2_stationary_contraction: gamma must lie in (0, 2/(m+L))");
  }
  if (n < 0) throw invalid_parameter("w2_stationary_contraction: n must be >= 0");
  const double kappa = c.kappa();
  return std::pow(1.0 - kappa * gamma, 0.5 * static_cast<double>(n)) *
         std::sqrt(inputs.start_dist2 + 2.0 * inputs.dim / kappa);
}

BoundReport w2_discretization(const BoundInputs& inputs, std::int64_t n, Variant variant) {
  validate_inputs(inputs);
  if (n < 0) throw invalid_parameter("w2_discretization: n must be >= 0");
  const ConvexityConstants& c = inputs.constants;
  require_step(inputs, 1.0 / (c.m + c.L), "w2_discretization");
  const double kappa = c.kappa();
  const double L2 = c.L * c.L;
  const double d = inputs.dim;

  const double u1 = 2.0 * inputs.schedule.contraction_product(kappa / 2.0, 1, n);

  BoundReport report;
  report.intermediates["u1"] = u1;
  if (variant == Variant::Basic) {
    const double u2 = L2 * tail_weighted_sum(inputs.schedule, kappa, n, [&](std::int64_t i) {
      const double g = inputs.schedule.gamma(i);
      return g * g * (1.0 / kappa + g) * (2.0 * d + d * L2 * g / c.m + d * L2 * g * g / 6.0);
    });
    report.name = "w2_discretization/basic";
    report.intermediates["u2"] = u2;
    report.value = u1 * (inputs.start_dist2 + d / c.m) + u2;
  } else {
    const double lt = require_hessian_lipschitz(c, "w2_discretization");
    const double L4 = L2 * L2;
    const double u3 = tail_weighted_sum(inputs.schedule, kappa, n, [&](std::int64_t i) {
      const double g = inputs.schedule.gamma(i);
      return d * g * g * g *
             (2.0 * L2 + (d * lt * lt / 3.0 + g * L4 + 4.0 * L4 / (3.0 * c.m)) / kappa +
              g * L4 * (g / 6.0 + 1.0 / c.m));
    });
    report.name = "w2_discretization/smooth";
    report.intermediates["u3"] = u3;
    report.value = u1 * (inputs.start_dist2 + d / c.m) + u3;
  }
  return report;
}

double w2_bias(const ConvexityConstants& c, int d, double gamma, Variant variant) {
  if (d < 1) throw invalid_parameter("w2_bias: d must be >= 1");
  if (!(gamma > 0.0) || gamma > (1.0 + 1e-12) / (c.m + c.L)) {
    throw invalid_parameter("w2_bias: gamma must lie in (0, 1/(m+L)]");
  }
  const double kappa = c.kappa();
  const double L2 = c.L * c.L;
  if (variant == Variant::Basic) {
    return 2.0 / kappa * L2 * gamma * (1.0 / kappa + gamma) *
           (2.0 * d + d * L2 * gamma / c.m + d * L2 * gamma * gamma / 6.0);
  }
  const double lt = require_hessian_lipschitz(c, "w2_bias");
  const double L4 = L2 * L2;
  return 2.0 / kappa * d * gamma * gamma *
         (2.0 * L2 + (d * lt * lt / 3.0 + gamma * L4 + 4.0 * L4 / (3.0 * c.m)) / kappa +
          gamma * L4 * (gamma / 6.0 + 1.0 / c.m));
}

double chi_m(double m, double t) {
  if (!(m > 0.0)) throw invalid_parameter("chi_m: m must be positive");
  if (!(t > 0.0)) throw invalid_parameter("chi_m: t must be positive");
  return std::sqrt(4.0 / m * std::expm1(2.0 * m * t));
}

double tv_semigroup_two_points(double m, double distance, double t) {
  if (!(distance >= 0.0)) throw invalid_parameter("tv_semigroup: distance must be >= 0");
  return gauss_central_prob(distance / chi_m(m, t));
}

double tv_semigroup_w1(double m, double w1, double t) {
  if (!(m > 0.0) || !(t > 0.0)) throw invalid_parameter("tv_semigroup: m, t must be positive");
  if (!(w1 >= 0.0)) throw invalid_parameter("tv_semigroup: W1 must be >= 0");
  return w1 / std::sqrt(2.0 * std::numbers::pi / m * std::expm1(2.0 * m * t));
}

double tv_semigroup_stationary(double m, int d, double distance_to_min, double t) {
  if (d < 1) throw invalid_parameter("tv_semigroup: d must be >= 1");
  return tv_semigroup_w1(m, std::sqrt(static_cast<double>(d) / m) + distance_to_min, t);
}

double lambda_tv(const BoundInputs& inputs, std::int64_t n, std::int64_t l) {
  validate_inputs(inputs);
  if (l < n) return 0.0;
  const double kappa = inputs.constants.kappa();
  if (kappa * inputs.schedule.gamma(n) >= 1.0) {
    throw invalid_parameter("lambda: kappa*gamma must stay below 1 on the range");
  }
  // expm1 of the negated log-product keeps precision for short ranges and
  // saturates to +inf for very long ones.
  return std::expm1(-inputs.schedule.log_contraction_product(kappa, n, l)) / kappa;
}

double tv_kernel_contraction(const BoundInputs& inputs, double distance, std::int64_t n,
                             std::int64_t l) {
  if (!(distance >= 0.0)) throw invalid_parameter("tv_kernel_contraction: distance must be >= 0");
  if (distance == 0.0) return 0.0;
  require_step(inputs, 2.0 / (inputs.constants.m + inputs.constants.L), "tv_kernel_contraction");
  const double lambda = lambda_tv(inputs, n, l);
  return gauss_central_prob(distance / std::sqrt(8.0 * lambda));
}

double tv_kernel_stationary(const BoundInputs& inputs, double gamma, std::int64_t n) {
  validate_inputs(inputs);
  const ConvexityConstants& c = inputs.constants;
  if (!(gamma > 0.0) || gamma > (2.0 + 1e-12) / (c.m + c.L)) {
    throw invalid_parameter("tv_kernel_stationary: gamma must lie in (0, 2/(m+L)]");
  }
  if (n < 1) throw invalid_parameter("tv_kernel_stationary: n must be >= 1");
  const double kappa = c.kappa();
  const double decay = std::pow(1.0 - kappa * gamma, 0.5 * static_cast<double>(n));
  if (decay >= 1.0) return std::numeric_limits<double>::infinity();
  return decay * (std::sqrt(inputs.start_dist2) + std::sqrt(2.0 * inputs.dim / kappa)) /
         std::sqrt(4.0 * std::numbers::pi * kappa * (1.0 - decay));
}

namespace {

// vartheta_{n,p}(x) per variant; delta_{i,n,p} couples the drift constant to
// the diffusion moment along the elapsed time Gamma_{i-1}.
double vartheta(const BoundInputs& in, std::int64_t n, std::int64_t p, Variant variant) {
  const ConvexityConstants& c = in.constants;
  const double kappa = c.kappa();
  const double L2 = c.L * c.L;
  const double L4 = L2 * L2;
  const double d = in.dim;
  const double rho_np = rho_from_product(in, in.schedule.contraction_product(kappa, n, p));

  std::vector<double> elapsed(static_cast<std::size_t>(n), 0.0);  // Gamma_{i-1}
  double acc = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    elapsed[static_cast<std::size_t>(i - 1)] = acc;
    acc += in.schedule.gamma(i);
  }
  auto delta = [&](std::int64_t i) {
    const double w = std::exp(-2.0 * c.m * elapsed[static_cast<std::size_t>(i - 1)]);
    return w * rho_np + (1.0 - w) * d / c.m;
  };

  if (variant == Variant::Basic) {
    return L2 * tail_weighted_sum(in.schedule, kappa, n, [&](std::int64_t i) {
      const double g = in.schedule.gamma(i);
      return g * g * ((1.0 / kappa + g) * (2.0 * d + d * L2 * g * g / 6.0) +
                      L2 * g * delta(i) * (1.0 / kappa + g));
    });
  }
  const double lt = require_hessian_lipschitz(c, "tv_discretization");
  const double g_next = in.schedule.gamma(n + 1);
  return tail_weighted_sum(in.schedule, kappa, n, [&](std::int64_t i) {
    const double g = in.schedule.gamma(i);
    return g * g * g *
           (L4 * delta(i) * (4.0 / (3.0 * kappa) + g_next) +
            d * (2.0 * L2 + 4.0 / kappa * (d * lt * lt / 12.0 + g_next * L4 / 4.0) +
                 g_next * g_next * L4 / 6.0));
  });
}

BoundReport clamp_tv(BoundReport report) {
  report.intermediates["raw"] = report.value;
  if (report.value > 1.0) {
    report.value = 1.0;
    report.clamped = true;
  }
  return report;
}

}  // namespace

BoundReport tv_discretization(const BoundInputs& inputs, std::int64_t l, std::int64_t n,
                              Variant variant) {
  validate_inputs(inputs);
  if (n < 1 || n >= l) throw invalid_parameter("tv_discretization: need 1 <= n < l");
  const ConvexityConstants& c = inputs.constants;
  require_step(inputs, 1.0 / (c.m + c.L), "tv_discretization");
  const double kappa = c.kappa();
  const double L2 = c.L * c.L;

  const double theta = vartheta(inputs, n, 0, variant);
  const double term_semigroup =
      std::sqrt(theta / (4.0 * std::numbers::pi * inputs.schedule.sum(n + 1, l)));

  // Running product of (1 - kappa gamma_i) gives rho_{1,k-1} in O(1) per term.
  double product = inputs.schedule.contraction_product(kappa, 1, n);
  double euler_sum = 0.0, comp = 0.0;
  for (std::int64_t k = n + 1; k <= l; ++k) {
    const double g = inputs.schedule.gamma(k);
    const double rho = rho_from_product(inputs, product);  // rho_{1,k-1}
    const double y = (g * g * g * L2 / 3.0 * rho + inputs.dim * g * g) - comp;
    const double t = euler_sum + y;
    comp = (t - euler_sum) - y;
    euler_sum = t;
    product *= 1.0 - kappa * g;
  }
  const double term_euler = std::pow(2.0, -1.5) * c.L * std::sqrt(euler_sum);

  BoundReport report;
  report.name = variant == Variant::Basic ? "tv_discretization/basic" : "tv_discretization/smooth";
  report.intermediates["theta"] = theta;
  report.intermediates["term_semigroup"] = term_semigroup;
  report.intermediates["term_euler"] = term_euler;
  report.value = term_semigroup + term_euler;
  return clamp_tv(std::move(report));
}

BoundReport tv_fixed_step_finite(const BoundInputs& inputs, double gamma, std::int64_t l) {
  validate_inputs(inputs);
  const ConvexityConstants& c = inputs.constants;
  if (!(gamma > 0.0) || gamma >= 1.0 / (c.m + c.L)) {
    throw invalid_parameter("tv_fixed_step_finite: gamma must lie in (0, 1/(m+L))");
  }
  const auto block = static_cast<std::int64_t>(std::ceil(1.0 / gamma));
  if (l <= block) {
    throw invalid_parameter("tv_fixed_step_finite: need l > ceil(1/gamma) = " +
                            std::to_string(block));
  }
  const double kappa = c.kappa();
  const double L2 = c.L * c.L;
  const double L4 = L2 * L2;
  const double d = inputs.dim;
  const double s2 = inputs.start_dist2;
  const auto split = static_cast<double>(l - block);

  const double d1 = 2.0 * L2 / kappa * (1.0 / kappa + gamma) * (2.0 * d + L2 * gamma * gamma / 6.0);
  const double d2 = L4 * (1.0 / kappa + gamma);
  const double d3 = split * std::exp(-c.m * gamma * (split - 1.0)) * s2 + 2.0 * d / (kappa * gamma * c.m);
  const double d4 =
      std::pow(2.0, -1.5) * c.L *
      std::sqrt(d * gamma * (1.0 + gamma) +
                L2 * gamma * gamma * gamma / 3.0 *
                    ((1.0 + 1.0 / gamma) * std::pow(1.0 - kappa * gamma, split) * s2 +
                     2.0 * (1.0 + gamma) * d / kappa));

  BoundReport report;
  report.name = "tv_fixed_step_finite";
  report.intermediates["D1"] = d1;
  report.intermediates["D2"] = d2;
  report.intermediates["D3"] = d3;
  report.intermediates["D4"] = d4;
  report.intermediates["split"] = split;
  report.value = kInvSqrt4Pi * std::sqrt(gamma * d1 + gamma * gamma * gamma * d2 * d3) + d4;
  return clamp_tv(std::move(report));
}

BoundReport tv_bias(const ConvexityConstants& c, int d, double gamma, Variant variant) {
  if (d < 1) throw invalid_parameter("tv_bias: d must be >= 1");
  if (!(gamma > 0.0) || gamma > (1.0 + 1e-12) / (c.m + c.L)) {
    throw invalid_parameter("tv_bias: gamma must lie in (0, 1/(m+L)]");
  }
  const double kappa = c.kappa();
  const double L2 = c.L * c.L;
  const double L4 = L2 * L2;
  const double dd = d;

  BoundReport report;
  if (variant == Variant::Basic) {
    const double d1 =
        2.0 * L2 / kappa * (1.0 / kappa + gamma) * (2.0 * dd + L2 * gamma * gamma / 6.0);
    const double d2 = L4 * (1.0 / kappa + gamma);
    const double term_euler =
        std::pow(2.0, -1.5) * c.L *
        std::sqrt(dd * gamma * (1.0 + gamma) +
                  2.0 * L2 * gamma * gamma * gamma / 3.0 * (1.0 + gamma) * dd / kappa);
    const double term_semigroup =
        kInvSqrt4Pi * std::sqrt(gamma * d1 + 2.0 * dd * gamma * gamma * d2 / (kappa * c.m));
    report.name = "tv_bias/basic";
    report.intermediates["D1"] = d1;
    report.intermediates["D2"] = d2;
    report.intermediates["term_euler"] = term_euler;
    report.intermediates["term_semigroup"] = term_semigroup;
    report.value = term_euler + term_semigroup;
  } else {
    const double lt = require_hessian_lipschitz(c, "tv_bias");
    const double e1 = 2.0 * dd / kappa *
                      (2.0 * L2 + 4.0 / kappa * (dd * lt * lt / 12.0 + gamma * L4 / 4.0) +
                       gamma * gamma * L4 / 6.0);
    const double e2 = L4 * (4.0 / (3.0 * kappa) + gamma);
    const double n_gamma =
        std::max(0.0, std::ceil(std::log(1.0 / gamma) / std::numbers::ln2));
    const double g2 = gamma * gamma;
    const double term1 = kInvSqrt4Pi * std::sqrt(g2 * e1 + 2.0 * dd * g2 * e2 / (kappa * c.m));
    const double term2 =
        kInvSqrt4Pi * n_gamma * std::sqrt(g2 * e1 + g2 * e2 * (2.0 * dd / kappa + dd / c.m));
    const double term3 = std::pow(2.0, -1.5) * c.L *
                         std::sqrt(2.0 * dd * gamma * gamma * gamma * L2 / (3.0 * kappa) +
                                   dd * gamma * gamma);
    report.name = "tv_bias/smooth";
    report.intermediates["E1"] = e1;
    report.intermediates["E2"] = e2;
    report.intermediates["n_gamma"] = n_gamma;
    report.intermediates["term1"] = term1;
    report.intermediates["term2"] = term2;
    report.intermediates["term3"] = term3;
    report.value = term1 + term2 + term3;
  }
  return clamp_tv(std::move(report));
}

namespace {

double plan_bias(const ConvexityConstants& c, int d, double gamma, Metric metric,
                 Variant variant) {
  if (metric == Metric::W2) return std::sqrt(w2_bias(c, d, gamma, variant));
  return tv_bias(c, d, gamma, variant).value;
}

double plan_transient(const ConvexityConstants& c, int d, double gamma, std::int64_t n,
                      Metric metric) {
  BoundInputs in{c, d, StepSchedule::constant(gamma), 0.0};
  if (metric == Metric::W2) return w2_stationary_contraction(in, gamma, n);
  return std::min(1.0, tv_kernel_stationary(in, gamma, n));
}

}  // namespace

PlanResult plan(const ConvexityConstants& c, int d, double epsilon, Metric metric,
                Variant variant) {
  if (!(epsilon > 0.0)) throw invalid_parameter("plan: epsilon must be positive");
  if (d < 1) throw invalid_parameter("plan: d must be >= 1");
  const double gamma_max = 1.0 / (c.m + c.L);
  const double target = epsilon / 2.0;

  // Largest step with bias <= epsilon/2, found by bisection; the bias bounds
  // are increasing in gamma.
  double gamma;
  if (plan_bias(c, d, gamma_max, metric, variant) <= target) {
    gamma = gamma_max;
  } else {
    double lo = gamma_max;
    int halvings = 0;
    do {
      lo /= 2.0;
      if (++halvings > 2000) throw numeric_error("plan: epsilon unreachable in gamma search");
    } while (plan_bias(c, d, lo, metric, variant) > target);
    double hi = 2.0 * lo;
    while (hi - lo > 1e-4 * lo) {
      const double mid = 0.5 * (lo + hi);
      (plan_bias(c, d, mid, metric, variant) <= target ? lo : hi) = mid;
    }
    gamma = lo;
  }
  const double bias = plan_bias(c, d, gamma, metric, variant);

  // Smallest n with transient + bias <= epsilon: doubling then bisection.
  std::int64_t hi_n = 1;
  while (plan_transient(c, d, gamma, hi_n, metric) + bias > epsilon) {
    if (hi_n > (std::int64_t{1} << 60)) throw numeric_error("plan: n search diverged");
    hi_n *= 2;
  }
  std::int64_t lo_n = hi_n / 2;  // infeasible or 0
  while (hi_n - lo_n > 1) {
    const std::int64_t mid = lo_n + (hi_n - lo_n) / 2;
    if (mid >= 1 && plan_transient(c, d, gamma, mid, metric) + bias <= epsilon) {
      hi_n = mid;
    } else {
      lo_n = mid;
    }
  }

  PlanResult result;
  result.gamma = gamma;
  result.n = hi_n;
  result.bias = bias;
  result.total = plan_transient(c, d, gamma, hi_n, metric) + bias;
  if (result.total > epsilon) throw numeric_error("plan: self-check failed");
  return result;
}

}  // namespace langevin
