#include <doctest.h>

#include <cmath>
#include <numbers>

#include "langevin/bounds.hpp"
#include "langevin/errors.hpp"
#include "langevin/normal.hpp"
#include "langevin/schedules.hpp"
#include "oracles.hpp"

using namespace langevin;

namespace {

const ConvexityConstants kUnit{1.0, 1.0, 0.0};

BoundInputs unit_inputs(const StepSchedule& schedule, double s2 = 0.0, int d = 1) {
  return BoundInputs{kUnit, d, schedule, s2};
}

}  // namespace

TEST_CASE("normal cdf accuracy and linearization") {
  CHECK(norm_cdf(-1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-13));
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double s = 1e-6; s < 10.0; s *= 2.3) {
    const double central = gauss_central_prob(s);
    CHECK(central == doctest::Approx(1.0 - 2.0 * norm_cdf(-s)).epsilon(1e-9));
    CHECK(central <= s * std::sqrt(2.0 / std::numbers::pi) + 1e-15);
  }
}

TEST_CASE("drift rho examples") {
  const BoundInputs a = unit_inputs(StepSchedule::constant(0.1), 1.0);
  CHECK(drift_rho(a, 1, 1) == doctest::Approx(1.1).epsilon(1e-14));

  // Empty range keeps the verbatim inner factor.
  const ConvexityConstants half{0.5, 0.5, 0.0};
  const BoundInputs b{half, 1, StepSchedule::constant(0.1), 2.0};
  const double kappa = half.kappa();
  CHECK(drift_rho(b, 5, 4) ==
        doctest::Approx(2.0 + 2.0 / kappa * (1.0 - 1.0 / kappa)).epsilon(1e-14));

  const BoundInputs c = unit_inputs(StepSchedule::constant(0.05), 0.0, 3);
  CHECK(drift_rho(c, 1, 10) ==
        doctest::Approx(6.0 * (1.0 - std::pow(0.95, 10))).epsilon(1e-14));
  const auto g = oracle::constant_steps(0.05, 10);
  CHECK(drift_rho(c, 1, 10) == doctest::Approx(oracle::rho(1.0, 3, 0.0, g, 1, 10)).epsilon(1e-14));

  // The corrected reading differs from the verbatim one whenever kappa != 1.
  BoundInputs corrected = b;
  corrected.rho_reading = RhoReading::Corrected;
  CHECK(drift_rho(corrected, 1, 3) ==
        doctest::Approx(oracle::rho(kappa, 1, 2.0, oracle::constant_steps(0.1, 3), 1, 3, false))
            .epsilon(1e-14));
  CHECK(drift_rho(corrected, 1, 3) != drift_rho(b, 1, 3));

  const BoundInputs wide = unit_inputs(StepSchedule::constant(1.5));
  CHECK_THROWS_AS(drift_rho(wide, 1, 1), invalid_parameter);
}

TEST_CASE("w2 contraction between two chains") {
  const BoundInputs in = unit_inputs(StepSchedule::constant(0.5));
  CHECK(w2_contraction(in, 0.0, 1, 5) == 0.0);
  CHECK(w2_contraction(in, 4.0, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(w2_contraction(in, -1.0, 1, 2), invalid_parameter);

  const ConvexityConstants c{0.25, 1.0};  // kappa = 0.4
  const BoundInputs poly{c, 1, StepSchedule::polynomial(0.5, 1.0), 0.0};
  const auto g = oracle::poly_steps(0.5, 1.0, 3);
  CHECK(w2_contraction(poly, 1.0, 1, 3) ==
        doctest::Approx(std::sqrt(oracle::product(g, 0.4, 1, 3))).epsilon(1e-14));
}

TEST_CASE("w2 distance to the stationary law") {
  BoundInputs in = unit_inputs(StepSchedule::constant(0.5));
  CHECK(w2_stationary_contraction(in, 0.5, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(w2_stationary_contraction(in, 0.5, 2) ==
        doctest::Approx(std::sqrt(0.25 * 2.0)).epsilon(1e-14));

  const ConvexityConstants c{0.25, 1.0};  // kappa = 0.4
  BoundInputs other{c, 5, StepSchedule::constant(0.1), 1.0};
  CHECK(w2_stationary_contraction(other, 0.1, 100) ==
        doctest::Approx(std::pow(0.96, 50) * std::sqrt(1.0 + 2.0 * 5.0 / 0.4)).epsilon(1e-13));
  CHECK_THROWS_AS(w2_stationary_contraction(other, 1.7, 1), invalid_parameter);
}

TEST_CASE("w2 discretization bound and its intermediates") {
  const StepSchedule gamma01 = StepSchedule::constant(0.1);
  const BoundInputs at_zero = unit_inputs(gamma01, 0.5);

  SUBCASE("empty horizon") {
    const BoundReport r = w2_discretization(at_zero, 0, Variant::Basic);
    CHECK(r.intermediates.at("u1") == 2.0);
    CHECK(r.intermediates.at("u2") == 0.0);
    CHECK(r.value == doctest::Approx(2.0 * (0.5 + 1.0)).epsilon(1e-14));
  }

  SUBCASE("single-term smooth value") {
    const BoundReport r = w2_discretization(at_zero, 1, Variant::Smooth);
    CHECK(r.intermediates.at("u3") == doctest::Approx(3.5350e-3).epsilon(1e-4));
    const auto g = oracle::constant_steps(0.1, 1);
    CHECK(r.intermediates.at("u3") ==
          doctest::Approx(oracle::u3(1.0, 1.0, 0.0, 1.0, 1, g, 1)).epsilon(1e-14));
  }

  SUBCASE("single-term basic value") {
    const BoundReport r = w2_discretization(at_zero, 1, Variant::Basic);
    const auto g = oracle::constant_steps(0.1, 1);
    CHECK(r.intermediates.at("u2") ==
          doctest::Approx(oracle::u2(1.0, 1.0, 1.0, 1, g, 1)).epsilon(1e-14));
  }

  SUBCASE("longer horizons against the oracle") {
    const ConvexityConstants c{0.5, 2.0, 0.7};
    const BoundInputs in{c, 3, StepSchedule::polynomial(0.3 / 2.5, 0.5), 1.3};
    const auto g = oracle::poly_steps(0.3 / 2.5, 0.5, 50);
    const double kappa = c.kappa();
    const BoundReport basic = w2_discretization(in, 50, Variant::Basic);
    CHECK(basic.intermediates.at("u1") ==
          doctest::Approx(oracle::u1(kappa, g, 50)).epsilon(1e-12));
    CHECK(basic.intermediates.at("u2") ==
          doctest::Approx(oracle::u2(0.5, 2.0, kappa, 3, g, 50)).epsilon(1e-12));
    const BoundReport smooth = w2_discretization(in, 50, Variant::Smooth);
    CHECK(smooth.intermediates.at("u3") ==
          doctest::Approx(oracle::u3(0.5, 2.0, 0.7, kappa, 3, g, 50)).epsilon(1e-12));
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(w2_discretization(unit_inputs(StepSchedule::constant(0.6)), 1, Variant::Basic),
                    invalid_parameter);
    const ConvexityConstants no_lt{1.0, 1.0};
    const BoundInputs in{no_lt, 1, gamma01, 0.0};
    CHECK_THROWS_AS(w2_discretization(in, 1, Variant::Smooth), invalid_parameter);
  }
}

TEST_CASE("w2 bias between target and stationary law") {
  CHECK(w2_bias(kUnit, 1, 0.5, Variant::Smooth) == doctest::Approx(2.1875).epsilon(1e-14));
  CHECK(w2_bias(kUnit, 2, 0.1, Variant::Basic) ==
        doctest::Approx(oracle::w2_bias_basic(1.0, 1.0, 1.0, 2, 0.1)).epsilon(1e-14));

  // The bound decreases monotonically to zero with the step size.
  double prev = w2_bias(kUnit, 1, 0.5, Variant::Smooth);
  for (double gamma = 0.25; gamma > 1e-6; gamma /= 2.0) {
    const double cur = w2_bias(kUnit, 1, gamma, Variant::Smooth);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(prev < 1e-5);
  CHECK_THROWS_AS(w2_bias(kUnit, 1, 0.6, Variant::Basic), invalid_parameter);
}

TEST_CASE("semigroup total-variation branches") {
  CHECK(tv_semigroup_two_points(1.0, 0.0, 1.0) == 0.0);
  const double t = std::log(2.0) / 2.0;  // e^{2mt} = 2, chi = 2
  CHECK(chi_m(1.0, t) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(tv_semigroup_two_points(1.0, 2.0, t) == doctest::Approx(0.6826894921370859).epsilon(1e-12));
  const double expected =
      1.0 / std::sqrt(2.0 * std::numbers::pi * (std::exp(2.0) - 1.0));
  CHECK(tv_semigroup_stationary(1.0, 1, 0.0, 1.0) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(tv_semigroup_w1(1.0, 2.5, 1.0) == doctest::Approx(2.5 * expected).epsilon(1e-13));
  CHECK_THROWS_AS(chi_m(1.0, 0.0), invalid_parameter);
  CHECK_THROWS_AS(tv_semigroup_w1(1.0, 1.0, -1.0), invalid_parameter);
}

TEST_CASE("lambda evaluator") {
  const BoundInputs in = unit_inputs(StepSchedule::constant(0.1));
  CHECK(lambda_tv(in, 1, 1) == doctest::Approx(1.0 / 0.9 - 1.0).epsilon(1e-14));
  CHECK(lambda_tv(in, 5, 4) == 0.0);

  const ConvexityConstants half{0.5, 0.5};  // kappa = 0.5
  const BoundInputs b{half, 1, StepSchedule::constant(0.2), 0.0};
  CHECK(lambda_tv(b, 1, 3) ==
        doctest::Approx(2.0 * (std::pow(0.9, -3) - 1.0)).epsilon(1e-13));
  CHECK(lambda_tv(b, 1, 3) ==
        doctest::Approx(oracle::lambda(0.5, oracle::constant_steps(0.2, 3), 1, 3)).epsilon(1e-13));

  const ConvexityConstants big{10.0, 10.0};  // kappa = 10, kappa*gamma = 2
  const BoundInputs bad{big, 1, StepSchedule::constant(0.2), 0.0};
  CHECK_THROWS_AS(lambda_tv(bad, 1, 1), invalid_parameter);
}

TEST_CASE("discrete-kernel tv contraction") {
  const BoundInputs in = unit_inputs(StepSchedule::constant(0.1));
  CHECK(tv_kernel_contraction(in, 0.0, 1, 5) == 0.0);
  CHECK(tv_kernel_contraction(in, 1.0, 1, 1) == doctest::Approx(0.71115).epsilon(1e-4));
  const double lam = oracle::lambda(1.0, oracle::constant_steps(0.1, 1), 1, 1);
  CHECK(tv_kernel_contraction(in, 1.0, 1, 1) ==
        doctest::Approx(1.0 - 2.0 * oracle::norm_cdf(-1.0 / std::sqrt(8.0 * lam))).epsilon(1e-12));

  BoundInputs start{kUnit, 1, StepSchedule::constant(0.1), 4.0};
  CHECK(tv_kernel_stationary(start, 0.1, 4000) <= 1e-40);
  double prev = tv_kernel_stationary(start, 0.1, 1);
  for (std::int64_t n = 2; n < 200; n *= 2) {
    const double cur = tv_kernel_stationary(start, 0.1, n);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("tv discretization bound") {
  SUBCASE("vanishes with the step size") {
    double prev = 1e9;
    for (double gamma : {1e-2, 1e-4, 1e-6}) {
      const BoundInputs in = unit_inputs(StepSchedule::constant(gamma));
      const BoundReport r = tv_discretization(in, 2, 1, Variant::Basic);
      CHECK(r.value < prev);
      prev = r.value;
    }
    CHECK(prev < 1e-2);
  }

  SUBCASE("verbatim assembly against the oracle") {
    const BoundInputs in = unit_inputs(StepSchedule::constant(0.1));
    const auto g = oracle::constant_steps(0.1, 3);
    const BoundReport basic = tv_discretization(in, 2, 1, Variant::Basic);
    const double theta1 = oracle::vartheta1(1.0, 1.0, 1.0, 1, 0.0, g, 1, 0);
    CHECK(basic.intermediates.at("theta") == doctest::Approx(theta1).epsilon(1e-13));
    CHECK(basic.intermediates.at("raw") ==
          doctest::Approx(oracle::tv_decreasing(1.0, 1.0, 1, 0.0, g, 2, 1, theta1))
              .epsilon(1e-13));

    const BoundReport smooth = tv_discretization(in, 2, 1, Variant::Smooth);
    const double theta2 = oracle::vartheta2(1.0, 1.0, 0.0, 1.0, 1, 0.0, g, 1, 0);
    CHECK(smooth.intermediates.at("theta") == doctest::Approx(theta2).epsilon(1e-13));
  }

  SUBCASE("polynomial schedule against the oracle") {
    const ConvexityConstants c{0.8, 2.0, 0.4};
    const BoundInputs in{c, 2, StepSchedule::polynomial(1.0 / 2.8, 0.5), 0.9};
    const auto g = oracle::poly_steps(1.0 / 2.8, 0.5, 31);
    const double kappa = c.kappa();
    const BoundReport r = tv_discretization(in, 30, 8, Variant::Smooth);
    const double theta = oracle::vartheta2(0.8, 2.0, 0.4, kappa, 2, 0.9, g, 8, 0);
    CHECK(r.intermediates.at("theta") == doctest::Approx(theta).epsilon(1e-12));
    CHECK(r.intermediates.at("raw") ==
          doctest::Approx(oracle::tv_decreasing(2.0, kappa, 2, 0.9, g, 30, 8, theta))
              .epsilon(1e-12));
  }

  SUBCASE("preconditions") {
    const BoundInputs in = unit_inputs(StepSchedule::constant(0.1));
    CHECK_THROWS_AS(tv_discretization(in, 2, 2, Variant::Basic), invalid_parameter);
    CHECK_THROWS_AS(tv_discretization(in, 2, 0, Variant::Basic), invalid_parameter);
  }
}

TEST_CASE("fixed-step finite-horizon tv bound") {
  const BoundInputs at_min = unit_inputs(StepSchedule::constant(0.1));
  const BoundReport r = tv_fixed_step_finite(at_min, 0.1, 100);
  // Starting at the minimizer kills the transient part of D3.
  CHECK(r.intermediates.at("D3") == doctest::Approx(2.0 / (0.1 * 1.0)).epsilon(1e-13));
  CHECK(r.intermediates.at("D1") ==
        doctest::Approx(2.0 * 1.1 * (2.0 + 0.01 / 6.0)).epsilon(1e-13));
  CHECK(r.intermediates.at("D2") == doctest::Approx(1.1).epsilon(1e-13));

  const double expected =
      std::sqrt((0.1 * r.intermediates.at("D1") +
                 0.001 * r.intermediates.at("D2") * r.intermediates.at("D3")) /
                (4.0 * std::numbers::pi)) +
      r.intermediates.at("D4");
  CHECK(r.intermediates.at("raw") == doctest::Approx(expected).epsilon(1e-13));

  // With a start offset, D4 carries the decaying transient.
  const BoundInputs offset = unit_inputs(StepSchedule::constant(0.1), 9.0);
  const BoundReport r2 = tv_fixed_step_finite(offset, 0.1, 100);
  const double split = 100.0 - 10.0;
  const double d4 = std::pow(2.0, -1.5) *
                    std::sqrt(0.1 * 1.1 +
                              (0.001 / 3.0) * ((1.0 + 10.0) * std::pow(0.9, split) * 9.0 +
                                               2.0 * 1.1 * 2.0 / 2.0));
  CHECK(r2.intermediates.at("D4") == doctest::Approx(d4).epsilon(1e-12));

  CHECK_THROWS_AS(tv_fixed_step_finite(at_min, 0.1, 10), invalid_parameter);
  CHECK_THROWS_AS(tv_fixed_step_finite(at_min, 0.5, 100), invalid_parameter);
}

TEST_CASE("tv bias between target and stationary law") {
  const BoundReport smooth = tv_bias(kUnit, 1, 0.1, Variant::Smooth);
  CHECK(smooth.intermediates.at("E1") == doctest::Approx(4.203333333333333).epsilon(1e-14));
  CHECK(smooth.intermediates.at("E2") == doctest::Approx(1.4333333333333333).epsilon(1e-14));
  CHECK(smooth.intermediates.at("n_gamma") == 4.0);
  CHECK(smooth.value ==
        doctest::Approx(oracle::tv_bias_smooth(1.0, 1.0, 0.0, 1.0, 1, 0.1)).epsilon(1e-13));

  const BoundReport basic = tv_bias(kUnit, 1, 0.1, Variant::Basic);
  CHECK(basic.value ==
        doctest::Approx(oracle::tv_bias_basic(1.0, 1.0, 1.0, 1, 0.1)).epsilon(1e-13));

  // Near gamma -> 0 the basic bound scales like sqrt(d * gamma).
  const double tiny = 1e-7;
  const double ratio =
      tv_bias(kUnit, 2, tiny, Variant::Basic).value / tv_bias(kUnit, 1, tiny, Variant::Basic).value;
  CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));

  // Clamping keeps the raw value available.
  const BoundReport big = tv_bias(kUnit, 100, 0.5, Variant::Smooth);
  CHECK(big.value == 1.0);
  CHECK(big.clamped);
  CHECK(big.intermediates.at("raw") > 1.0);
}

TEST_CASE("tv-style bounds stay monotone in the horizon on sane grids") {
  for (double s2 : {1.0, 10.0}) {
    for (double gamma : {0.05, 0.1}) {
      const BoundInputs in = unit_inputs(StepSchedule::constant(gamma), s2, 2);
      double prev_w2 = 1e300;
      for (std::int64_t n : {1, 2, 5, 10, 30, 100, 300}) {
        const double w2 = w2_discretization(in, n, Variant::Basic).value;
        CHECK(w2 <= prev_w2);
        prev_w2 = w2;
      }
    }
  }
}

// On the standard Gaussian the chain law after n steps from the minimizer is
// exactly N(0, v_n) with v_n = (1 - (1-gamma)^{2n}) / (1 - gamma/2), so the
// analytic distances must sit under the evaluated bounds at every horizon.
TEST_CASE("bounds dominate the exact gaussian chain law along the horizon") {
  for (double gamma : {0.05, 0.1}) {
    const BoundInputs in = unit_inputs(StepSchedule::constant(gamma));
    for (std::int64_t n : {10, 50, 200, 1000}) {
      const double v_n =
          (1.0 - std::pow(1.0 - gamma, 2.0 * static_cast<double>(n))) / (1.0 - gamma / 2.0);
      const double w2_analytic = std::abs(std::sqrt(v_n) - 1.0);
      CHECK(w2_analytic <= std::sqrt(w2_discretization(in, n, Variant::Smooth).value));
      const double tv_analytic = oracle::tv_between_centered_normals(std::sqrt(v_n));
      const double tv_bound = std::min(
          1.0, tv_kernel_stationary(in, gamma, n) + tv_bias(kUnit, 1, gamma, Variant::Smooth).value);
      CHECK(tv_analytic <= tv_bound);
    }
  }
}

TEST_CASE("u2 and u3 converge to the bias constants") {
  const double gamma = 0.1;
  const BoundInputs in = unit_inputs(StepSchedule::constant(gamma));
  const auto n = static_cast<std::int64_t>(1e4 / gamma);
  const double u2_limit = w2_bias(kUnit, 1, gamma, Variant::Basic);
  const double u3_limit = w2_bias(kUnit, 1, gamma, Variant::Smooth);
  const double u2_val = w2_discretization(in, n, Variant::Basic).intermediates.at("u2");
  const double u3_val = w2_discretization(in, n, Variant::Smooth).intermediates.at("u3");
  CHECK(std::abs(u2_val - u2_limit) / u2_limit <= 1e-10);
  CHECK(std::abs(u3_val - u3_limit) / u3_limit <= 1e-10);
}

TEST_CASE("planner hits the requested precision") {
  for (Metric metric : {Metric::W2, Metric::Tv}) {
    for (Variant variant : {Variant::Basic, Variant::Smooth}) {
      const PlanResult r = plan(kUnit, 2, 0.25, metric, variant);
      CHECK(r.total <= 0.25);
      CHECK(r.bias <= 0.125 * (1.0 + 1e-9));
      CHECK(r.gamma > 0.0);
      CHECK(r.gamma <= 0.5);
      CHECK(r.n >= 1);
    }
  }
  CHECK_THROWS_AS(plan(kUnit, 1, 0.0, Metric::W2, Variant::Basic), invalid_parameter);
}

TEST_CASE("halving epsilon roughly halves the smooth w2 step") {
  const PlanResult coarse = plan(kUnit, 1, 0.02, Metric::W2, Variant::Smooth);
  const PlanResult fine = plan(kUnit, 1, 0.01, Metric::W2, Variant::Smooth);
  CHECK(fine.gamma / coarse.gamma == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("doubling the dimension scales the basic tv iteration count like d log d") {
  for (double eps : {0.05, 0.0125}) {
    const PlanResult one = plan(kUnit, 1, eps, Metric::Tv, Variant::Basic);
    const PlanResult two = plan(kUnit, 2, eps, Metric::Tv, Variant::Basic);
    const double ratio = static_cast<double>(two.n) / static_cast<double>(one.n);
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.6);
  }
}
