#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "langevin/errors.hpp"
#include "langevin/potentials.hpp"
#include "langevin/rng.hpp"

using Eigen::VectorXd;
using langevin::check_gradient;
using langevin::LogisticModel;
using langevin::make_gaussian_potential;
using langevin::make_logistic_potential;
using langevin::Potential;
using langevin::RngStream;

namespace {

LogisticModel synthetic_model(int p, int d, std::uint64_t seed) {
  RngStream rng(seed);
  LogisticModel model;
  model.design.resize(p, d);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < d; ++j) model.design(i, j) = rng.normal();
  model.labels.resize(p);
  for (int i = 0; i < p; ++i) model.labels[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
  model.prior_precision = Eigen::MatrixXd::Identity(d, d);
  return model;
}

}  // namespace

TEST_CASE("gaussian potential constants and gradient") {
  const Potential iso = make_gaussian_potential(VectorXd::Ones(2));
  CHECK(iso.constants().m == 1.0);
  CHECK(iso.constants().L == 1.0);
  CHECK(iso.constants().kappa() == doctest::Approx(1.0));

  VectorXd diag(2);
  diag << 0.25, 1.0;
  const Potential aniso = make_gaussian_potential(diag);
  CHECK(aniso.constants().m == 0.25);
  CHECK(aniso.constants().L == 1.0);
  CHECK(aniso.constants().kappa() == doctest::Approx(0.4));

  VectorXd x(2);
  x << 2.0, 3.0;
  CHECK((iso.gradient(x) - x).norm() == 0.0);
  CHECK(iso.value(x) == doctest::Approx(6.5));

  VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(make_gaussian_potential(bad), langevin::invalid_parameter);
}

TEST_CASE("kappa stays between m and min(2m, L)") {
  RngStream rng(7);
  for (int i = 0; i < 100; ++i) {
    const double m = 0.1 + rng.uniform() * 3.0;
    const double L = m * (1.0 + rng.uniform() * 9.0);
    const langevin::ConvexityConstants c{m, L};
    CHECK(c.kappa() >= m - 1e-14);
    CHECK(c.kappa() <= 2.0 * m + 1e-14);
    CHECK(c.kappa() <= L + 1e-14);
  }
}

TEST_CASE("logistic gradient at zero") {
  const LogisticModel model = synthetic_model(6, 3, 11);
  const Potential pot = make_logistic_potential(model);
  const VectorXd expected =
      -model.design.transpose() * (model.labels.array() - 0.5).matrix();
  CHECK((pot.gradient(VectorXd::Zero(3)) - expected).norm() < 1e-12);
}

TEST_CASE("logistic constants for a single observation") {
  LogisticModel model;
  model.design.resize(1, 2);
  model.design << 1.0, 0.0;
  model.labels.resize(1);
  model.labels << 1.0;
  model.prior_precision = Eigen::MatrixXd::Identity(2, 2);
  const Potential pot = make_logistic_potential(model);
  CHECK(pot.constants().L == doctest::Approx(1.25));
  CHECK(pot.constants().m == doctest::Approx(1.0));
  CHECK_FALSE(pot.constants().hessian_lipschitz.has_value());
  CHECK(pot.diagnostics().count("likelihood_operator_norm_L") == 1);
  // The operator-norm reading is never larger than the scalar-sum constant.
  CHECK(pot.diagnostics().at("likelihood_operator_norm_L") <= pot.constants().L + 1e-12);
}

TEST_CASE("logistic model validation") {
  LogisticModel model = synthetic_model(4, 2, 3);
  model.labels[1] = 2.0;
  CHECK_THROWS_AS(make_logistic_potential(model), langevin::invalid_parameter);

  LogisticModel bad_prior = synthetic_model(4, 2, 5);
  bad_prior.prior_precision << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(make_logistic_potential(bad_prior), langevin::invalid_parameter);
}

TEST_CASE("logistic minimizer and normalization") {
  const Potential pot = make_logistic_potential(synthetic_model(20, 3, 17));
  REQUIRE(pot.minimizer().has_value());
  CHECK(pot.gradient(*pot.minimizer()).norm() <= 1e-8);
  CHECK(std::abs(pot.value(*pot.minimizer())) <= 1e-12);
}

TEST_CASE("finite differences agree with analytic gradients") {
  const Potential gauss = make_gaussian_potential(VectorXd::Ones(2));
  CHECK(check_gradient(gauss, VectorXd::Zero(2), 1e-5) <= 1e-10);
  VectorXd ones = VectorXd::Ones(2);
  CHECK(check_gradient(gauss, ones, 1e-5) <= 1e-8);

  const Potential logistic = make_logistic_potential(synthetic_model(3, 2, 23));
  RngStream rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    CHECK(check_gradient(logistic, rng.normal_vector(2), 1e-5) <= 1e-6);
  }
  CHECK_THROWS_AS(check_gradient(gauss, ones, 0.0), langevin::invalid_parameter);
}

TEST_CASE("sampled curvature inequalities hold around the minimizer") {
  VectorXd diag(3);
  diag << 0.5, 1.0, 2.0;
  const Potential gauss = make_gaussian_potential(diag);
  const Potential logistic = make_logistic_potential(synthetic_model(15, 3, 31));

  RngStream rng(37);
  for (const Potential* pot : {&gauss, &logistic}) {
    const double m = pot->constants().m;
    const double L = pot->constants().L;
    const double kappa = pot->constants().kappa();
    const VectorXd center = pot->start_point();
    for (int trial = 0; trial < 1000; ++trial) {
      const VectorXd x = center + 10.0 * rng.uniform() * rng.normal_vector(3).normalized();
      const VectorXd y = center + 10.0 * rng.uniform() * rng.normal_vector(3).normalized();
      const VectorXd dg = pot->gradient(y) - pot->gradient(x);
      const VectorXd dx = y - x;
      const double slack = 1e-10 * (1.0 + dx.squaredNorm());
      CHECK(dg.norm() <= L * dx.norm() + slack);
      CHECK(dg.dot(dx) >= m * dx.squaredNorm() - slack);
      CHECK(dg.dot(dx) >=
            kappa / 2.0 * dx.squaredNorm() + dg.squaredNorm() / (m + L) - slack);
    }
  }
}
