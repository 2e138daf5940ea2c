#include "langevin/potentials.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "langevin/errors.hpp"

namespace langevin {

namespace {

// log(1 + e^z) = max(z, 0) + log1p(e^-|z|); |b.X_i| can exceed 700.
double log1pexp(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

bool is_diagonal(const Eigen::MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) != 0.0) return false;
  return true;
}

}  // namespace

Potential::Potential(int dim, ValueFn value, GradientFn gradient, ConvexityConstants constants,
                     std::optional<Eigen::VectorXd> minimizer,
                     std::map<std::string, double> diagnostics)
    : dim_(dim),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      constants_(constants),
      minimizer_(std::move(minimizer)),
      diagnostics_(std::move(diagnostics)) {
  if (dim_ < 1) throw invalid_parameter("potential dimension must be >= 1");
  if (!(constants_.m > 0.0) || constants_.m > constants_.L) {
    throw invalid_parameter("convexity constants must satisfy 0 < m <= L");
  }
}

Eigen::VectorXd Potential::start_point() const {
  if (minimizer_) return *minimizer_;
  return Eigen::VectorXd::Zero(dim_);
}

Potential make_gaussian_potential(const Eigen::VectorXd& precision_diag) {
  if (precision_diag.size() < 1) throw invalid_parameter("precision_diag must be nonempty");
  for (Eigen::Index i = 0; i < precision_diag.size(); ++i) {
    if (!(precision_diag[i] > 0.0)) {
      throw invalid_parameter("precision_diag entries must be positive, entry " +
                              std::to_string(i) + " = " + std::to_string(precision_diag[i]));
    }
  }
  const int d = static_cast<int>(precision_diag.size());
  auto lambda = std::make_shared<Eigen::VectorXd>(precision_diag);
  ConvexityConstants c{precision_diag.minCoeff(), precision_diag.maxCoeff(), 0.0};
  return Potential(
      d, [lambda](const Eigen::VectorXd& x) { return 0.5 * lambda->cwiseProduct(x).dot(x); },
      [lambda](const Eigen::VectorXd& x) -> Eigen::VectorXd { return lambda->cwiseProduct(x); },
      c, Eigen::VectorXd::Zero(d));
}

Potential make_logistic_potential(const LogisticModel& model) {
  const Eigen::Index p = model.design.rows();
  const Eigen::Index d = model.design.cols();
  if (p < 1 || d < 1) throw invalid_parameter("logistic model needs p >= 1, d >= 1");
  if (model.labels.size() != p) throw invalid_parameter("labels length must match design rows");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (model.labels[i] != 0.0 && model.labels[i] != 1.0) {
      throw invalid_parameter("labels must be binary, row " + std::to_string(i));
    }
  }
  if (model.prior_precision.rows() != d || model.prior_precision.cols() != d ||
      !model.prior_precision.isApprox(model.prior_precision.transpose())) {
    throw invalid_parameter("prior precision must be d x d symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(model.prior_precision);
  if (llt.info() != Eigen::Success) {
    throw invalid_parameter("prior precision must be positive definite");
  }

  // m and L feed every bound, so the prior eigenvalues are computed exactly;
  // diagonal priors skip the eigensolver.
  double prior_min, prior_max;
  if (is_diagonal(model.prior_precision)) {
    prior_min = model.prior_precision.diagonal().minCoeff();
    prior_max = model.prior_precision.diagonal().maxCoeff();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.prior_precision,
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("prior eigendecomposition failed");
    prior_min = es.eigenvalues().minCoeff();
    prior_max = es.eigenvalues().maxCoeff();
  }

  ConvexityConstants c;
  c.m = prior_min;
  c.L = 0.25 * model.design.rowwise().squaredNorm().sum() + prior_max;

  // Sharper alternative reading of the likelihood constant: operator norm of
  // (1/4) sum_i X_i X_i'. Reported as a diagnostic only.
  double likelihood_opnorm;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.25 * (model.design.transpose() * model.design), Eigen::EigenvaluesOnly);
    likelihood_opnorm = es.info() == Eigen::Success ? es.eigenvalues().maxCoeff() : c.L;
  }

  auto data = std::make_shared<LogisticModel>(model);
  auto raw_value = [data](const Eigen::VectorXd& b) {
    const Eigen::VectorXd logits = data->design * b;
    double s = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      s += log1pexp(logits[i]) - data->labels[i] * logits[i];
    }
    return s + 0.5 * b.dot(data->prior_precision * b);
  };
  auto grad = [data](const Eigen::VectorXd& b) -> Eigen::VectorXd {
    const Eigen::VectorXd logits = data->design * b;
    Eigen::VectorXd probs(logits.size());
    for (Eigen::Index i = 0; i < logits.size(); ++i) probs[i] = sigmoid(logits[i]);
    return data->design.transpose() * (probs - data->labels) + data->prior_precision * b;
  };

  // Gradient descent with step 1/L; bounds and diagnostics anchor at the
  // minimizer, so find it to tight tolerance.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  const double step = 1.0 / c.L;
  Eigen::VectorXd g = grad(x);
  std::int64_t iter = 0;
  const std::int64_t max_iter = 2'000'000;
  while (g.norm() > 1e-8) {
    x -= step * g;
    g = grad(x);
    if (++iter > max_iter) {
      throw numeric_error("logistic minimizer search did not converge");
    }
  }
  const double u_star = raw_value(x);

  return Potential(
      static_cast<int>(d),
      [raw_value, u_star](const Eigen::VectorXd& b) { return raw_value(b) - u_star; }, grad, c,
      x, {{"likelihood_operator_norm_L", likelihood_opnorm + prior_max}});
}

double check_gradient(const Potential& potential, const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0)) throw invalid_parameter("finite-difference step must be positive");
  const Eigen::VectorXd g = potential.gradient(x);
  double worst = 0.0;
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = potential.value(probe);
    probe[i] = x[i] - step;
    const double down = potential.value(probe);
    probe[i] = x[i];
    const double fd = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
  }
  return worst;
}

}  // namespace langevin
