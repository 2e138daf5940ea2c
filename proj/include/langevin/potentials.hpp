#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace langevin {

/// Curvature constants of a strongly convex potential: m |x|^2/2 below,
/// L-Lipschitz gradient above, optional Hessian Lipschitz constant l_tilde.
struct ConvexityConstants {
  double m = 0.0;
  double L = 0.0;
  std::optional<double> hessian_lipschitz;  // l_tilde; absent when unknown

  /// kappa = 2mL/(m+L), the contraction rate; m <= kappa <= min(2m, L).
  double kappa() const { return 2.0 * m * L / (m + L); }
};

/// A differentiable strongly convex target -log density, defined up to an
/// additive constant. Immutable after construction and safe to share across
/// parallel chains; value/gradient evaluation is reentrant.
class Potential {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  Potential(int dim, ValueFn value, GradientFn gradient, ConvexityConstants constants,
            std::optional<Eigen::VectorXd> minimizer = {},
            std::map<std::string, double> diagnostics = {});

  int dim() const { return dim_; }
  double value(const Eigen::VectorXd& x) const { return value_(x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return gradient_(x); }
  const ConvexityConstants& constants() const { return constants_; }
  const std::optional<Eigen::VectorXd>& minimizer() const { return minimizer_; }

  /// Minimizer when known, otherwise the origin.
  Eigen::VectorXd start_point() const;

  /// Auxiliary constants that are not used by any bound (e.g. the sharper
  /// operator-norm Lipschitz constant of the logistic likelihood).
  const std::map<std::string, double>& diagnostics() const { return diagnostics_; }

 private:
  int dim_;
  ValueFn value_;
  GradientFn gradient_;
  ConvexityConstants constants_;
  std::optional<Eigen::VectorXd> minimizer_;
  std::map<std::string, double> diagnostics_;
};

/// Binary regression data with a Gaussian prior given by its precision matrix.
struct LogisticModel {
  Eigen::MatrixXd design;           // p x d, rows are covariate vectors X_i
  Eigen::VectorXd labels;           // p entries in {0, 1}
  Eigen::MatrixXd prior_precision;  // d x d symmetric positive definite
};

/// Product of independent Gaussians: U(x) = sum_i lambda_i x_i^2 / 2.
Potential make_gaussian_potential(const Eigen::VectorXd& precision_diag);

/// Negative log posterior of Bayesian logistic regression,
/// U(b) = sum_i { log(1+exp(b.X_i)) - Y_i b.X_i } + b' P b / 2,
/// with m the smallest eigenvalue of the prior precision and
/// L = (1/4) sum_i |X_i|^2 + largest eigenvalue of the prior precision.
Potential make_logistic_potential(const LogisticModel& model);

/// Max over coordinates of the relative gap between the analytic gradient and
/// a central finite difference with half-width `step`.
double check_gradient(const Potential& potential, const Eigen::VectorXd& x, double step);

}  // namespace langevin
