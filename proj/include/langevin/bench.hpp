#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "langevin/bounds.hpp"
#include "langevin/potentials.hpp"
#include "langevin/samplers.hpp"

namespace langevin {

struct Dataset {
  Eigen::MatrixXd design;  // p x d, standardized columns
  Eigen::VectorXd labels;  // p entries in {0, 1}
  std::vector<std::string> column_names;
};

/// Reads a CSV with a header row, standardizes the feature columns to zero
/// mean and unit variance, and drops constant columns with a warning.
Dataset load_dataset(const std::string& path, const std::string& label_column);

/// Synthetic binary-regression data: standardized Gaussian design, Bernoulli
/// labels through a random coefficient vector.
Dataset make_synthetic_logistic(int d, int p, std::uint64_t seed);

/// Zellner-style precision (pi^2 d / 3) * Sigma_X^{-1} with
/// Sigma_X = p^{-1} X'X, ridge-regularized when singular.
Eigen::MatrixXd zellner_prior(const Dataset& dataset);

/// Potential for the covariate-whitened parametrization together with the
/// map back to the original coordinates (draws are post-multiplied by
/// Sigma_X^{1/2}).
struct PreconditionedTarget {
  Potential potential;
  Eigen::MatrixXd sqrt_mat;      // Sigma_X^{1/2}
  Eigen::MatrixXd inv_sqrt_mat;  // Sigma_X^{-1/2}

  Eigen::VectorXd back_map(const Eigen::VectorXd& v) const { return sqrt_mat * v; }
  Eigen::VectorXd forward_map(const Eigen::VectorXd& v) const { return inv_sqrt_mat * v; }
};

PreconditionedTarget precondition(const Dataset& dataset, const Potential& potential);

struct MarginalAccuracy {
  Eigen::VectorXd per_dimension;
  double mean = 0.0;
};

/// 1 - TV/2 per dimension between histogram estimates on a shared binning;
/// TV follows the sup-over-sets convention (half the L1 distance between the
/// normalized histograms), so values live in [1/2, 1].
MarginalAccuracy marginal_accuracy(const Eigen::MatrixXd& samples_a,
                                   const Eigen::MatrixXd& samples_b, int bins = 50);

/// Brackets and bisects the MALA step size until the empirical acceptance
/// rate sits in [0.45, 0.55].
double tune_mala_step(const Potential& potential, std::uint64_t seed,
                      std::int64_t pilot_steps = 5000);

struct BenchmarkConfig {
  std::int64_t n = 100000;             // effective iterations per run
  std::int64_t burn_in = -1;           // -1: protocol default
  std::int64_t reference_steps = -1;   // -1: 10x n
  int replicas = 1;
  std::uint64_t seed = 0;
  int bins = 50;
  double gamma = -1.0;                 // -1: 10/(kappa sqrt(n))
  double epsilon = 0.1;                // planner illustration in the report
  int threads = 0;
};

struct BenchmarkReport {
  int dim = 0;
  std::int64_t observations = 0;
  double m = 0.0, L = 0.0, kappa = 0.0;
  double ula_gamma = 0.0;
  double mala_gamma = 0.0;
  double mala_acceptance = 0.0;
  double reference_acceptance = 0.0;
  std::int64_t n = 0, burn_in = 0, reference_steps = 0;
  int replicas = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd ma_ula;   // per-dimension MA against the reference
  Eigen::VectorXd ma_mala;
  double ma_ula_mean = 0.0;
  double ma_mala_mean = 0.0;
  PlanResult plan_tv;       // planner output at config.epsilon (Basic TV)
};

/// Full pipeline: Zellner prior, preconditioning, ULA + MALA runs against a
/// long MALA reference, marginal-accuracy scores, and a planner illustration.
BenchmarkReport run_benchmark(const Dataset& dataset, const BenchmarkConfig& config);

}  // namespace langevin
