#include "langevin/bench.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "langevin/errors.hpp"
#include "langevin/parallel.hpp"
#include "langevin/rng.hpp"
#include "langevin/schedules.hpp"

namespace langevin {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

/// Standardizes columns in place (zero mean, unit population variance) and
/// drops the constant ones.
Dataset standardize(Eigen::MatrixXd design, Eigen::VectorXd labels,
                    std::vector<std::string> names) {
  const Eigen::Index p = design.rows();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const double mean = design.col(j).mean();
    const double var = (design.col(j).array() - mean).square().sum() / static_cast<double>(p);
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * (1.0 + std::abs(mean))) {
      std::cerr << "warning: dropping constant column '" << names[static_cast<std::size_t>(j)]
                << "'\n";
      continue;
    }
    design.col(j) = (design.col(j).array() - mean) / sd;
    keep.push_back(j);
  }
  if (keep.empty()) throw invalid_parameter("dataset: no non-constant feature columns");
  Dataset out;
  out.design.resize(p, static_cast<Eigen::Index>(keep.size()));
  out.labels = std::move(labels);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.design.col(static_cast<Eigen::Index>(j)) = design.col(keep[j]);
    out.column_names.push_back(names[static_cast<std::size_t>(keep[j])]);
  }
  return out;
}

Eigen::MatrixXd covariate_second_moment(const Dataset& dataset) {
  return dataset.design.transpose() * dataset.design /
         static_cast<double>(dataset.design.rows());
}

/// Symmetric PSD second-moment matrix with a ridge when numerically singular.
Eigen::MatrixXd regularized_sigma_x(const Dataset& dataset) {
  Eigen::MatrixXd sigma = covariate_second_moment(dataset);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numeric_error("Sigma_X eigendecomposition failed");
  const double max_ev = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, max_ev)) {
    sigma += (1e-8 * sigma.trace() / static_cast<double>(sigma.rows())) *
             Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
  }
  return sigma;
}

struct CollectedChain {
  Eigen::MatrixXd samples;  // n x d, post burn-in states
  double acceptance = 1.0;
};

CollectedChain collect_ula(const Potential& pot, double gamma, std::int64_t n,
                           std::int64_t burn_in, std::uint64_t seed) {
  RngStream rng(seed);
  Eigen::VectorXd x = pot.start_point();
  CollectedChain out;
  out.samples.resize(n, pot.dim());
  for (std::int64_t k = 1; k <= burn_in + n; ++k) {
    x = x - gamma * pot.gradient(x) + std::sqrt(2.0 * gamma) * rng.normal_vector(pot.dim());
    if (!x.allFinite()) throw numeric_error("ULA benchmark chain diverged");
    if (k > burn_in) out.samples.row(k - burn_in - 1) = x;
  }
  return out;
}

CollectedChain collect_mala(const Potential& pot, double gamma, std::int64_t n,
                            std::int64_t burn_in, std::uint64_t seed) {
  RngStream rng(seed);
  Eigen::VectorXd x = pot.start_point();
  double value_x = pot.value(x);
  Eigen::VectorXd grad_x = pot.gradient(x);
  std::int64_t accepted = 0, counted = 0;
  CollectedChain out;
  out.samples.resize(n, pot.dim());
  for (std::int64_t k = 1; k <= burn_in + n; ++k) {
    const Eigen::VectorXd y =
        x - gamma * grad_x + std::sqrt(2.0 * gamma) * rng.normal_vector(pot.dim());
    const double value_y = pot.value(y);
    const Eigen::VectorXd grad_y = pot.gradient(y);
    const double forward = (y - x + gamma * grad_x).squaredNorm();
    const double backward = (x - y + gamma * grad_y).squaredNorm();
    const double log_ratio = value_x - value_y + (forward - backward) / (4.0 * gamma);
    if (std::log(rng.uniform()) < log_ratio) {
      x = y;
      value_x = value_y;
      grad_x = grad_y;
      if (k > burn_in) ++accepted;
    }
    if (k > burn_in) {
      ++counted;
      out.samples.row(k - burn_in - 1) = x;
    }
  }
  out.acceptance = counted > 0 ? static_cast<double>(accepted) / counted : 0.0;
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw invalid_parameter("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw invalid_parameter("dataset is empty: " + path);
  const std::vector<std::string> header = split_csv_line(line);
  std::ptrdiff_t label_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) label_idx = static_cast<std::ptrdiff_t>(j);
  }
  if (label_idx < 0) {
    throw invalid_parameter("label column '" + label_column + "' not found in " + path);
  }

  std::vector<std::vector<double>> rows;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw invalid_parameter("row " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      try {
        std::size_t used = 0;
        const double v = std::stod(f, &used);
        if (used != f.size()) throw std::invalid_argument(f);
        row.push_back(v);
      } catch (const std::exception&) {
        throw invalid_parameter("row " + std::to_string(line_no) + ": cannot parse '" + f + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw invalid_parameter("dataset has no data rows: " + path);

  const auto p = static_cast<Eigen::Index>(rows.size());
  const auto cols = static_cast<Eigen::Index>(header.size());
  Eigen::MatrixXd design(p, cols - 1);
  Eigen::VectorXd labels(p);
  std::vector<std::string> names;
  for (Eigen::Index j = 0, out_j = 0; j < cols; ++j) {
    if (j == static_cast<Eigen::Index>(label_idx)) continue;
    names.push_back(header[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < p; ++i) {
      design(i, out_j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    ++out_j;
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    const double y = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(label_idx)];
    if (y != 0.0 && y != 1.0) {
      throw invalid_parameter("label at data row " + std::to_string(i + 1) +
                              " is not binary: " + std::to_string(y));
    }
    labels[i] = y;
  }
  return standardize(std::move(design), std::move(labels), std::move(names));
}

Dataset make_synthetic_logistic(int d, int p, std::uint64_t seed) {
  if (d < 1 || p < 1) throw invalid_parameter("synthetic dataset needs d >= 1, p >= 1");
  RngStream rng(seed);
  Eigen::MatrixXd design(p, d);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < d; ++j) design(i, j) = rng.normal();
  std::vector<std::string> names;
  for (int j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  Dataset data = standardize(std::move(design), Eigen::VectorXd::Zero(p), std::move(names));
  const Eigen::VectorXd beta = rng.normal_vector(data.design.cols());
  for (Eigen::Index i = 0; i < p; ++i) {
    data.labels[i] = rng.uniform() < sigmoid(data.design.row(i).dot(beta)) ? 1.0 : 0.0;
  }
  return data;
}

Eigen::MatrixXd zellner_prior(const Dataset& dataset) {
  const Eigen::MatrixXd sigma = regularized_sigma_x(dataset);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success) throw numeric_error("Sigma_X eigendecomposition failed");
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw numeric_error("Sigma_X is degenerate even after regularization");
  }
  const double scale =
      std::numbers::pi * std::numbers::pi * static_cast<double>(dataset.design.cols()) / 3.0;
  return scale * es.eigenvectors() *
         es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

PreconditionedTarget precondition(const Dataset& dataset, const Potential& potential) {
  const Eigen::MatrixXd sigma = regularized_sigma_x(dataset);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw numeric_error("Sigma_X square root failed: matrix not positive definite");
  }
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::MatrixXd sqrt_mat =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd inv_sqrt =
      es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();

  // Curvature transforms through the congruence A H A: conservative constants
  // from the eigenvalue range of Sigma_X.
  ConvexityConstants c = potential.constants();
  c.m *= ev.minCoeff();
  c.L *= ev.maxCoeff();
  if (c.hessian_lipschitz) {
    c.hessian_lipschitz = *c.hessian_lipschitz * std::pow(ev.maxCoeff(), 1.5);
  }
  std::optional<Eigen::VectorXd> minimizer;
  if (potential.minimizer()) minimizer = inv_sqrt * (*potential.minimizer());

  Potential transformed(
      potential.dim(),
      [potential, sqrt_mat](const Eigen::VectorXd& v) { return potential.value(sqrt_mat * v); },
      [potential, sqrt_mat](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return sqrt_mat * potential.gradient(sqrt_mat * v);
      },
      c, minimizer, potential.diagnostics());
  return PreconditionedTarget{std::move(transformed), sqrt_mat, inv_sqrt};
}

MarginalAccuracy marginal_accuracy(const Eigen::MatrixXd& samples_a,
                                   const Eigen::MatrixXd& samples_b, int bins) {
  if (samples_a.rows() < 1 || samples_b.rows() < 1) {
    throw invalid_parameter("marginal_accuracy: sample sets must be nonempty");
  }
  if (samples_a.cols() != samples_b.cols()) {
    throw invalid_parameter("marginal_accuracy: dimension mismatch");
  }
  if (bins < 1) throw invalid_parameter("marginal_accuracy: bins must be >= 1");

  const Eigen::Index d = samples_a.cols();
  MarginalAccuracy out;
  out.per_dimension.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = std::min(samples_a.col(j).minCoeff(), samples_b.col(j).minCoeff());
    const double hi = std::max(samples_a.col(j).maxCoeff(), samples_b.col(j).maxCoeff());
    double tv = 0.0;
    if (hi > lo) {
      const double width = (hi - lo) / bins;
      Eigen::VectorXd ha = Eigen::VectorXd::Zero(bins), hb = Eigen::VectorXd::Zero(bins);
      auto bin_of = [&](double v) {
        return std::min<Eigen::Index>(static_cast<Eigen::Index>((v - lo) / width), bins - 1);
      };
      for (Eigen::Index i = 0; i < samples_a.rows(); ++i) ha[bin_of(samples_a(i, j))] += 1.0;
      for (Eigen::Index i = 0; i < samples_b.rows(); ++i) hb[bin_of(samples_b(i, j))] += 1.0;
      ha /= static_cast<double>(samples_a.rows());
      hb /= static_cast<double>(samples_b.rows());
      tv = 0.5 * (ha - hb).cwiseAbs().sum();  // sup-over-sets convention
    }
    out.per_dimension[j] = 1.0 - tv / 2.0;
  }
  out.mean = out.per_dimension.mean();
  return out;
}

double tune_mala_step(const Potential& potential, std::uint64_t seed, std::int64_t pilot_steps) {
  auto acceptance_at = [&](double gamma) {
    return collect_mala(potential, gamma, pilot_steps, pilot_steps / 5, seed).acceptance;
  };
  double gamma = 1.0 / potential.constants().L;
  double acc = acceptance_at(gamma);
  double lo = 0.0, hi = 0.0;  // lo: acceptance too high (step too small); hi: too low
  for (int iter = 0; iter < 60; ++iter) {
    if (acc > 0.55) {
      lo = gamma;
      gamma = hi > 0.0 ? 0.5 * (lo + hi) : gamma * 2.0;
    } else if (acc < 0.45) {
      hi = gamma;
      gamma = lo > 0.0 ? 0.5 * (lo + hi) : gamma / 2.0;
    } else {
      return gamma;
    }
    acc = acceptance_at(gamma);
  }
  return gamma;
}

BenchmarkReport run_benchmark(const Dataset& dataset, const BenchmarkConfig& config) {
  if (config.n < 1) throw invalid_parameter("benchmark: n must be >= 1");
  if (config.replicas < 1) throw invalid_parameter("benchmark: replicas must be >= 1");

  LogisticModel model{dataset.design, dataset.labels, zellner_prior(dataset)};
  const Potential raw = make_logistic_potential(model);
  const PreconditionedTarget pre = precondition(dataset, raw);
  const Potential& pot = pre.potential;
  const int d = pot.dim();
  const double kappa = pot.constants().kappa();

  BenchmarkReport report;
  report.dim = d;
  report.observations = dataset.design.rows();
  report.m = pot.constants().m;
  report.L = pot.constants().L;
  report.kappa = kappa;
  report.n = config.n;
  report.replicas = config.replicas;
  report.seed = config.seed;
  report.burn_in =
      config.burn_in >= 0
          ? config.burn_in
          : default_burn_in(StepSchedule::constant(1.0), config.n);  // ceil(sqrt(n))
  report.reference_steps =
      config.reference_steps >= 0 ? config.reference_steps : 10 * config.n;
  report.ula_gamma = config.gamma > 0.0
                         ? config.gamma
                         : 10.0 / (kappa * std::sqrt(static_cast<double>(config.n)));
  report.mala_gamma = tune_mala_step(pot, config.seed ^ 0x74756E65ULL);

  // Reference: long MALA run, exact for the target posterior.
  const CollectedChain reference =
      collect_mala(pot, report.mala_gamma, report.reference_steps,
                   default_burn_in(StepSchedule::constant(1.0), report.reference_steps),
                   config.seed ^ 0x52454600ULL);
  report.reference_acceptance = reference.acceptance;
  const Eigen::MatrixXd ref_mapped = reference.samples * pre.sqrt_mat;

  Eigen::MatrixXd ula_pool(config.replicas * config.n, d);
  Eigen::MatrixXd mala_pool(config.replicas * config.n, d);
  std::vector<double> mala_acc(static_cast<std::size_t>(config.replicas), 0.0);
  parallel_for(config.replicas, config.threads, [&](std::int64_t r) {
    const auto ula = collect_ula(pot, report.ula_gamma, config.n, report.burn_in,
                                 (config.seed ^ 0xA11A0000ULL) ^ static_cast<std::uint64_t>(r));
    const auto mala = collect_mala(pot, report.mala_gamma, config.n, report.burn_in,
                                   (config.seed ^ 0x3A1A0000ULL) ^ static_cast<std::uint64_t>(r));
    ula_pool.middleRows(r * config.n, config.n) = ula.samples * pre.sqrt_mat;
    mala_pool.middleRows(r * config.n, config.n) = mala.samples * pre.sqrt_mat;
    mala_acc[static_cast<std::size_t>(r)] = mala.acceptance;
  });
  double acc_sum = 0.0;
  for (double a : mala_acc) acc_sum += a;
  report.mala_acceptance = acc_sum / config.replicas;

  const MarginalAccuracy ula_ma = marginal_accuracy(ula_pool, ref_mapped, config.bins);
  const MarginalAccuracy mala_ma = marginal_accuracy(mala_pool, ref_mapped, config.bins);
  report.ma_ula = ula_ma.per_dimension;
  report.ma_mala = mala_ma.per_dimension;
  report.ma_ula_mean = ula_ma.mean;
  report.ma_mala_mean = mala_ma.mean;

  report.plan_tv = plan(pot.constants(), d, config.epsilon, Metric::Tv, Variant::Basic);
  return report;
}

}  // namespace langevin
