#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "langevin/potentials.hpp"
#include "langevin/schedules.hpp"

namespace langevin {

enum class Variant { Basic, Smooth };
enum class Metric { W2, Tv };

/// Reading of the drift constant's inner factor. Verbatim keeps the printed
/// 2d/kappa * {1 - P/kappa}; Corrected evaluates {1 - P} for sensitivity runs.
enum class RhoReading { Verbatim, Corrected };

struct BoundInputs {
  ConvexityConstants constants;
  int dim = 1;
  StepSchedule schedule;
  double start_dist2 = 0.0;  // |x - x*|^2 at the chain start
  RhoReading rho_reading = RhoReading::Verbatim;
};

/// Evaluated bound with its intermediate constants. Total-variation style
/// values are clamped to [0,1]; `clamped` marks that the raw value (kept in
/// intermediates["raw"]) exceeded 1.
struct BoundReport {
  std::string name;
  double value = 0.0;
  bool clamped = false;
  std::map<std::string, double> intermediates;
};

/// Second-moment drift rho_{n,l}(x) of the inhomogeneous Euler kernel.
double drift_rho(const BoundInputs& inputs, std::int64_t n, std::int64_t l);

/// W2 contraction between two chains over steps n..l, given |x-y|^2.
double w2_contraction(const BoundInputs& inputs, double distance2, std::int64_t n,
                      std::int64_t l);

/// W2 distance to the constant-step stationary law after n steps.
double w2_stationary_contraction(const BoundInputs& inputs, double gamma, std::int64_t n);

/// Squared-W2 bound between the n-step chain law and the target; intermediates
/// expose u1 and u2 (Basic) or u3 (Smooth, requires the Hessian Lipschitz
/// constant).
BoundReport w2_discretization(const BoundInputs& inputs, std::int64_t n, Variant variant);

/// Squared-W2 bound between the target and the constant-step stationary law.
double w2_bias(const ConvexityConstants& constants, int d, double gamma, Variant variant);

/// chi_m(t) = sqrt((4/m)(e^{2mt}-1)), the reflection-coupling length scale.
double chi_m(double m, double t);

/// TV regularization of the diffusion semigroup: two-point, W1, and
/// distance-to-target branches.
double tv_semigroup_two_points(double m, double distance, double t);
double tv_semigroup_w1(double m, double w1, double t);
double tv_semigroup_stationary(double m, int d, double distance_to_min, double t);

/// Lambda_{n,l}(gamma) = kappa^{-1} { prod (1-kappa gamma_j)^{-1} - 1 };
/// 0 for an empty range.
double lambda_tv(const BoundInputs& inputs, std::int64_t n, std::int64_t l);

/// TV contraction of the discrete kernel between two points (reflection
/// coupling analogue).
double tv_kernel_contraction(const BoundInputs& inputs, double distance, std::int64_t n,
                             std::int64_t l);

/// TV distance to the constant-step stationary law after n steps.
double tv_kernel_stationary(const BoundInputs& inputs, double gamma, std::int64_t n);

/// TV bound between the l-step chain law and the diffusion at matched time,
/// split at index n (1 <= n < l). Variant picks the vartheta constant.
BoundReport tv_discretization(const BoundInputs& inputs, std::int64_t l, std::int64_t n,
                              Variant variant);

/// Fixed-step analogue with the dyadic split built in; requires
/// l > ceil(1/gamma). Intermediates expose D1..D4.
BoundReport tv_fixed_step_finite(const BoundInputs& inputs, double gamma, std::int64_t l);

/// TV bound between the target and the constant-step stationary law.
/// Intermediates expose E1, E2, n(gamma) for Smooth, D1, D2 for Basic.
BoundReport tv_bias(const ConvexityConstants& constants, int d, double gamma, Variant variant);

struct PlanResult {
  double gamma = 0.0;
  std::int64_t n = 0;
  double bias = 0.0;   // stationary-law term at gamma (distance scale)
  double total = 0.0;  // re-validated bound at (gamma, n)
};

/// Precision-driven planner: picks gamma so the stationary-law bias is at most
/// epsilon/2, then the smallest n with transient + bias <= epsilon, starting
/// from the minimizer.
PlanResult plan(const ConvexityConstants& constants, int d, double epsilon, Metric metric,
                Variant variant);

}  // namespace langevin
