#include "langevin/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "langevin/bench.hpp"
#include "langevin/bounds.hpp"
#include "langevin/coupling.hpp"
#include "langevin/errors.hpp"
#include "langevin/estimators.hpp"
#include "langevin/potentials.hpp"
#include "langevin/samplers.hpp"
#include "langevin/schedules.hpp"

namespace langevin {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw invalid_parameter("expected a comma-separated number list, got '" + s + "'");
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<std::int64_t>(v));
  return out;
}

// "const:0.1" or "poly:1.0,0.5"; the JSON config form
// {"kind":"constant","gamma":0.1} is translated to this before parsing.
StepSchedule parse_schedule(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw invalid_parameter("schedule must look like const:<gamma> or poly:<gamma1>,<alpha>");
  }
  const std::string kind = s.substr(0, colon);
  const std::vector<double> params = parse_double_list(s.substr(colon + 1));
  if (kind == "const" || kind == "constant") {
    if (params.size() != 1) throw invalid_parameter("const schedule takes one parameter");
    return StepSchedule::constant(params[0]);
  }
  if (kind == "poly" || kind == "polynomial") {
    if (params.size() != 2) throw invalid_parameter("poly schedule takes gamma1,alpha");
    return StepSchedule::polynomial(params[0], params[1]);
  }
  throw invalid_parameter("unknown schedule kind '" + kind + "'");
}

json schedule_to_json(const StepSchedule& schedule) {
  if (schedule.is_constant()) return json{{"kind", "constant"}, {"gamma", schedule.first()}};
  return json{{"kind", "poly"}, {"gamma1", schedule.first()}, {"alpha", schedule.alpha()}};
}

Functional parse_functional(const std::string& name, double* osc) {
  const auto colon = name.find(':');
  const std::string kind = name.substr(0, colon == std::string::npos ? name.size() : colon);
  const int index = colon == std::string::npos ? 0 : std::stoi(name.substr(colon + 1));
  if (kind == "coord") {
    if (osc) *osc = 0.0;  // unbounded; oscillation must be given explicitly
    return [index](const Eigen::VectorXd& x) { return x[index]; };
  }
  if (kind == "norm2") {
    if (osc) *osc = 0.0;
    return [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  }
  if (kind == "pos") {
    if (osc) *osc = 1.0;
    return [index](const Eigen::VectorXd& x) { return x[index] > 0.0 ? 1.0 : 0.0; };
  }
  throw invalid_parameter("unknown functional '" + name + "' (coord:i, norm2, pos:i)");
}

struct PotentialFlags {
  std::string precision;
  std::string dataset;
  std::string label;
  std::string synthetic;
  std::uint64_t synthetic_seed = 42;
};

void add_potential_flags(CLI::App* cmd, PotentialFlags& flags) {
  cmd->add_option("--precision", flags.precision,
                  "Gaussian potential: comma-separated precision diagonal");
  cmd->add_option("--dataset", flags.dataset, "CSV path for a logistic posterior");
  cmd->add_option("--label", flags.label, "label column name of --dataset");
  cmd->add_option("--synthetic", flags.synthetic, "synthetic logistic data as d,p");
  cmd->add_option("--synthetic-seed", flags.synthetic_seed, "seed of the synthetic dataset");
}

Dataset dataset_from_flags(const PotentialFlags& flags) {
  if (!flags.dataset.empty()) {
    if (flags.label.empty()) throw invalid_parameter("--dataset requires --label");
    return load_dataset(flags.dataset, flags.label);
  }
  const std::vector<std::int64_t> dp = parse_int_list(flags.synthetic);
  if (dp.size() != 2) throw invalid_parameter("--synthetic expects d,p");
  return make_synthetic_logistic(static_cast<int>(dp[0]), static_cast<int>(dp[1]),
                                 flags.synthetic_seed);
}

Potential potential_from_flags(const PotentialFlags& flags) {
  if (!flags.precision.empty()) {
    const std::vector<double> diag = parse_double_list(flags.precision);
    return make_gaussian_potential(
        Eigen::Map<const Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size())));
  }
  if (flags.dataset.empty() && flags.synthetic.empty()) {
    throw invalid_parameter("select a potential: --precision, --dataset or --synthetic");
  }
  const Dataset data = dataset_from_flags(flags);
  return make_logistic_potential(
      LogisticModel{data.design, data.labels, zellner_prior(data)});
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw invalid_parameter("cannot open output file: " + out_path);
  f << text;
}

json report_to_json(const BoundReport& report) {
  json j{{"name", report.name}, {"value", report.value}, {"clamped", report.clamped}};
  json inter = json::object();
  for (const auto& [key, value] : report.intermediates) inter[key] = value;
  j["intermediates"] = inter;
  return j;
}

// Applies a JSON config file: each key becomes --key=value placed before the
// command-line flags, so explicit flags win under the take-last policy.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw invalid_parameter("--config needs a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  if (rest.empty()) throw invalid_parameter("--config requires a subcommand");

  std::ifstream f(config_path);
  if (!f) throw invalid_parameter("cannot open config file: " + config_path);
  json config;
  try {
    f >> config;
  } catch (const json::exception& e) {
    throw invalid_parameter("config parse failure: " + std::string(e.what()));
  }
  if (!config.is_object()) throw invalid_parameter("config must be a JSON object");

  std::vector<std::string> merged{rest.front()};
  for (const auto& [key, value] : config.items()) {
    if (key == "schedule" && value.is_object()) {
      const std::string kind = value.at("kind").get<std::string>();
      if (kind == "constant" || kind == "const") {
        merged.push_back("--schedule=const:" + fmt17(value.at("gamma").get<double>()));
      } else {
        merged.push_back("--schedule=poly:" + fmt17(value.at("gamma1").get<double>()) + "," +
                         fmt17(value.at("alpha").get<double>()));
      }
    } else if (value.is_boolean()) {
      if (value.get<bool>()) merged.push_back("--" + key);
    } else if (value.is_string()) {
      merged.push_back("--" + key + "=" + value.get<std::string>());
    } else {
      merged.push_back("--" + key + "=" + value.dump());
    }
  }
  merged.insert(merged.end(), rest.begin() + 1, rest.end());
  return merged;
}

struct CliOptions {
  // sample / estimate
  PotentialFlags potential;
  std::string schedule = "const:0.1";
  std::string algo = "ula";
  std::int64_t n = 1000;
  std::int64_t burn_in = -1;
  std::uint64_t seed = 0;
  std::string functional;
  std::string stream_csv;
  std::string start;
  std::string out_path;
  // bound / plan
  std::string theorem;
  std::string branch = "two_points";
  double m = 1.0, L = 1.0, ltilde = -1.0;
  int d = 1;
  double gamma = 0.1;
  std::int64_t range_n = 1, range_l = 1;
  double start_dist2 = 0.0;
  double distance = 1.0, distance2 = 1.0, w1 = 1.0, t = 1.0;
  std::string variant = "basic";
  std::string rho_reading = "verbatim";
  std::string metric = "w2";
  double epsilon = 0.1;
  // couple
  std::int64_t reps = 100000;
  std::string n_grid = "1,5,10,20";
  int threads = 0;
  // estimate
  double osc = -1.0;
  std::string r_list = "0.2,0.5";
  // u4plot
  double kappa = 1.0;
  std::int64_t n_max = 1000;
  // bench
  std::int64_t reference_steps = -1;
  int replicas = 1;
  int bins = 50;
  std::string ma_csv;
};

ConvexityConstants constants_from(const CliOptions& opt) {
  ConvexityConstants c{opt.m, opt.L};
  if (opt.ltilde >= 0.0) c.hessian_lipschitz = opt.ltilde;
  return c;
}

Variant variant_from(const std::string& name) {
  if (name == "basic") return Variant::Basic;
  if (name == "smooth") return Variant::Smooth;
  throw invalid_parameter("variant must be basic or smooth");
}

int cmd_sample(const CliOptions& opt, std::ostream& out) {
  const Potential pot = potential_from_flags(opt.potential);
  const StepSchedule schedule = parse_schedule(opt.schedule);
  const Algo algo = opt.algo == "mala" ? Algo::Mala : Algo::Ula;
  const std::int64_t burn = opt.burn_in >= 0 ? opt.burn_in : default_burn_in(schedule, opt.n);

  Functional f;
  if (!opt.functional.empty()) f = parse_functional(opt.functional, nullptr);
  std::optional<Eigen::VectorXd> start;
  if (!opt.start.empty()) {
    const std::vector<double> v = parse_double_list(opt.start);
    start = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  const ChainRun run = run_chain(pot, schedule, algo, opt.n, burn, opt.seed, f, start);

  if (!opt.stream_csv.empty() && !run.functional_stream.empty()) {
    std::ofstream csv(opt.stream_csv);
    if (!csv) throw invalid_parameter("cannot open " + opt.stream_csv);
    csv << "step,value\n";
    for (std::size_t i = 0; i < run.functional_stream.size(); ++i) {
      csv << (run.burn_in + 1 + static_cast<std::int64_t>(i)) << ","
          << fmt17(run.functional_stream[i]) << "\n";
    }
  }

  json j;
  j["final_position"] = std::vector<double>(
      run.final_state.position.data(),
      run.final_state.position.data() + run.final_state.position.size());
  j["n"] = run.n_steps;
  j["N"] = run.burn_in;
  j["acceptance_rate"] = run.acceptance_rate;
  j["seed"] = run.seed;
  emit(j.dump(2) + "\n", opt.out_path, out);
  return 0;
}

int cmd_bound(const CliOptions& opt, std::ostream& out) {
  const ConvexityConstants c = constants_from(opt);
  const StepSchedule schedule = parse_schedule(opt.schedule);
  const BoundInputs inputs{c, opt.d, schedule, opt.start_dist2,
                           opt.rho_reading == "corrected" ? RhoReading::Corrected
                                                          : RhoReading::Verbatim};
  const Variant variant = variant_from(opt.variant);

  BoundReport report;
  if (opt.theorem == "drift_rho") {
    report.name = "drift_rho";
    report.value = drift_rho(inputs, opt.range_n, opt.range_l);
  } else if (opt.theorem == "w2_contraction") {
    report.name = "w2_contraction";
    report.value = w2_contraction(inputs, opt.distance2, opt.range_n, opt.range_l);
  } else if (opt.theorem == "w2_stationary") {
    report.name = "w2_stationary";
    report.value = w2_stationary_contraction(inputs, opt.gamma, opt.range_n);
  } else if (opt.theorem == "w2_discretization") {
    report = w2_discretization(inputs, opt.range_n, variant);
    report.intermediates["w2"] = std::sqrt(report.value);
  } else if (opt.theorem == "w2_bias") {
    const double squared = w2_bias(c, opt.d, opt.gamma, variant);
    report.name = "w2_bias/" + opt.variant;
    report.value = std::sqrt(squared);
    report.intermediates["w2_squared"] = squared;
  } else if (opt.theorem == "tv_semigroup") {
    report.name = "tv_semigroup/" + opt.branch;
    if (opt.branch == "two_points") {
      report.value = tv_semigroup_two_points(opt.m, opt.distance, opt.t);
    } else if (opt.branch == "w1") {
      report.value = tv_semigroup_w1(opt.m, opt.w1, opt.t);
    } else if (opt.branch == "stationary") {
      report.value = tv_semigroup_stationary(opt.m, opt.d, opt.distance, opt.t);
    } else {
      throw invalid_parameter("tv_semigroup branch must be two_points, w1 or stationary");
    }
    report.intermediates["chi_m"] = chi_m(opt.m, opt.t);
  } else if (opt.theorem == "lambda") {
    report.name = "lambda";
    report.value = lambda_tv(inputs, opt.range_n, opt.range_l);
  } else if (opt.theorem == "tv_kernel") {
    report.name = "tv_kernel";
    report.value = tv_kernel_contraction(inputs, opt.distance, opt.range_n, opt.range_l);
  } else if (opt.theorem == "tv_kernel_stationary") {
    report.name = "tv_kernel_stationary";
    report.value = tv_kernel_stationary(inputs, opt.gamma, opt.range_n);
  } else if (opt.theorem == "tv_discretization") {
    report = tv_discretization(inputs, opt.range_l, opt.range_n, variant);
  } else if (opt.theorem == "tv_fixed_step") {
    report = tv_fixed_step_finite(inputs, opt.gamma, opt.range_l);
  } else if (opt.theorem == "tv_bias") {
    report = tv_bias(c, opt.d, opt.gamma, variant);
  } else {
    throw invalid_parameter("unknown theorem '" + opt.theorem + "'");
  }
  emit(report_to_json(report).dump(2) + "\n", opt.out_path, out);
  return 0;
}

int cmd_plan(const CliOptions& opt, std::ostream& out) {
  const ConvexityConstants c = constants_from(opt);
  const Metric metric = opt.metric == "tv" ? Metric::Tv : Metric::W2;
  const PlanResult r = plan(c, opt.d, opt.epsilon, metric, variant_from(opt.variant));
  json j{{"metric", opt.metric},   {"variant", opt.variant}, {"epsilon", opt.epsilon},
         {"gamma_eps", r.gamma},   {"n_eps", r.n},           {"bias", r.bias},
         {"total_bound", r.total}};
  emit(j.dump(2) + "\n", opt.out_path, out);
  return 0;
}

int cmd_couple(const CliOptions& opt, std::ostream& out) {
  const Potential pot = potential_from_flags(opt.potential);
  const StepSchedule schedule = parse_schedule(opt.schedule);
  const std::vector<std::int64_t> grid = parse_int_list(opt.n_grid);
  std::int64_t horizon = 1;
  for (std::int64_t n : grid) horizon = std::max(horizon, n);
  const ARCouplingSpec spec = ula_as_ar_spec(pot, schedule, horizon);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(pot.dim());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(pot.dim());
  x[0] = opt.distance;

  std::ostringstream csv;
  csv << "n,empirical_fraction,std_error,theoretical_bound\n";
  for (std::int64_t n : grid) {
    const FractionEstimate est =
        simulate_uncoupled_fraction(spec, x, y, n, opt.reps, opt.seed, opt.threads);
    csv << n << "," << fmt17(est.fraction) << "," << fmt17(est.std_error) << ","
        << fmt17(tv_bound_ar(spec, x, y, n)) << "\n";
  }
  emit(csv.str(), opt.out_path, out);
  return 0;
}

int cmd_estimate(const CliOptions& opt, std::ostream& out) {
  const Potential pot = potential_from_flags(opt.potential);
  const StepSchedule schedule = parse_schedule(opt.schedule);
  const std::int64_t burn = opt.burn_in >= 0 ? opt.burn_in : default_burn_in(schedule, opt.n);

  double default_osc = 1.0;
  const std::string fname = opt.functional.empty() ? "pos:0" : opt.functional;
  const Functional f = parse_functional(fname, &default_osc);
  const double osc = opt.osc > 0.0 ? opt.osc : default_osc;
  if (!(osc > 0.0)) {
    throw invalid_parameter("estimate: '" + fname +
                            "' is unbounded; pass --osc for the bounds");
  }

  const ChainRun run = run_chain(pot, schedule, Algo::Ula, opt.n, burn, opt.seed, f);
  const WeightedEstimatorConfig config{burn, opt.n, schedule, osc};
  const ConvexityConstants& c = pot.constants();

  json j;
  j["estimate"] = estimate(run, config);
  j["osc"] = osc;
  j["schedule"] = schedule_to_json(schedule);
  j["n"] = opt.n;
  j["N"] = burn;
  j["seed"] = opt.seed;
  j["u4"] = u4(config, c.kappa());
  j["u5"] = u5(config, c.kappa());
  j["variance_bound"] = variance_bound(config, c);
  const Variant variant = variant_from(opt.variant);
  if (variant == Variant::Basic || c.hessian_lipschitz) {
    j["mse_bound"] = report_to_json(mse_bound(config, c, pot.dim(), 0.0, variant));
  }
  json conc = json::array();
  for (double r : parse_double_list(opt.r_list)) {
    conc.push_back(json{{"r", r}, {"bound", concentration_bound(config, c, r)}});
  }
  j["concentration"] = conc;
  emit(j.dump(2) + "\n", opt.out_path, out);
  return 0;
}

int cmd_u4plot(const CliOptions& opt, std::ostream& out) {
  const StepSchedule schedule = parse_schedule(opt.schedule);
  const std::int64_t burn = opt.burn_in >= 0 ? opt.burn_in : 0;
  const std::vector<double> values =
      u4_times_gamma_sweep(schedule, opt.kappa, opt.n_max, burn);
  std::ostringstream csv;
  csv << "n,u4_times_gamma_sum\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    csv << (i + 1) << "," << fmt17(values[i]) << "\n";
  }
  emit(csv.str(), opt.out_path, out);
  return 0;
}

int cmd_bench(const CliOptions& opt, std::ostream& out) {
  const Dataset data = dataset_from_flags(opt.potential);
  BenchmarkConfig config;
  config.n = opt.n;
  config.burn_in = opt.burn_in;
  config.reference_steps = opt.reference_steps;
  config.replicas = opt.replicas;
  config.seed = opt.seed;
  config.bins = opt.bins;
  config.gamma = opt.gamma;
  config.epsilon = opt.epsilon;
  config.threads = opt.threads;
  const BenchmarkReport report = run_benchmark(data, config);

  if (!opt.ma_csv.empty()) {
    std::ofstream csv(opt.ma_csv);
    if (!csv) throw invalid_parameter("cannot open " + opt.ma_csv);
    csv << "dimension,ma_ula,ma_mala\n";
    for (Eigen::Index j = 0; j < report.ma_ula.size(); ++j) {
      csv << (j + 1) << "," << fmt17(report.ma_ula[j]) << "," << fmt17(report.ma_mala[j]) << "\n";
    }
  }

  json j;
  j["dim"] = report.dim;
  j["observations"] = report.observations;
  j["m"] = report.m;
  j["L"] = report.L;
  j["kappa"] = report.kappa;
  j["ula_gamma"] = report.ula_gamma;
  j["mala_gamma"] = report.mala_gamma;
  j["mala_acceptance"] = report.mala_acceptance;
  j["reference_acceptance"] = report.reference_acceptance;
  j["n"] = report.n;
  j["burn_in"] = report.burn_in;
  j["reference_steps"] = report.reference_steps;
  j["replicas"] = report.replicas;
  j["seed"] = report.seed;
  j["ma_ula_mean"] = report.ma_ula_mean;
  j["ma_mala_mean"] = report.ma_mala_mean;
  j["ma_ula"] = std::vector<double>(report.ma_ula.data(),
                                    report.ma_ula.data() + report.ma_ula.size());
  j["ma_mala"] = std::vector<double>(report.ma_mala.data(),
                                     report.ma_mala.data() + report.ma_mala.size());
  j["plan_tv"] = json{{"epsilon", opt.epsilon},
                      {"gamma_eps", report.plan_tv.gamma},
                      {"n_eps", report.plan_tv.n},
                      {"bias", report.plan_tv.bias},
                      {"total_bound", report.plan_tv.total}};
  emit(j.dump(2) + "\n", opt.out_path, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Langevin Monte Carlo samplers with non-asymptotic error bounds"};
  app.require_subcommand(1);

  CliOptions opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out_path, "write the report to a file instead of stdout");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--threads", opt.threads,
                    "worker threads (0 = LANGEVIN_KIT_THREADS or all cores)");
  };

  CLI::App* sample = app.add_subcommand("sample", "run a ULA or MALA chain");
  add_potential_flags(sample, opt.potential);
  sample->add_option("--schedule", opt.schedule, "const:<gamma> or poly:<gamma1>,<alpha>");
  sample->add_option("--algo", opt.algo, "ula or mala")
      ->check(CLI::IsMember({"ula", "mala"}));
  sample->add_option("--n", opt.n, "effective steps after burn-in");
  sample->add_option("--burn-in", opt.burn_in, "burn-in steps (-1: protocol default)");
  sample->add_option("--functional", opt.functional, "stream f(X_k): coord:i, norm2, pos:i");
  sample->add_option("--stream-csv", opt.stream_csv, "CSV path for the functional stream");
  sample->add_option("--start", opt.start, "comma-separated start point");
  add_common(sample);

  CLI::App* bound = app.add_subcommand("bound", "evaluate a named bound");
  bound->add_option("--theorem", opt.theorem, "bound identifier")->required();
  bound->add_option("--branch", opt.branch, "tv_semigroup branch");
  bound->add_option("--m", opt.m, "strong convexity constant");
  bound->add_option("--L", opt.L, "gradient Lipschitz constant");
  bound->add_option("--ltilde", opt.ltilde, "Hessian Lipschitz constant (Smooth variant)");
  bound->add_option("--d", opt.d, "dimension");
  bound->add_option("--gamma", opt.gamma, "constant step size");
  bound->add_option("--schedule", opt.schedule, "step schedule for range bounds");
  bound->add_option("--n", opt.range_n, "range start / step count");
  bound->add_option("--l", opt.range_l, "range end / total steps");
  bound->add_option("--start-dist2", opt.start_dist2, "|x - x*|^2 at the start");
  bound->add_option("--distance", opt.distance, "|x - y|");
  bound->add_option("--distance2", opt.distance2, "|x - y|^2");
  bound->add_option("--w1", opt.w1, "Wasserstein-1 distance input");
  bound->add_option("--t", opt.t, "diffusion time");
  bound->add_option("--variant", opt.variant, "basic or smooth");
  bound->add_option("--rho-reading", opt.rho_reading, "verbatim or corrected");
  add_common(bound);

  CLI::App* planner = app.add_subcommand("plan", "step size and iterations for a precision");
  planner->add_option("--metric", opt.metric, "w2 or tv")->check(CLI::IsMember({"w2", "tv"}));
  planner->add_option("--variant", opt.variant, "basic or smooth");
  planner->add_option("--epsilon", opt.epsilon, "target precision")->required();
  planner->add_option("--m", opt.m, "strong convexity constant");
  planner->add_option("--L", opt.L, "gradient Lipschitz constant");
  planner->add_option("--ltilde", opt.ltilde, "Hessian Lipschitz constant");
  planner->add_option("--d", opt.d, "dimension");
  add_common(planner);

  CLI::App* couple = app.add_subcommand("couple", "coupling experiment for ULA as an AR chain");
  add_potential_flags(couple, opt.potential);
  couple->add_option("--schedule", opt.schedule, "step schedule");
  couple->add_option("--distance", opt.distance, "initial |x - y|");
  couple->add_option("--n-grid", opt.n_grid, "comma-separated horizons");
  couple->add_option("--reps", opt.reps, "Monte Carlo replicas per horizon");
  add_common(couple);

  CLI::App* estimate_cmd = app.add_subcommand("estimate", "weighted estimator and its bounds");
  add_potential_flags(estimate_cmd, opt.potential);
  estimate_cmd->add_option("--schedule", opt.schedule, "step schedule");
  estimate_cmd->add_option("--n", opt.n, "estimator length");
  estimate_cmd->add_option("--burn-in", opt.burn_in, "burn-in (-1: protocol default)");
  estimate_cmd->add_option("--functional", opt.functional, "coord:i, norm2, pos:i");
  estimate_cmd->add_option("--osc", opt.osc, "oscillation of the functional");
  estimate_cmd->add_option("--r", opt.r_list, "deviation levels for the concentration bound");
  estimate_cmd->add_option("--variant", opt.variant, "basic or smooth (MSE bias route)");
  add_common(estimate_cmd);

  CLI::App* u4plot = app.add_subcommand("u4plot", "CSV of Gamma_n * u4 along the horizon");
  u4plot->add_option("--schedule", opt.schedule, "step schedule");
  u4plot->add_option("--kappa", opt.kappa, "contraction rate");
  u4plot->add_option("--n-max", opt.n_max, "largest horizon");
  u4plot->add_option("--burn-in", opt.burn_in, "estimator burn-in (default 0)");
  add_common(u4plot);

  CLI::App* bench = app.add_subcommand("bench", "logistic regression benchmark");
  add_potential_flags(bench, opt.potential);
  bench->add_option("--n", opt.n, "effective iterations per run");
  bench->add_option("--burn-in", opt.burn_in, "burn-in (-1: ceil(sqrt(n)))");
  bench->add_option("--reference-steps", opt.reference_steps, "MALA reference length (-1: 10n)");
  bench->add_option("--replicas", opt.replicas, "chain replicas per algorithm");
  bench->add_option("--bins", opt.bins, "histogram bins for marginal accuracy");
  bench->add_option("--gamma", opt.gamma, "ULA step (-1: 10/(kappa sqrt(n)))")
      ->default_val(-1.0);
  bench->add_option("--epsilon", opt.epsilon, "planner illustration precision");
  bench->add_option("--ma-csv", opt.ma_csv, "per-dimension marginal accuracy CSV");
  add_common(bench);

  for (CLI::App* sub : app.get_subcommands({})) {
    for (CLI::Option* o : sub->get_options()) {
      o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  try {
    const std::vector<std::string> args = merge_config(raw_args);
    // CLI11 parses reversed argv-style vectors.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (sample->parsed()) return cmd_sample(opt, out);
    if (bound->parsed()) return cmd_bound(opt, out);
    if (planner->parsed()) return cmd_plan(opt, out);
    if (couple->parsed()) return cmd_couple(opt, out);
    if (estimate_cmd->parsed()) return cmd_estimate(opt, out);
    if (u4plot->parsed()) return cmd_u4plot(opt, out);
    if (bench->parsed()) return cmd_bench(opt, out);
    err << "error: no subcommand selected\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const invalid_parameter& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace langevin
