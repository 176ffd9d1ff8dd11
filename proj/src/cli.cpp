#include "storoo/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "storoo/analysis.hpp"
#include "storoo/bounds.hpp"
#include "storoo/harness.hpp"
#include "storoo/testbed.hpp"

namespace storoo {
namespace {

// Configuration problems detected after flag parsing; reported with exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string config_path;
  std::optional<std::string> objective, functional, ab_mode, return_rule, output_dir;
  std::optional<double> tau, beta, gamma, eta, support_lower, support_upper;
  std::vector<std::string> methods;
  std::vector<std::int64_t> budgets;
  std::optional<int> k, replications;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_resolution;
  int jobs = 1;
};

ExperimentConfig build_config(const RunFlags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw UsageError("cannot open config " + f.config_path);
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config " + f.config_path + ": " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config must be a JSON object");
  }
  if (f.objective) doc["objective"] = *f.objective;
  if (f.functional) doc["functional"] = *f.functional;
  if (f.tau) doc["tau"] = *f.tau;
  if (!f.methods.empty()) doc["method"] = f.methods;
  if (f.beta) doc["beta"] = *f.beta;
  if (f.gamma) doc["gamma"] = *f.gamma;
  if (f.k) doc["k"] = *f.k;
  if (!f.budgets.empty()) doc["budgets"] = f.budgets;
  if (f.replications) doc["replications"] = *f.replications;
  if (f.eta) doc["eta"] = *f.eta;
  if (f.ab_mode) doc["ab_mode"] = *f.ab_mode;
  if (f.support_lower) doc["support_lower"] = *f.support_lower;
  if (f.support_upper) doc["support_upper"] = *f.support_upper;
  if (f.return_rule) doc["return_rule"] = *f.return_rule;
  if (f.grid_resolution) doc["grid_resolution"] = *f.grid_resolution;
  if (f.output_dir) doc["output_dir"] = *f.output_dir;
  if (f.seed) {
    doc["base_seed"] = *f.seed;
  } else if (!doc.contains("base_seed")) {
    if (const char* env = std::getenv("STOROO_SEED")) {
      try {
        doc["base_seed"] = std::stoull(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("STOROO_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  try {
    ExperimentConfig config = config_from_json(doc);
    config.validate();
    return config;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int do_run(const RunFlags& flags, std::ostream& out) {
  const ExperimentConfig config = build_config(flags);
  const RegretTable table =
      run_experiment(config, ObjectiveRegistry::with_builtins(), flags.jobs);
  const std::filesystem::path dir = config.output_dir;
  emit_csv(table, dir / "runs.csv");
  emit_summary_csv(table, dir / "summary.csv");
  emit_plot(table, dir / "regret.svg");
  out << fmt::format("g* = {}\n", format_real(table.g_star));
  out << fmt::format("{:<12} {:>8} {:>14} {:>14}\n", "method", "budget", "mean_regret",
                     "stderr");
  for (const auto& row : table.rows) {
    out << fmt::format("{:<12} {:>8} {:>14.6e} {:>14.6e}\n", row.method, row.budget,
                       row.mean_regret, row.stderr_regret);
  }
  out << "wrote " << (dir / "runs.csv").string() << ", "
      << (dir / "summary.csv").string() << ", " << (dir / "regret.svg").string()
      << '\n';
  return 0;
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open sample file " + path);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    if (token == ",") continue;
    std::replace(token.begin(), token.end(), ',', ' ');
    std::istringstream parts(token);
    double v;
    while (parts >> v) values.push_back(v);
    if (!parts.eof()) throw UsageError("malformed number in " + path + ": " + token);
  }
  if (values.empty()) throw UsageError("sample file " + path + " is empty");
  return values;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"optimistic optimization of quantiles and CVaR of noisy black boxes", "storoo"};
  app.require_subcommand(1);

  // run
  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "run a regret experiment");
  run_cmd->add_option("--config", rf.config_path, "experiment JSON file");
  run_cmd->add_option("--objective", rf.objective);
  run_cmd->add_option("--functional", rf.functional, "quantile, cvar or mean");
  run_cmd->add_option("--tau", rf.tau);
  run_cmd->add_option("--method", rf.methods, "bound method(s); CVaR methods accept -o");
  run_cmd->add_option("--beta", rf.beta);
  run_cmd->add_option("--gamma", rf.gamma);
  run_cmd->add_option("--k", rf.k, "splits per dimension");
  run_cmd->add_option("--budgets", rf.budgets);
  run_cmd->add_option("--replications", rf.replications);
  run_cmd->add_option("--seed", rf.seed, "base seed (default: $STOROO_SEED, then 0)");
  run_cmd->add_option("--eta", rf.eta);
  run_cmd->add_option("--ab-mode", rf.ab_mode, "conservative or oracle");
  run_cmd->add_option("--support-lower", rf.support_lower);
  run_cmd->add_option("--support-upper", rf.support_upper);
  run_cmd->add_option("--return-rule", rf.return_rule, "highest_lcb or deepest_expanded");
  run_cmd->add_option("--grid-resolution", rf.grid_resolution);
  run_cmd->add_option("--output-dir", rf.output_dir);
  run_cmd->add_option("--jobs", rf.jobs, "worker threads")->check(CLI::PositiveNumber);

  // optimum
  std::string opt_objective = "phi1";
  std::string opt_functional = "quantile";
  double opt_tau = 0.1;
  std::size_t opt_resolution = 0;
  auto* opt_cmd = app.add_subcommand("optimum", "print the grid oracle optimum");
  opt_cmd->add_option("--objective", opt_objective);
  opt_cmd->add_option("--functional", opt_functional);
  opt_cmd->add_option("--tau", opt_tau);
  opt_cmd->add_option("--resolution", opt_resolution, "points per dimension");

  // bounds
  std::string b_samples, b_method;
  double b_tau = 0.5, b_eta = 0.1, b_a = 0.0, b_b = 1.0;
  std::int64_t b_horizon = 1000;
  auto* bounds_cmd = app.add_subcommand("bounds", "confidence interval for a sample file");
  bounds_cmd->add_option("--samples", b_samples, "whitespace/comma separated numbers")
      ->required();
  bounds_cmd->add_option("--method", b_method)->required();
  bounds_cmd->add_option("--tau", b_tau);
  bounds_cmd->add_option("--eta", b_eta);
  bounds_cmd->add_option("--T", b_horizon, "time horizon");
  bounds_cmd->add_option("--a", b_a, "support lower bound");
  bounds_cmd->add_option("--b", b_b, "support upper bound");

  // theory
  int theorem = 5;
  ComplexityInputs in;
  SafeConstants v;
  std::int64_t t_horizon = 1000;
  double t_eta = 0.1, t_a = 0.0, t_b = 1.0;
  auto* theory_cmd = app.add_subcommand("theory", "regret-bound constants");
  theory_cmd->add_option("--theorem", theorem, "5 (generic), 8 (quantile) or 14 (CVaR)")
      ->check(CLI::IsMember({5, 8, 14}));
  theory_cmd->add_option("--d", in.d);
  theory_cmd->add_option("--C", in.C);
  theory_cmd->add_option("--K", in.K);
  theory_cmd->add_option("--rho", in.rho);
  theory_cmd->add_option("--beta", in.beta_hat);
  theory_cmd->add_option("--gamma", in.gamma_hat);
  theory_cmd->add_option("--tau", in.tau);
  theory_cmd->add_option("--fmin", in.density_floor, "density floor near the quantile");
  theory_cmd->add_option("--diam", in.diameter, "diameter of the domain");
  theory_cmd->add_option("--theta", v.theta);
  theory_cmd->add_option("--kappa", v.kappa);
  theory_cmd->add_option("--alpha", v.alpha);
  theory_cmd->add_option("--a", t_a);
  theory_cmd->add_option("--b", t_b);
  theory_cmd->add_option("--T", t_horizon);
  theory_cmd->add_option("--eta", t_eta);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (run_cmd->parsed()) return do_run(rf, out);

    if (opt_cmd->parsed()) {
      const auto functional = parse_functional(opt_functional);
      if (!functional) throw UsageError("unknown functional '" + opt_functional + "'");
      const auto registry = ObjectiveRegistry::with_builtins();
      if (!registry.contains(opt_objective)) {
        throw UsageError("unknown objective '" + opt_objective + "'");
      }
      const auto objective = registry.create(opt_objective, *functional);
      const GridOptimum best = grid_optimum(*objective, opt_tau, *functional, opt_resolution);
      out << "x* =";
      for (double x : best.x) out << ' ' << format_real(x);
      out << "\ng* = " << format_real(best.g) << '\n';
      return 0;
    }

    if (bounds_cmd->parsed()) {
      const auto method = parse_bound_method(b_method);
      if (!method) throw UsageError("unknown method '" + b_method + "'");
      NodeStats stats;
      for (double y : read_samples(b_samples)) stats.push(y);
      BoundParams params;
      params.tau = b_tau;
      params.eta = b_eta;
      params.horizon = b_horizon;
      params.support = {b_a, b_b};
      const BoundStrategy strategy(*method, params);
      const Interval iv = strategy.evaluate(stats);
      out << "n = " << stats.count() << '\n';
      out << "lcb = " << format_real(iv.lcb) << '\n';
      out << "ucb = " << format_real(iv.ucb) << '\n';
      out << "estimate = " << format_real(strategy.estimate(stats)) << '\n';
      return 0;
    }

    if (theory_cmd->parsed()) {
      RegretBound rb;
      std::string name;
      if (theorem == 5) {
        rb = regret_bound_generic(v, in, t_horizon, t_eta);
        name = "c1";
      } else if (theorem == 8) {
        rb = regret_bound_quantile(in, t_horizon, t_eta);
        name = "c2";
      } else {
        rb = regret_bound_cvar(in, t_horizon, t_eta, t_a, t_b);
        name = "c3";
      }
      out << name << '=' << format_real(rb.constant) << '\n';
      out << "rate=" << format_real(rb.rate) << '\n';
      out << "bound=" << format_real(rb.bound) << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace storoo
