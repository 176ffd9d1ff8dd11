#include "storoo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "storoo/analysis.hpp"

namespace storoo {
namespace {

std::string_view to_string(SupportMode mode) {
  return mode == SupportMode::kOracle ? "oracle" : "conservative";
}

std::string_view to_string(ReturnRule rule) {
  return rule == ReturnRule::kDeepestExpanded ? "deepest_expanded" : "highest_lcb";
}

SupportMode parse_support_mode(const std::string& s) {
  if (s == "conservative") return SupportMode::kConservative;
  if (s == "oracle") return SupportMode::kOracle;
  throw std::invalid_argument("ab_mode must be 'conservative' or 'oracle', got '" + s + "'");
}

ReturnRule parse_return_rule(const std::string& s) {
  if (s == "highest_lcb") return ReturnRule::kHighestLcb;
  if (s == "deepest_expanded") return ReturnRule::kDeepestExpanded;
  throw std::invalid_argument("return_rule must be 'highest_lcb' or 'deepest_expanded', got '" +
                              s + "'");
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " +
                               path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

MethodSpec parse_method_spec(const std::string& label, SupportMode default_mode) {
  MethodSpec spec{label, BoundMethod::kKl, default_mode};
  std::string base = label;
  const bool oracle = base.size() > 2 && base.ends_with("-o");
  if (oracle) base.resize(base.size() - 2);
  const auto method = parse_bound_method(base);
  if (!method) throw std::invalid_argument("unknown method '" + label + "'");
  spec.method = *method;
  if (oracle) {
    if (functional_of(*method) != Functional::kCvar) {
      throw std::invalid_argument("method '" + label +
                                  "': the -o (oracle support) variant exists only for CVaR bounds");
    }
    spec.support_mode = SupportMode::kOracle;
  }
  if (functional_of(*method) == Functional::kQuantile ||
      *method == BoundMethod::kExact) {
    spec.support_mode = SupportMode::kConservative;
  }
  return spec;
}

void ExperimentConfig::validate() const {
  if (objective.empty()) throw std::invalid_argument("objective must be set");
  if (method.empty()) throw std::invalid_argument("at least one method is required");
  std::set<std::string> seen;
  for (const auto& m : method) {
    const MethodSpec spec = parse_method_spec(m, ab_mode);
    if (functional_of(spec.method) != functional) {
      throw std::invalid_argument("method '" + m + "' does not bound the " +
                                  std::string(storoo::to_string(functional)));
    }
    if (!seen.insert(m).second) throw std::invalid_argument("duplicate method '" + m + "'");
  }
  if (functional == Functional::kQuantile && !(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("tau must be in (0,1) for quantiles");
  }
  if (functional == Functional::kCvar && !(tau >= 0.0 && tau < 1.0)) {
    throw std::invalid_argument("tau must be in [0,1) for CVaR");
  }
  if (!(beta > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("beta and gamma must be positive");
  }
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (budgets.empty()) throw std::invalid_argument("budgets must not be empty");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1) throw std::invalid_argument("budgets must be positive");
    if (i > 0 && budgets[i] <= budgets[i - 1]) {
      throw std::invalid_argument("budgets must be strictly increasing");
    }
  }
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must be in (0,1)");
  if (!(support_lower < support_upper)) {
    throw std::invalid_argument("support_lower must be below support_upper");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "objective") {
        c.objective = value.get<std::string>();
      } else if (key == "functional") {
        const auto f = parse_functional(value.get<std::string>());
        if (!f) throw std::invalid_argument("unknown functional");
        c.functional = *f;
      } else if (key == "tau") {
        c.tau = value.get<double>();
      } else if (key == "method") {
        c.method = value.is_array() ? value.get<std::vector<std::string>>()
                                    : std::vector<std::string>{value.get<std::string>()};
      } else if (key == "beta") {
        c.beta = value.get<double>();
      } else if (key == "gamma") {
        c.gamma = value.get<double>();
      } else if (key == "k") {
        c.k = value.get<int>();
      } else if (key == "budgets") {
        c.budgets = value.get<std::vector<std::int64_t>>();
      } else if (key == "replications") {
        c.replications = value.get<int>();
      } else if (key == "base_seed") {
        c.base_seed = value.get<std::uint64_t>();
      } else if (key == "eta") {
        c.eta = value.get<double>();
      } else if (key == "ab_mode") {
        c.ab_mode = parse_support_mode(value.get<std::string>());
      } else if (key == "support_lower") {
        c.support_lower = value.get<double>();
      } else if (key == "support_upper") {
        c.support_upper = value.get<double>();
      } else if (key == "return_rule") {
        c.return_rule = parse_return_rule(value.get<std::string>());
      } else if (key == "grid_resolution") {
        c.grid_resolution = value.get<std::size_t>();
      } else if (key == "output_dir") {
        c.output_dir = value.get<std::string>();
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {
      {"objective", c.objective},
      {"functional", std::string(storoo::to_string(c.functional))},
      {"tau", c.tau},
      {"method", c.method},
      {"beta", c.beta},
      {"gamma", c.gamma},
      {"k", c.k},
      {"budgets", c.budgets},
      {"replications", c.replications},
      {"base_seed", c.base_seed},
      {"eta", c.eta},
      {"ab_mode", std::string(to_string(c.ab_mode))},
      {"support_lower", c.support_lower},
      {"support_upper", c.support_upper},
      {"return_rule", std::string(to_string(c.return_rule))},
      {"grid_resolution", c.grid_resolution},
      {"output_dir", c.output_dir},
  };
}

const RegretRow* RegretTable::find(const std::string& method,
                                   std::int64_t budget) const {
  for (const auto& row : rows) {
    if (row.method == method && row.budget == budget) return &row;
  }
  return nullptr;
}

void aggregate(RegretRow& row) {
  const auto n = static_cast<double>(row.replications.size());
  if (row.replications.empty()) {
    row.mean_regret = 0.0;
    row.stderr_regret = 0.0;
    return;
  }
  double sum = 0.0;
  for (const auto& r : row.replications) sum += r.regret_clamped;
  row.mean_regret = sum / n;
  if (row.replications.size() < 2) {
    row.stderr_regret = 0.0;
    return;
  }
  double ss = 0.0;
  for (const auto& r : row.replications) {
    const double d = r.regret_clamped - row.mean_regret;
    ss += d * d;
  }
  row.stderr_regret = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

RegretTable run_experiment(const ExperimentConfig& config,
                           const ObjectiveRegistry& registry, int jobs) {
  config.validate();
  const auto objective = registry.create(config.objective, config.functional);
  const GridOptimum optimum = grid_optimum(*objective, config.tau,
                                           config.functional, config.grid_resolution);

  std::vector<MethodSpec> methods;
  for (const auto& m : config.method) methods.push_back(parse_method_spec(m, config.ab_mode));

  const SplitScheme scheme(objective->domain(), config.k);
  const std::int64_t horizon = config.budgets.back();
  const auto replications = static_cast<std::size_t>(config.replications);

  // results[method * R + r][checkpoint]
  std::vector<std::vector<ReplicationRecord>> results(methods.size() * replications);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= results.size()) return;
      try {
        const MethodSpec& spec = methods[task / replications];
        const int rep = static_cast<int>(task % replications) + 1;
        const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(rep);

        OptimizerConfig oc{.scheme = scheme};
        oc.beta_hat = config.beta;
        oc.gamma_hat = config.gamma;
        oc.method = spec.method;
        oc.bound_params.tau = config.tau;
        oc.bound_params.eta = config.eta;
        oc.bound_params.horizon = horizon;
        oc.bound_params.support = {config.support_lower, config.support_upper};
        oc.budget = horizon;
        oc.return_rule = config.return_rule;
        oc.support_mode = spec.support_mode;
        oc.checkpoints = config.budgets;

        const RunResult run_result = run(*objective, oc, seed);
        auto& out = results[task];
        for (const Checkpoint& cp : run_result.trace) {
          const auto g = objective->true_risk(cp.center, config.tau, config.functional);
          const Regret regret = simple_regret(optimum.g, g.value());
          out.push_back({rep, seed, regret.raw, regret.clamped, cp.center, cp.ref.depth});
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = results.size();
      }
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(results.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  RegretTable table;
  table.objective = config.objective;
  table.functional = config.functional;
  table.tau = config.tau;
  table.dimension = objective->domain().dimension();
  table.g_star = optimum.g;
  table.x_star = optimum.x;
  table.provenance.push_back("storoo " STOROO_VERSION " regret experiment");
  // The output location is not part of the experiment.
  nlohmann::json recorded = config_to_json(config);
  recorded.erase("output_dir");
  table.provenance.push_back("config: " + recorded.dump());
  std::string xs;
  for (double v : optimum.x) xs += (xs.empty() ? "" : " ") + format_real(v);
  table.provenance.push_back("grid optimum: g_star=" + format_real(optimum.g) +
                             " x_star=" + xs);
  table.provenance.push_back(fmt::format("seeds: base_seed+1..base_seed+{} = {}..{}",
                                         config.replications, config.base_seed + 1,
                                         config.base_seed + replications));
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (std::size_t b = 0; b < config.budgets.size(); ++b) {
      RegretRow row;
      row.method = methods[m].label;
      row.budget = config.budgets[b];
      for (std::size_t r = 0; r < replications; ++r) {
        row.replications.push_back(results[m * replications + r].at(b));
      }
      aggregate(row);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void emit_csv(const RegretTable& table, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (const auto& line : table.provenance) out << "# " << line << '\n';
  out << "objective,functional,tau,method,budget,replication,seed,regret_raw,"
         "regret_clamped";
  for (std::size_t d = 0; d < table.dimension; ++d) out << ",recommended_x" << d;
  out << ",depth\n";
  for (const auto& row : table.rows) {
    for (const auto& rep : row.replications) {
      out << table.objective << ',' << storoo::to_string(table.functional) << ','
          << format_real(table.tau) << ',' << row.method << ',' << row.budget << ','
          << rep.replication << ',' << rep.seed << ',' << format_real(rep.regret_raw)
          << ',' << format_real(rep.regret_clamped);
      for (double v : rep.recommended_x) out << ',' << format_real(v);
      out << ',' << rep.depth << '\n';
    }
  }
  finish(out, path);
}

void emit_summary_csv(const RegretTable& table, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (const auto& line : table.provenance) out << "# " << line << '\n';
  out << "method,budget,mean_regret,stderr,n_reps\n";
  for (const auto& row : table.rows) {
    out << row.method << ',' << row.budget << ',' << format_real(row.mean_regret)
        << ',' << format_real(row.stderr_regret) << ',' << row.replications.size()
        << '\n';
  }
  finish(out, path);
}

}  // namespace storoo
