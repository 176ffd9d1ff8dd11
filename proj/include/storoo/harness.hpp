#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "storoo/bounds.hpp"
#include "storoo/core.hpp"
#include "storoo/testbed.hpp"

namespace storoo {

/// One optimizer variant in an experiment. The label is the bound method
/// name, with a "-o" suffix for CVaR bounds fed the oracle support.
struct MethodSpec {
  std::string label;
  BoundMethod method = BoundMethod::kKl;
  SupportMode support_mode = SupportMode::kConservative;
};

/// Parses "kl", "thomas-o", ... Throws std::invalid_argument.
MethodSpec parse_method_spec(const std::string& label, SupportMode default_mode);

struct ExperimentConfig {
  std::string objective = "phi1";
  Functional functional = Functional::kQuantile;
  double tau = 0.1;
  std::vector<std::string> method{"kl"};
  double beta = 12.0;
  double gamma = 1.4;
  int k = 3;
  std::vector<std::int64_t> budgets{500, 1000, 2000, 5000};
  int replications = 20;
  std::uint64_t base_seed = 0;
  double eta = 0.1;
  SupportMode ab_mode = SupportMode::kConservative;
  double support_lower = 0.0;
  double support_upper = 1.0;
  ReturnRule return_rule = ReturnRule::kHighestLcb;
  std::size_t grid_resolution = 0;
  std::string output_dir = "storoo_out";

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// JSON keys are the field names above; enums as lowercase strings
/// ("quantile", "conservative", "highest_lcb"). `method` may be a string or
/// an array. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct ReplicationRecord {
  int replication = 0;
  std::uint64_t seed = 0;
  double regret_raw = 0.0;
  double regret_clamped = 0.0;
  std::vector<double> recommended_x;
  int depth = 0;
};

struct RegretRow {
  std::string method;
  std::int64_t budget = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  std::vector<ReplicationRecord> replications;
};

struct RegretTable {
  std::string objective;
  Functional functional = Functional::kQuantile;
  double tau = 0.0;
  std::size_t dimension = 1;
  double g_star = 0.0;
  std::vector<double> x_star;
  /// Written as "# " comment lines above the CSV header.
  std::vector<std::string> provenance;
  std::vector<RegretRow> rows;

  const RegretRow* find(const std::string& method, std::int64_t budget) const;
};

/// Mean and standard error (sample sd / sqrt(n); 0 for n = 1) of the
/// clamped regrets.
void aggregate(RegretRow& row);

/// Runs R replications per method at the largest budget, recording the
/// recommendation at every budget. Replication r (1-based) uses seed
/// base_seed + r. `jobs` workers share the replications; the table does
/// not depend on it.
RegretTable run_experiment(const ExperimentConfig& config,
                           const ObjectiveRegistry& registry, int jobs = 1);

/// Per-replication CSV:
/// objective,functional,tau,method,budget,replication,seed,regret_raw,
/// regret_clamped,recommended_x0..,depth
void emit_csv(const RegretTable& table, const std::filesystem::path& path);

/// Aggregate CSV: method,budget,mean_regret,stderr,n_reps
void emit_summary_csv(const RegretTable& table, const std::filesystem::path& path);

/// SVG of mean regret against budget, one polyline per method, log regret
/// axis with zero plotted at `floor`.
void emit_plot(const RegretTable& table, const std::filesystem::path& path,
               double floor = 1e-8);

/// 17 significant digits, so the text reads back to the same double.
std::string format_real(double v);

}  // namespace storoo
