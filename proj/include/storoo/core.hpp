#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "storoo/bounds.hpp"
#include "storoo/partition.hpp"
#include "storoo/testbed.hpp"

namespace storoo {

enum class ReturnRule {
  /// Among expanded cells with the highest LCB, the deepest ones, then the
  /// highest plug-in estimate.
  kHighestLcb,
  /// The deepest expanded cell, ties by the highest plug-in estimate.
  kDeepestExpanded,
};

/// Where the CVaR/mean bounds take their output support [a, b] from.
enum class SupportMode {
  kConservative,  ///< the fixed support in BoundParams
  kOracle,        ///< the objective's per-point support at each cell center
};

struct OptimizerConfig {
  double beta_hat = 1.0;
  double gamma_hat = 1.0;
  SplitScheme scheme;
  BoundMethod method = BoundMethod::kKl;
  /// The horizon T in the bound parameters is set from `budget` by run().
  BoundParams bound_params{};
  std::int64_t budget = 1000;
  ReturnRule return_rule = ReturnRule::kHighestLcb;
  SupportMode support_mode = SupportMode::kConservative;
  /// Budgets at which the current recommendation is recorded.
  std::vector<std::int64_t> checkpoints{};
};

struct Checkpoint {
  std::int64_t budget = 0;
  std::int64_t samples_used = 0;
  CellId cell = kNoCell;
  CellRef ref;
  std::vector<double> center;
};

/// State of the selected leaf when the expansion condition fired.
struct ExpansionRecord {
  CellId cell = kNoCell;
  CellRef ref;
  Interval interval;
  double bias = 0.0;
  std::int64_t samples_used = 0;
};

struct RunResult {
  PartitionTree tree;
  CellId recommended = kNoCell;
  CellRef recommended_cell{};
  std::vector<double> recommended_center{};
  /// True when no cell beyond the root was expanded and the best root child
  /// was returned instead.
  bool fallback = false;
  std::int64_t samples_used = 0;
  std::vector<Checkpoint> trace{};
  std::vector<ExpansionRecord> expansions{};
};

/// Runs the optimizer. Deterministic given `seed`. Throws
/// std::invalid_argument for budget < K, a domain mismatch, or a method
/// whose functional cannot use the requested support mode.
RunResult run(const Objective& objective, const OptimizerConfig& config,
              std::uint64_t seed);

/// Leaf maximizing ucb + bias. Leaves with an infinite index are served in
/// creation order; finite ties go to the shallower, then lower-index cell.
CellId select_leaf(const PartitionTree& tree, const OptimizerConfig& config);

/// Cell returned by the configured rule, from the tree's current statistics.
/// `fallback` is set when no non-root cell has been expanded.
CellId recommend(const PartitionTree& tree, const OptimizerConfig& config,
                 const BoundStrategy& strategy, bool* fallback = nullptr);

}  // namespace storoo
