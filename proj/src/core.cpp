#include "storoo/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace storoo {
namespace {

// Runs one observation at `id`'s center and refreshes its interval.
class Sampler {
 public:
  Sampler(const Objective& objective, const BoundStrategy& strategy,
          RandomStream& rng)
      : objective_(objective), strategy_(strategy), rng_(rng) {}

  void observe(Cell& cell) {
    cell.stats.push(objective_.sample(cell.center, rng_));
    cell.interval = strategy_.evaluate(cell.stats, cell.support);
  }

 private:
  const Objective& objective_;
  const BoundStrategy& strategy_;
  RandomStream& rng_;
};

bool uses_support(BoundMethod method) {
  return method == BoundMethod::kBrown || method == BoundMethod::kThomas ||
         method == BoundMethod::kMeanHoeffding;
}

void assign_support(Cell& cell, const Objective& objective,
                    const OptimizerConfig& config) {
  if (config.support_mode == SupportMode::kOracle) {
    const auto s = objective.support_bounds(cell.center);
    if (!s) {
      throw std::invalid_argument("run: objective '" + objective.name() +
                                  "' has no oracle support bounds");
    }
    cell.support = *s;
  } else {
    cell.support = config.bound_params.support;
  }
}

}  // namespace

CellId select_leaf(const PartitionTree& tree, const OptimizerConfig& config) {
  const auto leaves = tree.leaves();
  if (leaves.empty()) throw std::logic_error("select_leaf: tree has no leaves");

  CellId best_infinite = kNoCell;
  CellId best = kNoCell;
  double best_index = -kInf;
  for (const CellId id : leaves) {
    const Cell& c = tree.cell(id);
    const double index =
        c.interval.ucb + bias(tree.scheme(), c.depth, config.beta_hat,
                              config.gamma_hat);
    if (index == kInf) {
      best_infinite = std::min(best_infinite, id);
      continue;
    }
    if (best == kNoCell || index > best_index) {
      best = id;
      best_index = index;
      continue;
    }
    if (index == best_index) {
      const Cell& b = tree.cell(best);
      if (c.depth < b.depth || (c.depth == b.depth && c.index < b.index)) {
        best = id;
      }
    }
  }
  return best_infinite != kNoCell ? best_infinite : best;
}

CellId recommend(const PartitionTree& tree, const OptimizerConfig& config,
                 const BoundStrategy& strategy, bool* fallback) {
  std::vector<CellId> expanded;
  for (CellId id = 1; id < tree.size(); ++id) {
    if (tree.cell(id).expanded) expanded.push_back(id);
  }
  if (fallback) *fallback = expanded.empty();

  auto estimate = [&](CellId id) {
    const Cell& c = tree.cell(id);
    return c.stats.empty() ? -kInf : strategy.estimate(c.stats);
  };
  // Highest estimate, then lowest index.
  auto best_by_estimate = [&](const std::vector<CellId>& ids) {
    CellId best = ids.front();
    double best_g = estimate(best);
    for (const CellId id : ids) {
      const double g = estimate(id);
      if (g > best_g || (g == best_g && tree.cell(id).index < tree.cell(best).index)) {
        best = id;
        best_g = g;
      }
    }
    return best;
  };
  auto deepest = [&](const std::vector<CellId>& ids) {
    int depth = -1;
    for (const CellId id : ids) depth = std::max(depth, tree.cell(id).depth);
    std::vector<CellId> out;
    for (const CellId id : ids) {
      if (tree.cell(id).depth == depth) out.push_back(id);
    }
    return out;
  };

  if (expanded.empty()) {
    const auto children = tree.children(tree.root());
    if (children.empty()) throw std::logic_error("recommend: root not expanded");
    return best_by_estimate(children);
  }

  if (config.return_rule == ReturnRule::kDeepestExpanded) {
    return best_by_estimate(deepest(expanded));
  }

  double top = -kInf;
  for (const CellId id : expanded) top = std::max(top, tree.cell(id).interval.lcb);
  std::vector<CellId> highest;
  for (const CellId id : expanded) {
    if (tree.cell(id).interval.lcb == top) highest.push_back(id);
  }
  return best_by_estimate(deepest(highest));
}

RunResult run(const Objective& objective, const OptimizerConfig& config,
              std::uint64_t seed) {
  const SplitScheme& scheme = config.scheme;
  if (!(scheme.domain() == objective.domain())) {
    throw std::invalid_argument("run: objective domain differs from the configured domain");
  }
  const auto k = static_cast<std::int64_t>(scheme.children_per_split());
  if (config.budget < k) {
    throw std::invalid_argument("run: budget smaller than the number of children K");
  }
  if (!(config.beta_hat > 0.0 && config.gamma_hat > 0.0)) {
    throw std::invalid_argument("run: beta_hat and gamma_hat must be positive");
  }
  if (config.support_mode == SupportMode::kOracle && !uses_support(config.method)) {
    throw std::invalid_argument("run: oracle support only applies to CVaR and mean bounds");
  }

  BoundParams params = config.bound_params;
  params.horizon = config.budget;
  const BoundStrategy strategy(config.method, params);

  std::vector<std::int64_t> checkpoints = config.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_checkpoint = 0;

  RunResult result{.tree = PartitionTree(scheme)};
  PartitionTree& tree = result.tree;
  RandomStream rng(seed);
  Sampler sampler(objective, strategy, rng);
  std::int64_t& used = result.samples_used;

  auto expand_and_sample = [&](CellId id) {
    for (const CellId child : tree.expand(id)) {
      assign_support(tree.cell(child), objective, config);
      sampler.observe(tree.cell(child));
      ++used;
    }
  };
  auto record_checkpoints = [&](bool final) {
    while (next_checkpoint < checkpoints.size() &&
           (final || checkpoints[next_checkpoint] <= used)) {
      Checkpoint cp;
      cp.budget = checkpoints[next_checkpoint++];
      cp.samples_used = used;
      cp.cell = recommend(tree, config, strategy);
      cp.ref = tree.cell(cp.cell).ref();
      cp.center = tree.cell(cp.cell).center;
      result.trace.push_back(std::move(cp));
    }
  };

  expand_and_sample(tree.root());

  while (used < config.budget) {
    record_checkpoints(false);
    const CellId id = select_leaf(tree, config);
    Cell& cell = tree.cell(id);
    const double b = bias(scheme, cell.depth, config.beta_hat, config.gamma_hat);
    if (cell.interval.width() <= b && cell.depth < scheme.max_depth()) {
      result.expansions.push_back({id, cell.ref(), cell.interval, b, used});
      expand_and_sample(id);
    } else {
      sampler.observe(cell);
      ++used;
    }
  }
  record_checkpoints(true);

  result.recommended = recommend(tree, config, strategy, &result.fallback);
  result.recommended_cell = tree.cell(result.recommended).ref();
  result.recommended_center = tree.cell(result.recommended).center;
  return result;
}

}  // namespace storoo
