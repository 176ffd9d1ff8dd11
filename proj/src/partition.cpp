#include "storoo/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace storoo {

Domain::Domain(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw std::invalid_argument("Domain: bounds must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(std::isfinite(lower_[i]) && std::isfinite(upper_[i]) &&
          lower_[i] < upper_[i])) {
      throw std::invalid_argument("Domain: requires finite lower[i] < upper[i]");
    }
  }
}

Domain Domain::unit(std::size_t dimension) {
  return Domain(std::vector<double>(dimension, 0.0),
                std::vector<double>(dimension, 1.0));
}

double Domain::largest_side() const {
  double side = 0.0;
  for (std::size_t i = 0; i < dimension(); ++i) {
    side = std::max(side, upper_[i] - lower_[i]);
  }
  return side;
}

bool Domain::contains(std::span<const double> x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  }
  return true;
}

SplitScheme::SplitScheme(Domain domain, int splits_per_dimension)
    : domain_(std::move(domain)), k_(splits_per_dimension) {
  if (k_ < 2) {
    throw std::invalid_argument("SplitScheme: need at least 2 splits per dimension");
  }
  children_ = 1;
  for (std::size_t i = 0; i < domain_.dimension(); ++i) {
    children_ *= static_cast<std::size_t>(k_);
    if (children_ > 1u << 20) {
      throw std::invalid_argument("SplitScheme: too many children per split");
    }
  }
  c_ = 0.5 * domain_.largest_side();
  // k^h <= 1e12 keeps side lengths ~1e4 ulps wide and K^h well inside 64 bits
  // for the dimensions this scheme supports.
  max_depth_ = static_cast<int>(std::floor(12.0 / std::log10(k_)));
  const double index_bits = std::log2(static_cast<double>(children_));
  max_depth_ = std::min(max_depth_, static_cast<int>(std::floor(63.0 / index_bits)));
}

double SplitScheme::radius(int depth) const {
  if (depth < 0) throw std::invalid_argument("SplitScheme::radius: negative depth");
  return c_ / std::pow(static_cast<double>(k_), depth);
}

double bias(const SplitScheme& scheme, int depth, double beta_hat,
            double gamma_hat) {
  return beta_hat * std::pow(scheme.radius(depth), gamma_hat);
}

std::uint64_t parent_index(std::uint64_t index, std::size_t children) {
  return (index + children - 1) / children;
}

double Cell::inf_radius() const {
  double r = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) {
    r = std::max({r, upper[i] - center[i], center[i] - lower[i]});
  }
  return r;
}

std::vector<Cell> split(const Cell& cell, const SplitScheme& scheme) {
  if (cell.expanded) throw std::logic_error("split: cell already expanded");
  const int k = scheme.splits_per_dimension();
  const std::size_t dim = cell.lower.size();
  const std::size_t children = scheme.children_per_split();

  // Breakpoints per dimension, shared by neighbouring children so that the
  // children tile the parent exactly.
  std::vector<std::vector<double>> cuts(dim, std::vector<double>(k + 1));
  for (std::size_t d = 0; d < dim; ++d) {
    const double lo = cell.lower[d];
    const double hi = cell.upper[d];
    for (int s = 0; s <= k; ++s) {
      cuts[d][s] = s == k ? hi : lo + (hi - lo) * s / k;
    }
  }

  std::vector<Cell> out;
  out.reserve(children);
  for (std::size_t slot = 0; slot < children; ++slot) {
    Cell child;
    child.depth = cell.depth + 1;
    child.index = children * (cell.index - 1) + slot + 1;
    child.lower.resize(dim);
    child.upper.resize(dim);
    child.center.resize(dim);
    std::size_t rest = slot;
    for (std::size_t d = dim; d-- > 0;) {
      const auto s = static_cast<int>(rest % k);
      rest /= k;
      child.lower[d] = cuts[d][s];
      child.upper[d] = cuts[d][s + 1];
      child.center[d] = 0.5 * (child.lower[d] + child.upper[d]);
    }
    out.push_back(std::move(child));
  }
  return out;
}

PartitionTree::PartitionTree(SplitScheme scheme) : scheme_(std::move(scheme)) {
  Cell root;
  const Domain& domain = scheme_.domain();
  root.lower.assign(domain.lower().begin(), domain.lower().end());
  root.upper.assign(domain.upper().begin(), domain.upper().end());
  root.center.resize(root.lower.size());
  for (std::size_t i = 0; i < root.center.size(); ++i) {
    root.center[i] = 0.5 * (root.lower[i] + root.upper[i]);
  }
  cells_.push_back(std::move(root));
  leaves_.push_back(0);
  leaf_slot_.push_back(0);
}

std::vector<CellId> PartitionTree::children(CellId id) const {
  const Cell& c = cell(id);
  std::vector<CellId> out;
  if (!c.expanded) return out;
  for (std::size_t i = 0; i < scheme_.children_per_split(); ++i) {
    out.push_back(c.first_child + i);
  }
  return out;
}

std::vector<CellId> PartitionTree::expand(CellId id) {
  if (cell(id).expanded) {
    throw std::logic_error("PartitionTree::expand: cell already expanded");
  }
  if (cell(id).depth >= scheme_.max_depth()) {
    throw std::logic_error("PartitionTree::expand: cell at maximal depth");
  }
  std::vector<Cell> kids = split(cells_[id], scheme_);

  // Remove from the leaf set by swapping with the last leaf.
  const std::size_t slot = leaf_slot_[id];
  const CellId moved = leaves_.back();
  leaves_[slot] = moved;
  leaf_slot_[moved] = slot;
  leaves_.pop_back();

  const CellId first = cells_.size();
  cells_[id].expanded = true;
  cells_[id].first_child = first;
  std::vector<CellId> ids;
  ids.reserve(kids.size());
  for (auto& kid : kids) {
    kid.parent = id;
    const CellId kid_id = cells_.size();
    cells_.push_back(std::move(kid));
    leaf_slot_.push_back(leaves_.size());
    leaves_.push_back(kid_id);
    ids.push_back(kid_id);
  }
  return ids;
}

int PartitionTree::deepest_expanded_depth() const {
  int depth = -1;
  for (const Cell& c : cells_) {
    if (c.expanded) depth = std::max(depth, c.depth);
  }
  return depth;
}

}  // namespace storoo
