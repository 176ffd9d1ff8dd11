#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "storoo/bounds.hpp"
#include "storoo/stats.hpp"

namespace storoo {

/// Axis-aligned box [lower, upper] in R^D.
class Domain {
 public:
  Domain(std::vector<double> lower, std::vector<double> upper);

  static Domain unit(std::size_t dimension);

  std::size_t dimension() const { return lower_.size(); }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  double largest_side() const;
  bool contains(std::span<const double> x) const;

  bool operator==(const Domain&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Equal k-way split along every dimension, so each expansion produces
/// K = k^D children. Radii use the infinity norm: delta(h) = c * (1/k)^h
/// with c half of the root's largest side.
class SplitScheme {
 public:
  SplitScheme(Domain domain, int splits_per_dimension);

  const Domain& domain() const { return domain_; }
  int splits_per_dimension() const { return k_; }
  std::size_t children_per_split() const { return children_; }
  double c() const { return c_; }
  double rho() const { return 1.0 / k_; }

  /// delta(h) = c * rho^h.
  double radius(int depth) const;

  /// Deepest depth whose cell indices fit in 64 bits and whose boxes stay
  /// well above double resolution; cells at this depth are never split.
  int max_depth() const { return max_depth_; }

 private:
  Domain domain_;
  int k_;
  std::size_t children_;
  double c_;
  int max_depth_;
};

/// B_{h,j} = beta_hat * delta(h)^gamma_hat.
double bias(const SplitScheme& scheme, int depth, double beta_hat,
            double gamma_hat);

using CellId = std::size_t;
inline constexpr CellId kNoCell = std::numeric_limits<CellId>::max();

/// (h, j) address of a cell; j is 1-based within its depth.
struct CellRef {
  int depth = 0;
  std::uint64_t index = 1;

  bool operator==(const CellRef&) const = default;
};

/// Index of the parent of the j-th cell at some depth h > 0.
std::uint64_t parent_index(std::uint64_t index, std::size_t children);

struct Cell {
  int depth = 0;
  std::uint64_t index = 1;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> center;
  bool expanded = false;

  CellId parent = kNoCell;
  CellId first_child = kNoCell;

  NodeStats stats;
  Interval interval;
  SupportBounds support;

  CellRef ref() const { return {depth, index}; }
  /// sup over the box of the infinity distance to the center.
  double inf_radius() const;
};

/// Children of `cell` under `scheme`, in index order Kj-K+1 .. Kj. Child
/// slot s is the mixed-radix number whose digits are the per-dimension
/// sub-interval positions, most significant digit on dimension 0. The
/// children carry no statistics and are leaves. Throws std::logic_error on
/// an expanded cell.
std::vector<Cell> split(const Cell& cell, const SplitScheme& scheme);

/// Partition tree stored in an arena; cell ids are creation order. The
/// leaf set is maintained alongside for fast enumeration.
class PartitionTree {
 public:
  explicit PartitionTree(SplitScheme scheme);

  const SplitScheme& scheme() const { return scheme_; }
  CellId root() const { return 0; }
  std::size_t size() const { return cells_.size(); }

  const Cell& cell(CellId id) const { return cells_.at(id); }
  Cell& cell(CellId id) { return cells_.at(id); }
  std::span<const Cell> cells() const { return cells_; }

  /// Current leaves, in no particular order.
  std::span<const CellId> leaves() const { return leaves_; }

  /// Ids of the children of an expanded cell (contiguous in the arena).
  std::vector<CellId> children(CellId id) const;

  /// Splits a leaf and returns the ids of its new children.
  /// Throws std::logic_error if the cell is already expanded.
  std::vector<CellId> expand(CellId id);

  int deepest_expanded_depth() const;

 private:
  SplitScheme scheme_;
  std::vector<Cell> cells_;
  std::vector<CellId> leaves_;
  std::vector<std::size_t> leaf_slot_;
};

}  // namespace storoo
