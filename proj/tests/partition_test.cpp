#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "storoo/partition.hpp"

using namespace storoo;

namespace {

double volume(const Cell& cell) {
  double v = 1.0;
  for (std::size_t d = 0; d < cell.lower.size(); ++d) v *= cell.upper[d] - cell.lower[d];
  return v;
}

// Interiors of two boxes intersect.
bool overlaps(const Cell& a, const Cell& b) {
  for (std::size_t d = 0; d < a.lower.size(); ++d) {
    if (std::min(a.upper[d], b.upper[d]) <= std::max(a.lower[d], b.lower[d])) return false;
  }
  return true;
}

}  // namespace

TEST(Domain, RejectsMalformedBoxes) {
  EXPECT_THROW(Domain({0.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(Domain({0.0, 1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(Domain({}, {}), std::invalid_argument);
  const Domain d({-0.5, -0.5}, {1.0, 0.5});
  EXPECT_EQ(d.dimension(), 2u);
  EXPECT_DOUBLE_EQ(d.largest_side(), 1.5);
  const double in[] = {0.0, 0.5};
  const double out[] = {0.0, 0.6};
  EXPECT_TRUE(d.contains(in));
  EXPECT_FALSE(d.contains(out));
}

TEST(SplitScheme, Radius) {
  const SplitScheme unit(Domain::unit(1), 3);
  EXPECT_DOUBLE_EQ(unit.radius(0), 0.5);
  EXPECT_DOUBLE_EQ(unit.radius(1), 1.0 / 6.0);
  const SplitScheme sq(Domain({-0.5, -0.5}, {1.0, 1.0}), 3);
  EXPECT_DOUBLE_EQ(sq.radius(2), 1.0 / 12.0);
  EXPECT_EQ(sq.children_per_split(), 9u);
  EXPECT_DOUBLE_EQ(sq.rho(), 1.0 / 3.0);
  for (int h = 0; h < 20; ++h) EXPECT_LT(unit.radius(h + 1), unit.radius(h));
  EXPECT_THROW(SplitScheme(Domain::unit(1), 1), std::invalid_argument);
}

TEST(SplitScheme, Bias) {
  const SplitScheme unit(Domain::unit(1), 3);
  EXPECT_DOUBLE_EQ(bias(unit, 0, 1.0, 1.0), 0.5);
  EXPECT_NEAR(bias(unit, 2, 12.0, 1.4), 12.0 * std::pow(1.0 / 18.0, 1.4), 1e-15);
  EXPECT_NEAR(bias(unit, 2, 12.0, 1.4), 0.20980, 1e-5);
  for (int h = 0; h < 15; ++h) {
    EXPECT_GT(bias(unit, h, 2.0, 0.7), bias(unit, h + 1, 2.0, 0.7));
  }
}

TEST(SplitScheme, MaxDepthKeepsIndicesInRange) {
  for (int k : {2, 3, 5}) {
    for (std::size_t dim : {1u, 2u, 3u}) {
      const SplitScheme s(Domain::unit(dim), k);
      const double K = std::pow(static_cast<double>(k), static_cast<double>(dim));
      EXPECT_GT(s.max_depth(), 0);
      EXPECT_LE(s.max_depth() * std::log2(K), 63.0);
    }
  }
}

TEST(Split, UnitIntervalThirds) {
  const SplitScheme s(Domain::unit(1), 3);
  PartitionTree tree(s);
  const auto kids = tree.expand(tree.root());
  ASSERT_EQ(kids.size(), 3u);
  const double centers[] = {1.0 / 6.0, 0.5, 5.0 / 6.0};
  for (std::size_t i = 0; i < 3; ++i) {
    const Cell& c = tree.cell(kids[i]);
    EXPECT_EQ(c.depth, 1);
    EXPECT_EQ(c.index, i + 1);
    EXPECT_NEAR(c.center[0], centers[i], 1e-15);
    EXPECT_NEAR(c.lower[0], i / 3.0, 1e-15);
    EXPECT_NEAR(c.upper[0], (i + 1) / 3.0, 1e-15);
  }
  EXPECT_TRUE(tree.cell(tree.root()).expanded);
  EXPECT_THROW(tree.expand(tree.root()), std::logic_error);
  EXPECT_THROW(split(tree.cell(tree.root()), s), std::logic_error);
}

TEST(Split, UnitSquareNineBoxes) {
  const SplitScheme s(Domain::unit(2), 3);
  PartitionTree tree(s);
  const auto kids = tree.expand(tree.root());
  ASSERT_EQ(kids.size(), 9u);
  for (CellId id : kids) {
    const Cell& c = tree.cell(id);
    EXPECT_NEAR(c.upper[0] - c.lower[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.upper[1] - c.lower[1], 1.0 / 3.0, 1e-15);
  }
}

TEST(Split, ChildIndicesInvertToParent) {
  const SplitScheme s(Domain::unit(2), 2);
  PartitionTree tree(s);
  std::mt19937_64 gen(7);
  for (int step = 0; step < 60; ++step) {
    const auto leaves = tree.leaves();
    const CellId id = leaves[gen() % leaves.size()];
    const Cell parent = tree.cell(id);
    const auto kids = tree.expand(id);
    std::set<std::uint64_t> indices;
    for (CellId kid : kids) {
      const Cell& c = tree.cell(kid);
      EXPECT_EQ(parent_index(c.index, 4), parent.index);
      EXPECT_EQ(c.parent, id);
      indices.insert(c.index);
    }
    // Kj-K+1 .. Kj
    EXPECT_EQ(*indices.begin(), 4 * parent.index - 3);
    EXPECT_EQ(*indices.rbegin(), 4 * parent.index);
    EXPECT_EQ(indices.size(), 4u);
  }
}

TEST(Split, RandomParentsArePartitioned) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const int k = 2 + trial % 2;
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const double a = u(gen), b = u(gen);
      lo[d] = std::min(a, b);
      hi[d] = std::max(a, b) + 1e-3;
    }
    const SplitScheme s(Domain(lo, hi), k);
    PartitionTree tree(s);
    const Cell root = tree.cell(tree.root());
    const auto kids = split(root, s);
    ASSERT_EQ(kids.size(), static_cast<std::size_t>(std::pow(k, dim) + 0.5));
    double total = 0.0;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      total += volume(kids[i]);
      for (std::size_t d = 0; d < dim; ++d) {
        EXPECT_GE(kids[i].lower[d], root.lower[d]);
        EXPECT_LE(kids[i].upper[d], root.upper[d]);
      }
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        EXPECT_FALSE(overlaps(kids[i], kids[j]));
      }
    }
    EXPECT_NEAR(total, volume(root), 1e-12 * std::max(1.0, volume(root)));
  }
}

TEST(PartitionTree, LeavesPartitionRootOnRandomTrees) {
  std::mt19937_64 gen(3);
  for (std::size_t dim : {1u, 2u}) {
    const SplitScheme s(Domain(std::vector<double>(dim, -0.5), std::vector<double>(dim, 1.0)), 3);
    PartitionTree tree(s);
    for (int step = 0; step < 40; ++step) {
      const auto leaves = tree.leaves();
      tree.expand(leaves[gen() % leaves.size()]);

      double total = 0.0;
      const auto now = tree.leaves();
      for (std::size_t i = 0; i < now.size(); ++i) {
        const Cell& a = tree.cell(now[i]);
        EXPECT_FALSE(a.expanded);
        total += volume(a);
        for (std::size_t j = i + 1; j < now.size(); ++j) {
          EXPECT_FALSE(overlaps(a, tree.cell(now[j])));
        }
      }
      EXPECT_NEAR(total, std::pow(1.5, static_cast<double>(dim)), 1e-12);
    }
    std::size_t leaf_count = 0, expanded = 0;
    for (const Cell& c : tree.cells()) (c.expanded ? expanded : leaf_count)++;
    EXPECT_EQ(leaf_count, tree.leaves().size());
    EXPECT_EQ(tree.size(), 1 + expanded * s.children_per_split());
  }
}

TEST(PartitionTree, RadiusAndBallContainment) {
  const SplitScheme s(Domain({-0.1}, {0.9}), 3);
  PartitionTree tree(s);
  std::mt19937_64 gen(5);
  for (int step = 0; step < 30; ++step) {
    const auto leaves = tree.leaves();
    tree.expand(leaves[gen() % leaves.size()]);
  }
  for (const Cell& c : tree.cells()) {
    const double r = s.radius(c.depth);
    EXPECT_NEAR(c.inf_radius(), r, 1e-12);
    // The inf-ball of radius delta(h) around the center lies in the box.
    EXPECT_LE(c.lower[0], c.center[0] - r + 1e-12);
    EXPECT_GE(c.upper[0], c.center[0] + r - 1e-12);
  }
  EXPECT_GE(tree.deepest_expanded_depth(), 1);
}

TEST(PartitionTree, ExpandRefusesMaxDepth) {
  const SplitScheme s(Domain::unit(1), 3);
  PartitionTree tree(s);
  CellId id = tree.root();
  for (int h = 0; h < s.max_depth(); ++h) id = tree.expand(id).front();
  EXPECT_EQ(tree.cell(id).depth, s.max_depth());
  EXPECT_THROW(tree.expand(id), std::logic_error);
}

TEST(PartitionTree, ChildrenAreContiguous) {
  const SplitScheme s(Domain::unit(1), 3);
  PartitionTree tree(s);
  const auto kids = tree.expand(tree.root());
  EXPECT_EQ(tree.children(tree.root()), kids);
  EXPECT_TRUE(tree.children(kids[0]).empty());
}
