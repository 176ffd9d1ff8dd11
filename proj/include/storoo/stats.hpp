#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace storoo {

/// Observations collected at one cell center, kept sorted.
class NodeStats {
 public:
  NodeStats() = default;

  /// Inserts one observation. Throws std::invalid_argument if y is not finite.
  void push(double y);

  std::size_t count() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }
  std::span<const double> sorted() const { return sorted_; }
  double sum() const { return sum_; }
  double mean() const;
  double min() const;
  double max() const;

  /// (#samples <= q) / N.
  double ecdf(double q) const;

  /// i-th smallest sample, 1-based. Throws std::out_of_range.
  double order_stat(std::size_t i) const;

  /// Generalized inverse of the empirical CDF: the ceil(N tau)-th order
  /// statistic.
  double quantile_estimate(double tau) const;

  /// Empirical CVaR of the upper tail at level tau in [0, 1):
  ///   z + 1/((1-tau) N) * sum_i (Y_i - z)^+,
  /// with z the order statistic following floor(N tau) samples, which is a
  /// minimizer of the inf-over-z form.
  double cvar_estimate(double tau) const;

 private:
  std::vector<double> sorted_;
  double sum_ = 0.0;
};

/// Smallest i in [0, n] with i/n >= level (n + 1 if none). The ratio is
/// evaluated in floating point, so the result agrees with any comparison
/// against ecdf() values.
std::size_t first_index_at_least(std::size_t n, double level);

/// Largest i in [0, n] with i/n <= level (0 when level < 0 is handled by
/// the caller).
std::size_t last_index_at_most(std::size_t n, double level);

}  // namespace storoo
