#include "storoo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace storoo {

void NodeStats::push(double y) {
  if (!std::isfinite(y)) {
    throw std::invalid_argument("NodeStats::push: non-finite observation");
  }
  sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), y), y);
  sum_ += y;
}

double NodeStats::mean() const {
  if (empty()) throw std::logic_error("NodeStats::mean: no samples");
  return sum_ / static_cast<double>(count());
}

double NodeStats::min() const {
  if (empty()) throw std::logic_error("NodeStats::min: no samples");
  return sorted_.front();
}

double NodeStats::max() const {
  if (empty()) throw std::logic_error("NodeStats::max: no samples");
  return sorted_.back();
}

double NodeStats::ecdf(double q) const {
  if (empty()) throw std::logic_error("NodeStats::ecdf: no samples");
  const auto below = std::upper_bound(sorted_.begin(), sorted_.end(), q) -
                     sorted_.begin();
  return static_cast<double>(below) / static_cast<double>(count());
}

double NodeStats::order_stat(std::size_t i) const {
  if (i < 1 || i > count()) {
    throw std::out_of_range("NodeStats::order_stat: index " +
                            std::to_string(i) + " outside [1, " +
                            std::to_string(count()) + "]");
  }
  return sorted_[i - 1];
}

double NodeStats::quantile_estimate(double tau) const {
  if (empty()) throw std::logic_error("NodeStats::quantile_estimate: no samples");
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("NodeStats::quantile_estimate: tau not in (0,1)");
  }
  return order_stat(first_index_at_least(count(), tau));
}

double NodeStats::cvar_estimate(double tau) const {
  if (empty()) throw std::logic_error("NodeStats::cvar_estimate: no samples");
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw std::invalid_argument("NodeStats::cvar_estimate: tau not in [0,1)");
  }
  const std::size_t n = count();
  // floor(N tau) samples lie at or below the threshold; floor(N tau) <= N-1.
  const std::size_t below = std::min(last_index_at_most(n, tau), n - 1);
  const double z = sorted_[below];
  double excess = 0.0;
  for (std::size_t i = below + 1; i < n; ++i) excess += sorted_[i] - z;
  return z + excess / ((1.0 - tau) * static_cast<double>(n));
}

std::size_t first_index_at_least(std::size_t n, double level) {
  const double nd = static_cast<double>(n);
  if (level <= 0.0) return 0;
  double guess = std::ceil(nd * level);
  if (guess > nd + 1.0) return n + 1;
  auto i = static_cast<std::size_t>(std::max(0.0, guess));
  while (i > 0 && static_cast<double>(i - 1) / nd >= level) --i;
  while (i <= n && static_cast<double>(i) / nd < level) ++i;
  return i;
}

std::size_t last_index_at_most(std::size_t n, double level) {
  const double nd = static_cast<double>(n);
  if (level >= 1.0) return n;
  if (level < 0.0) return 0;
  auto i = static_cast<std::size_t>(std::min(nd, std::floor(nd * level)));
  while (i < n && static_cast<double>(i + 1) / nd <= level) ++i;
  while (i > 0 && static_cast<double>(i) / nd > level) --i;
  return i;
}

}  // namespace storoo
