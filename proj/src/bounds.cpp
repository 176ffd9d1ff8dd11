#include "storoo/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace storoo {
namespace {

constexpr std::array<std::pair<BoundMethod, std::string_view>, 8> kMethodNames{{
    {BoundMethod::kHoeffding, "hoeffding"},
    {BoundMethod::kBernstein, "bernstein"},
    {BoundMethod::kKl, "kl"},
    {BoundMethod::kKlPeeling, "kl_peeling"},
    {BoundMethod::kBrown, "brown"},
    {BoundMethod::kThomas, "thomas"},
    {BoundMethod::kMeanHoeffding, "mean_hoeffding"},
    {BoundMethod::kExact, "exact"},
}};

// x log(x/y) with 0 log(0/y) = 0 and x log(x/0) = +inf.
double xlogx_over_y(double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return kInf;
  return x * std::log(x / y);
}

void require_samples(const NodeStats& stats, const char* where) {
  if (stats.empty()) {
    throw std::logic_error(std::string(where) + ": no samples");
  }
}

void require_in_support(const NodeStats& stats, SupportBounds support,
                        const char* where) {
  if (!(support.lower < support.upper)) {
    throw std::invalid_argument(std::string(where) + ": support needs a < b");
  }
  if (stats.min() < support.lower || stats.max() > support.upper) {
    throw std::domain_error(std::string(where) +
                            ": observation outside the support [a, b]");
  }
}

}  // namespace

std::string_view to_string(BoundMethod method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

std::string_view to_string(Functional functional) {
  switch (functional) {
    case Functional::kQuantile: return "quantile";
    case Functional::kCvar: return "cvar";
    case Functional::kMean: return "mean";
  }
  return "unknown";
}

std::optional<BoundMethod> parse_bound_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

std::optional<Functional> parse_functional(std::string_view name) {
  if (name == "quantile") return Functional::kQuantile;
  if (name == "cvar") return Functional::kCvar;
  if (name == "mean") return Functional::kMean;
  return std::nullopt;
}

Functional functional_of(BoundMethod method) {
  switch (method) {
    case BoundMethod::kHoeffding:
    case BoundMethod::kBernstein:
    case BoundMethod::kKl:
    case BoundMethod::kKlPeeling:
      return Functional::kQuantile;
    case BoundMethod::kBrown:
    case BoundMethod::kThomas:
      return Functional::kCvar;
    case BoundMethod::kMeanHoeffding:
    case BoundMethod::kExact:
      return Functional::kMean;
  }
  return Functional::kMean;
}

// -- KL utilities -------------------------------------------------------------

double kl_bernoulli(double p, double q) {
  return xlogx_over_y(p, q) + xlogx_over_y(1.0 - p, 1.0 - q);
}

double kl_upper_inverse(double q, double threshold) {
  if (kl_bernoulli(1.0, q) <= threshold) return 1.0;
  double lo = q;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (kl_bernoulli(mid, q) <= threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double kl_lower_inverse(double q, double threshold) {
  if (kl_bernoulli(0.0, q) <= threshold) return 0.0;
  double lo = 0.0;
  double hi = q;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (kl_bernoulli(mid, q) <= threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double union_log_term(std::int64_t horizon, double eta, double theta) {
  const double t = static_cast<double>(horizon);
  return std::log(theta * t * t / eta);
}

double peeling_map(std::int64_t horizon, double delta) {
  const double t = static_cast<double>(horizon);
  return t * std::numbers::e * std::ceil(delta * std::log(t)) *
         std::exp(-delta);
}

double peeling_threshold(std::int64_t horizon, double eta) {
  if (horizon < 2) {
    throw std::invalid_argument("peeling_threshold: requires T >= 2");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("peeling_threshold: eta must be in (0,1)");
  }
  const double t = static_cast<double>(horizon);
  const double log_t = std::log(t);
  // On the piece ((m-1)/log T, m/log T] the ceiling equals m and the map is
  // decreasing, so the piece satisfies the inequality from
  // delta = log(2 T e m / eta) onward. The infimum sits on the first piece
  // where that point lies left of the right breakpoint; the gap
  // m/log T - log(2 T e m/eta) is concave in m, so pieces are scanned by
  // doubling then bisection.
  const double base = std::log(2.0 * t * std::numbers::e / eta);
  auto feasible = [&](double m) { return base + std::log(m) <= m / log_t; };
  double hi = 1.0;
  while (!feasible(hi)) hi *= 2.0;
  double lo = hi / 2.0;
  if (hi == 1.0) lo = 0.0;
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double delta = base + std::log(hi);
  while (peeling_map(horizon, delta) > eta / 2.0) {
    delta = std::nextafter(delta, kInf);
  }
  return delta;
}

// -- Quantile bounds ----------------------------------------------------------

double hoeffding_epsilon(std::size_t n, const BoundParams& params) {
  return std::sqrt(union_log_term(params.horizon, params.eta) /
                   (2.0 * static_cast<double>(n)));
}

double bernstein_epsilon(std::size_t n, const BoundParams& params) {
  const double log_term = union_log_term(params.horizon, params.eta);
  const double nd = static_cast<double>(n);
  const double tau = params.tau;
  return log_term / (3.0 * nd) *
         (1.0 + std::sqrt(1.0 + 18.0 * nd * tau * (1.0 - tau) / log_term));
}

Interval quantile_from_epsilon(const NodeStats& stats, double tau,
                               double epsilon) {
  require_samples(stats, "quantile bound");
  const std::size_t n = stats.count();
  Interval out;
  if (tau + epsilon < 1.0) {
    out.ucb = stats.order_stat(first_index_at_least(n, tau + epsilon));
  }
  if (tau - epsilon > 0.0) {
    const std::size_t i = last_index_at_most(n, tau - epsilon);
    if (i > 0) out.lcb = stats.order_stat(i);
  }
  return out;
}

Interval quantile_hoeffding(const NodeStats& stats, const BoundParams& params) {
  require_samples(stats, "quantile_hoeffding");
  return quantile_from_epsilon(stats, params.tau,
                               hoeffding_epsilon(stats.count(), params));
}

Interval quantile_bernstein(const NodeStats& stats, const BoundParams& params) {
  require_samples(stats, "quantile_bernstein");
  return quantile_from_epsilon(stats, params.tau,
                               bernstein_epsilon(stats.count(), params));
}

Interval quantile_kl_threshold(const NodeStats& stats, double tau,
                               double threshold) {
  require_samples(stats, "quantile_kl");
  const std::size_t n = stats.count();
  const double nd = static_cast<double>(n);
  const double level = threshold / nd;
  auto divergence = [&](std::size_t i) {
    return kl_bernoulli(static_cast<double>(i) / nd, tau);
  };

  Interval out;
  if (kl_bernoulli(1.0, tau) > level) {
    // kl(i/N, tau) is nondecreasing for i/N >= tau.
    std::size_t lo = first_index_at_least(n, tau);
    std::size_t hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (divergence(mid) >= level) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    out.ucb = stats.order_stat(lo);
  }
  if (kl_bernoulli(0.0, tau) > level) {
    // kl(i/N, tau) is nonincreasing for i/N <= tau; i = 0 always qualifies.
    std::size_t lo = 0;
    std::size_t hi = last_index_at_most(n, tau);
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (divergence(mid) >= level) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    if (lo > 0) out.lcb = stats.order_stat(lo);
  }
  return out;
}

Interval quantile_kl(const NodeStats& stats, const BoundParams& params) {
  return quantile_kl_threshold(stats, params.tau,
                               union_log_term(params.horizon, params.eta));
}

Interval quantile_kl_peeling(const NodeStats& stats, const BoundParams& params) {
  const double threshold = params.peeling_threshold
                               ? *params.peeling_threshold
                               : peeling_threshold(params.horizon, params.eta);
  return quantile_kl_threshold(stats, params.tau, threshold);
}

// -- CVaR bounds --------------------------------------------------------------

Interval cvar_brown(const NodeStats& stats, const BoundParams& params) {
  require_samples(stats, "cvar_brown");
  require_in_support(stats, params.support, "cvar_brown");
  const std::size_t n = stats.count();
  const double tau = params.tau;
  // The estimator needs at least one sample below the tail.
  if (last_index_at_most(n, tau) == 0) return {};

  const double nd = static_cast<double>(n);
  const double range = params.support.upper - params.support.lower;
  const double center = -stats.cvar_estimate(tau);
  const double up = range / (1.0 - tau) *
                    std::sqrt(union_log_term(params.horizon, params.eta, 2.0) /
                              (2.0 * nd));
  const double down =
      range * std::sqrt(5.0 * union_log_term(params.horizon, params.eta, 6.0) /
                        ((1.0 - tau) * nd));
  return {center - down, center + up};
}

Interval cvar_thomas_band(const NodeStats& stats, double tau,
                          SupportBounds support, double band) {
  require_samples(stats, "cvar_thomas");
  require_in_support(stats, support, "cvar_thomas");
  const auto y = stats.sorted();
  const std::size_t n = y.size();
  const double nd = static_cast<double>(n);
  // Augmented sample Y_0 = a, Y_1..Y_N, Y_{N+1} = b.
  auto at = [&](std::size_t i) {
    if (i == 0) return support.lower;
    if (i == n + 1) return support.upper;
    return y[i - 1];
  };

  double lower_sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double weight = static_cast<double>(i) / nd - band - tau;
    if (weight > 0.0) lower_sum += (at(i + 1) - at(i)) * weight;
  }
  double upper_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double weight =
        std::min(1.0, static_cast<double>(i) / nd + band) - tau;
    if (weight > 0.0) upper_sum += (at(i + 1) - at(i)) * weight;
  }
  return {lower_sum / (1.0 - tau) - at(n + 1), upper_sum / (1.0 - tau) - at(n)};
}

Interval cvar_thomas(const NodeStats& stats, const BoundParams& params) {
  if (params.eta > 0.5) {
    throw std::invalid_argument("cvar_thomas: requires eta <= 0.5");
  }
  require_samples(stats, "cvar_thomas");
  const double band = std::sqrt(union_log_term(params.horizon, params.eta) /
                                (2.0 * static_cast<double>(stats.count())));
  return cvar_thomas_band(stats, params.tau, params.support, band);
}

// -- Mean bounds --------------------------------------------------------------

Interval mean_hoeffding(const NodeStats& stats, const BoundParams& params) {
  require_samples(stats, "mean_hoeffding");
  const double range = params.support.upper - params.support.lower;
  const double eps = range * hoeffding_epsilon(stats.count(), params);
  const double mean = stats.mean();
  return {mean - eps, mean + eps};
}

// -- Strategy -----------------------------------------------------------------

BoundStrategy::BoundStrategy(BoundMethod method, BoundParams params)
    : method_(method), params_(params) {
  if (!(params_.eta > 0.0 && params_.eta < 1.0)) {
    throw std::invalid_argument("BoundStrategy: eta must be in (0,1)");
  }
  if (params_.horizon < 1) {
    throw std::invalid_argument("BoundStrategy: horizon must be positive");
  }
  switch (functional()) {
    case Functional::kQuantile:
      if (!(params_.tau > 0.0 && params_.tau < 1.0)) {
        throw std::invalid_argument("BoundStrategy: quantile tau not in (0,1)");
      }
      break;
    case Functional::kCvar:
      if (!(params_.tau >= 0.0 && params_.tau < 1.0)) {
        throw std::invalid_argument("BoundStrategy: CVaR tau not in [0,1)");
      }
      break;
    case Functional::kMean:
      break;
  }
  if (method_ == BoundMethod::kThomas && params_.eta > 0.5) {
    throw std::invalid_argument("BoundStrategy: thomas requires eta <= 0.5");
  }
  if (method_ == BoundMethod::kKlPeeling && !params_.peeling_threshold) {
    params_.peeling_threshold = peeling_threshold(params_.horizon, params_.eta);
  }
}

Interval BoundStrategy::evaluate(const NodeStats& stats) const {
  return evaluate(stats, params_.support);
}

Interval BoundStrategy::evaluate(const NodeStats& stats,
                                 SupportBounds support) const {
  BoundParams params = params_;
  params.support = support;
  switch (method_) {
    case BoundMethod::kHoeffding: return quantile_hoeffding(stats, params);
    case BoundMethod::kBernstein: return quantile_bernstein(stats, params);
    case BoundMethod::kKl: return quantile_kl(stats, params);
    case BoundMethod::kKlPeeling: return quantile_kl_peeling(stats, params);
    case BoundMethod::kBrown: return cvar_brown(stats, params);
    case BoundMethod::kThomas: return cvar_thomas(stats, params);
    case BoundMethod::kMeanHoeffding: return mean_hoeffding(stats, params);
    case BoundMethod::kExact: {
      const double mean = stats.mean();
      return {mean, mean};
    }
  }
  throw std::logic_error("BoundStrategy::evaluate: unknown method");
}

double BoundStrategy::estimate(const NodeStats& stats) const {
  switch (functional()) {
    case Functional::kQuantile: return stats.quantile_estimate(params_.tau);
    case Functional::kCvar: return -stats.cvar_estimate(params_.tau);
    case Functional::kMean: return stats.mean();
  }
  throw std::logic_error("BoundStrategy::estimate: unknown functional");
}

}  // namespace storoo
