#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "storoo/stats.hpp"

namespace storoo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Confidence interval on the risk functional at a cell center. Either end
/// may be infinite when the sample is too small for a non-trivial bound.
struct Interval {
  double lcb = -kInf;
  double ucb = kInf;

  double width() const { return ucb - lcb; }
  bool contains(double v) const { return lcb <= v && v <= ucb; }
  bool within(const Interval& outer) const {
    return outer.lcb <= lcb && ucb <= outer.ucb;
  }
};

/// Output support [lower, upper] assumed by the CVaR and mean bounds.
struct SupportBounds {
  double lower = 0.0;
  double upper = 1.0;
};

enum class Functional { kQuantile, kCvar, kMean };

enum class BoundMethod {
  kHoeffding,
  kBernstein,
  kKl,
  kKlPeeling,
  kBrown,
  kThomas,
  kMeanHoeffding,
  kExact,
};

std::string_view to_string(BoundMethod method);
std::string_view to_string(Functional functional);
std::optional<BoundMethod> parse_bound_method(std::string_view name);
std::optional<Functional> parse_functional(std::string_view name);
Functional functional_of(BoundMethod method);

struct BoundParams {
  double tau = 0.5;
  double eta = 0.1;
  std::int64_t horizon = 1000;
  SupportBounds support;
  /// delta_eta(T); filled by BoundStrategy for kl_peeling.
  std::optional<double> peeling_threshold;
};

// -- KL utilities -------------------------------------------------------------

/// Binary relative entropy with 0 log 0 = 0 and x log(x/0) = +inf.
double kl_bernoulli(double p, double q);

/// Largest p in [q, 1] with kl(p, q) <= threshold (bisection, 1e-12).
double kl_upper_inverse(double q, double threshold);

/// Smallest p in [0, q] with kl(p, q) <= threshold (bisection, 1e-12).
double kl_lower_inverse(double q, double threshold);

/// log(theta T^2 / eta).
double union_log_term(std::int64_t horizon, double eta, double theta = 2.0);

/// delta_eta(T) = inf{delta > 0 : T e ceil(delta log T) exp(-delta) <= eta/2}.
/// Requires T >= 2 and eta in (0, 1).
double peeling_threshold(std::int64_t horizon, double eta);

/// T e ceil(delta log T) exp(-delta), the map whose sublevel set defines
/// peeling_threshold.
double peeling_map(std::int64_t horizon, double delta);

// -- Quantile bounds ----------------------------------------------------------

double hoeffding_epsilon(std::size_t n, const BoundParams& params);
double bernstein_epsilon(std::size_t n, const BoundParams& params);

/// Order-statistic bounds [Y_(floor), Y_(ceil)] at levels tau -/+ epsilon.
Interval quantile_from_epsilon(const NodeStats& stats, double tau,
                               double epsilon);

Interval quantile_hoeffding(const NodeStats& stats, const BoundParams& params);
Interval quantile_bernstein(const NodeStats& stats, const BoundParams& params);

/// Chernoff bounds with the deviation level N kl(F, tau) >= threshold.
Interval quantile_kl_threshold(const NodeStats& stats, double tau,
                               double threshold);

Interval quantile_kl(const NodeStats& stats, const BoundParams& params);
Interval quantile_kl_peeling(const NodeStats& stats, const BoundParams& params);

// -- CVaR bounds (on g = -CVaR) -----------------------------------------------

Interval cvar_brown(const NodeStats& stats, const BoundParams& params);

/// DKW envelope bounds. `band` is the DKW half-width sqrt(log(2T^2/eta)/(2N)).
Interval cvar_thomas_band(const NodeStats& stats, double tau,
                          SupportBounds support, double band);
Interval cvar_thomas(const NodeStats& stats, const BoundParams& params);

// -- Mean bounds --------------------------------------------------------------

/// Hoeffding interval on the mean of [a, b]-valued observations.
Interval mean_hoeffding(const NodeStats& stats, const BoundParams& params);

// -- Strategy -----------------------------------------------------------------

/// One UCB/LCB construction with its parameters, plus the matching plug-in
/// estimator. Values are always in the maximization convention, so CVaR
/// methods bound and estimate -CVaR.
class BoundStrategy {
 public:
  BoundStrategy(BoundMethod method, BoundParams params);

  BoundMethod method() const { return method_; }
  Functional functional() const { return functional_of(method_); }
  const BoundParams& params() const { return params_; }

  Interval evaluate(const NodeStats& stats) const;
  Interval evaluate(const NodeStats& stats, SupportBounds support) const;
  double estimate(const NodeStats& stats) const;

 private:
  BoundMethod method_;
  BoundParams params_;
};

}  // namespace storoo
