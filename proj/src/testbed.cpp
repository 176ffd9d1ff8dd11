#include "storoo/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <boost/math/distributions/normal.hpp>

namespace storoo {
namespace {

const boost::math::normal kStdNormal;

constexpr double kWindowLowLevel = 0.91;
constexpr double kTruncLevel = 0.95;
constexpr double kMovedMass = 1.0 - kTruncLevel;

double std_normal_cdf(double z) { return boost::math::cdf(kStdNormal, z); }

double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double scalar(std::span<const double> x, const char* where) {
  if (x.size() != 1) {
    throw std::invalid_argument(std::string(where) + ": expects a 1-D point");
  }
  return x[0];
}

}  // namespace

// -- Objective ----------------------------------------------------------------

std::optional<double> Objective::true_risk(std::span<const double>, double,
                                           Functional) const {
  return std::nullopt;
}

std::optional<SupportBounds> Objective::support_bounds(
    std::span<const double>) const {
  return std::nullopt;
}

FunctionObjective::FunctionObjective(std::string name, Domain domain,
                                     Sampler sampler, Risk risk,
                                     Support support)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      sampler_(std::move(sampler)),
      risk_(std::move(risk)),
      support_(std::move(support)) {
  if (!sampler_) throw std::invalid_argument("FunctionObjective: empty sampler");
}

double FunctionObjective::sample(std::span<const double> x,
                                 RandomStream& rng) const {
  return sampler_(x, rng);
}

std::optional<double> FunctionObjective::true_risk(std::span<const double> x,
                                                   double tau,
                                                   Functional functional) const {
  if (!risk_) return std::nullopt;
  return risk_(x, tau, functional);
}

std::optional<SupportBounds> FunctionObjective::support_bounds(
    std::span<const double> x) const {
  if (!support_) return std::nullopt;
  return support_(x);
}

// -- Truncated log-normal -----------------------------------------------------

double lognormal_quantile(double tau) {
  return std::exp(boost::math::quantile(kStdNormal, tau));
}

double trunc_lognormal_lower_window() {
  static const double q = lognormal_quantile(kWindowLowLevel);
  return q;
}

double trunc_lognormal_upper() {
  static const double q = lognormal_quantile(kTruncLevel);
  return q;
}

double trunc_lognormal_sample(RandomStream& rng) {
  const double u = rng.uniform();
  if (u <= kTruncLevel) return lognormal_quantile(u);
  const double lo = trunc_lognormal_lower_window();
  const double hi = trunc_lognormal_upper();
  return std::min(hi, lo + rng.uniform() * (hi - lo));
}

double trunc_lognormal_cdf(double z) {
  if (z <= 0.0) return 0.0;
  const double lo = trunc_lognormal_lower_window();
  const double hi = trunc_lognormal_upper();
  if (z >= hi) return 1.0;
  double f = std_normal_cdf(std::log(z));
  if (z > lo) f += kMovedMass * (z - lo) / (hi - lo);
  return f;
}

double trunc_lognormal_pdf(double z) {
  const double lo = trunc_lognormal_lower_window();
  const double hi = trunc_lognormal_upper();
  if (z <= 0.0 || z > hi) return 0.0;
  const double lz = std::log(z);
  double f = std::exp(-0.5 * lz * lz) / (z * std::sqrt(2.0 * std::numbers::pi));
  if (z >= lo) f += kMovedMass / (hi - lo);
  return f;
}

double trunc_lognormal_quantile(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("trunc_lognormal_quantile: tau not in (0,1]");
  }
  if (tau <= kWindowLowLevel) return lognormal_quantile(tau);
  double lo = trunc_lognormal_lower_window();
  double hi = trunc_lognormal_upper();
  if (tau == 1.0) return hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (trunc_lognormal_cdf(mid) < tau) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double trunc_lognormal_cvar(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw std::invalid_argument("trunc_lognormal_cvar: tau not in [0,1)");
  }
  const double lo = trunc_lognormal_lower_window();
  const double hi = trunc_lognormal_upper();
  const double z = tau == 0.0 ? 0.0 : trunc_lognormal_quantile(tau);
  // Log-normal part: int_z^hi y f_LN(y) dy = e^{1/2} [Phi(1 - ln z) - Phi(1 - ln hi)].
  const double upper_tail = std_normal_cdf(1.0 - std::log(hi));
  const double from_z = z > 0.0 ? std_normal_cdf(1.0 - std::log(z)) : 1.0;
  double partial = std::exp(0.5) * (from_z - upper_tail);
  // Reallocated uniform part on [lo, hi].
  const double start = std::max(z, lo);
  partial += kMovedMass / (hi - lo) * 0.5 * (hi * hi - start * start);
  return partial / (1.0 - tau);
}

double trunc_lognormal_mean() { return trunc_lognormal_cvar(0.0); }

// -- Phi1 ---------------------------------------------------------------------

double phi1_location(double x) {
  return 0.18 * (std::sin(3.0 * x) * std::sin(13.0 * x) + 1.3);
}

double phi1_scale(double x) { return 0.062 * (std::cos(8.0 * x - 2.0) + 1.2); }

double phi1_value(double x, double zeta) {
  return phi1_location(x) + phi1_scale(x) * zeta;
}

double phi1_sample(double x, RandomStream& rng) {
  return phi1_value(x, trunc_lognormal_sample(rng));
}

double phi1_true_quantile(double x, double tau) {
  return phi1_value(x, trunc_lognormal_quantile(tau));
}

double phi1_true_cvar(double x, double tau) {
  return phi1_value(x, trunc_lognormal_cvar(tau));
}

Phi1Objective::Phi1Objective(Functional functional)
    : domain_(functional == Functional::kCvar ? Domain({0.0}, {1.0})
                                              : Domain({-0.1}, {0.9})) {}

double Phi1Objective::sample(std::span<const double> x,
                             RandomStream& rng) const {
  return phi1_sample(scalar(x, "phi1"), rng);
}

std::optional<double> Phi1Objective::true_risk(std::span<const double> x,
                                               double tau,
                                               Functional functional) const {
  const double v = scalar(x, "phi1");
  switch (functional) {
    case Functional::kQuantile: return phi1_true_quantile(v, tau);
    case Functional::kCvar: return -phi1_true_cvar(v, tau);
    case Functional::kMean: return phi1_value(v, trunc_lognormal_mean());
  }
  return std::nullopt;
}

std::optional<SupportBounds> Phi1Objective::support_bounds(
    std::span<const double> x) const {
  const double v = scalar(x, "phi1");
  return SupportBounds{phi1_location(v), phi1_value(v, trunc_lognormal_upper())};
}

// -- Phi2 ---------------------------------------------------------------------

double cauchy_quantile(double tau, double scale) {
  return scale * std::tan(std::numbers::pi * (tau - 0.5));
}

double cauchy_pdf(double y, double scale) {
  const double r = y / scale;
  return 1.0 / (std::numbers::pi * scale * (1.0 + r * r));
}

double phi2_cr(std::span<const double> x) {
  if (x.size() != 2) throw std::invalid_argument("phi2: expects a 2-D point");
  const double r = euclidean_norm(x);
  const double inner = std::abs(std::sin(x[0]) * std::sin(x[1]) *
                                std::exp(std::abs(3.0 - r / std::numbers::pi)));
  return 0.1 * std::pow(inner + 1.0, 1.4);
}

double phi2_scale(std::span<const double> x) {
  return std::abs(phi2_cr(x) + 1.5 * euclidean_norm(x));
}

double phi2_value(std::span<const double> x, double zeta) {
  return phi2_cr(x) + zeta * phi2_scale(x);
}

double phi2_sample(std::span<const double> x, RandomStream& rng) {
  return phi2_value(x, cauchy_quantile(rng.uniform()));
}

double phi2_true_quantile(std::span<const double> x, double tau) {
  return phi2_value(x, cauchy_quantile(tau));
}

Phi2Objective::Phi2Objective() : domain_({-0.5, -0.5}, {1.0, 1.0}) {}

double Phi2Objective::sample(std::span<const double> x,
                             RandomStream& rng) const {
  return phi2_sample(x, rng);
}

std::optional<double> Phi2Objective::true_risk(std::span<const double> x,
                                               double tau,
                                               Functional functional) const {
  if (functional != Functional::kQuantile) return std::nullopt;
  return phi2_true_quantile(x, tau);
}

// -- Registry -----------------------------------------------------------------

ObjectiveRegistry ObjectiveRegistry::with_builtins() {
  ObjectiveRegistry registry;
  registry.add("phi1", [](Functional f) -> std::unique_ptr<Objective> {
    return std::make_unique<Phi1Objective>(f);
  });
  registry.add("phi2", [](Functional) -> std::unique_ptr<Objective> {
    return std::make_unique<Phi2Objective>();
  });
  return registry;
}

void ObjectiveRegistry::add(const std::string& name, Factory factory) {
  if (!factory) throw std::invalid_argument("ObjectiveRegistry: empty factory");
  factories_[name] = std::move(factory);
}

bool ObjectiveRegistry::contains(const std::string& name) const {
  return factories_.contains(name);
}

std::vector<std::string> ObjectiveRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, factory] : factories_) out.push_back(name);
  return out;
}

std::unique_ptr<Objective> ObjectiveRegistry::create(
    const std::string& name, Functional functional) const {
  const auto it = factories_.find(name);
  if (it == factories_.end()) {
    throw std::invalid_argument("unknown objective '" + name + "'");
  }
  return it->second(functional);
}

// -- Grid oracle --------------------------------------------------------------

std::size_t default_grid_resolution(std::size_t dimension) {
  if (dimension == 1) return 100000;
  if (dimension == 2) return 700;
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(std::pow(1e6, 1.0 / dimension)));
}

GridOptimum grid_optimum(const Objective& objective, double tau,
                         Functional functional, std::size_t resolution) {
  const Domain& domain = objective.domain();
  const std::size_t dim = domain.dimension();
  if (resolution == 0) resolution = default_grid_resolution(dim);
  if (resolution < 2) throw std::invalid_argument("grid_optimum: resolution < 2");

  std::vector<std::size_t> digits(dim, 0);
  std::vector<double> x(dim);
  GridOptimum best;
  best.g = -kInf;
  bool any = false;
  while (true) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double lo = domain.lower()[d];
      const double hi = domain.upper()[d];
      x[d] = digits[d] + 1 == resolution
                 ? hi
                 : lo + (hi - lo) * static_cast<double>(digits[d]) /
                            static_cast<double>(resolution - 1);
    }
    const auto g = objective.true_risk(x, tau, functional);
    if (!g) {
      throw std::invalid_argument(
          "grid_optimum: objective '" + objective.name() +
          "' has no closed-form " + std::string(to_string(functional)) +
          (functional == Functional::kQuantile
               ? ""
               : " (heavy-tailed noise has no finite moments; only quantiles "
                 "are defined)"));
    }
    if (!any || *g > best.g) {
      best.g = *g;
      best.x = x;
      any = true;
    }
    std::size_t d = dim;
    while (d-- > 0) {
      if (++digits[d] < resolution) break;
      digits[d] = 0;
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }
  return best;
}

}  // namespace storoo
