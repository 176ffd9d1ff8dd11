#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storoo/bounds.hpp"
#include "storoo/partition.hpp"
#include "storoo/random.hpp"

namespace storoo {

/// A noisy black box Y_x = Phi(x, .) on a box domain. Risk values follow the
/// maximization convention: true_risk returns g(x), which is -CVaR for the
/// CVaR functional.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual const Domain& domain() const = 0;
  virtual double sample(std::span<const double> x, RandomStream& rng) const = 0;

  /// g(x) for the given functional, or nullopt when no closed form exists.
  virtual std::optional<double> true_risk(std::span<const double> x,
                                          double tau,
                                          Functional functional) const;

  /// [min supp Y_x, max supp Y_x] when known.
  virtual std::optional<SupportBounds> support_bounds(
      std::span<const double> x) const;
};

/// Objective assembled from callables; the usual way to register a
/// synthetic black box.
class FunctionObjective : public Objective {
 public:
  using Sampler = std::function<double(std::span<const double>, RandomStream&)>;
  using Risk = std::function<std::optional<double>(std::span<const double>,
                                                   double, Functional)>;
  using Support = std::function<SupportBounds(std::span<const double>)>;

  FunctionObjective(std::string name, Domain domain, Sampler sampler,
                    Risk risk = {}, Support support = {});

  std::string name() const override { return name_; }
  const Domain& domain() const override { return domain_; }
  double sample(std::span<const double> x, RandomStream& rng) const override;
  std::optional<double> true_risk(std::span<const double> x, double tau,
                                  Functional functional) const override;
  std::optional<SupportBounds> support_bounds(
      std::span<const double> x) const override;

 private:
  std::string name_;
  Domain domain_;
  Sampler sampler_;
  Risk risk_;
  Support support_;
};

// -- Truncated log-normal noise -----------------------------------------------
//
// LogNormal(0, 1) whose mass above its 0.95-quantile is moved uniformly onto
// [q(0.91), q(0.95)].

double lognormal_quantile(double tau);
double trunc_lognormal_lower_window();  // q_LN(0.91)
double trunc_lognormal_upper();         // q_LN(0.95), the top of the support
double trunc_lognormal_sample(RandomStream& rng);
double trunc_lognormal_cdf(double z);
double trunc_lognormal_pdf(double z);
double trunc_lognormal_quantile(double tau);
/// E[zeta | zeta >= q(tau)] for tau in [0, 1).
double trunc_lognormal_cvar(double tau);
double trunc_lognormal_mean();

// -- Phi1 ---------------------------------------------------------------------

/// 0.18 (sin(3x) sin(13x) + 1.3)
double phi1_location(double x);
/// 0.062 (cos(8x - 2) + 1.2), always positive.
double phi1_scale(double x);
double phi1_value(double x, double zeta);
double phi1_sample(double x, RandomStream& rng);
double phi1_true_quantile(double x, double tau);
double phi1_true_cvar(double x, double tau);

/// Domain [-0.1, 0.9] for quantile and mean runs, [0, 1] for CVaR runs.
class Phi1Objective : public Objective {
 public:
  explicit Phi1Objective(Functional functional = Functional::kQuantile);

  std::string name() const override { return "phi1"; }
  const Domain& domain() const override { return domain_; }
  double sample(std::span<const double> x, RandomStream& rng) const override;
  std::optional<double> true_risk(std::span<const double> x, double tau,
                                  Functional functional) const override;
  std::optional<SupportBounds> support_bounds(
      std::span<const double> x) const override;

 private:
  Domain domain_;
};

// -- Phi2 ---------------------------------------------------------------------

double cauchy_quantile(double tau, double scale = 0.75);
double cauchy_pdf(double y, double scale = 0.75);
double phi2_cr(std::span<const double> x);
/// |Cr(x) + 1.5 ||x||_2|
double phi2_scale(std::span<const double> x);
double phi2_value(std::span<const double> x, double zeta);
double phi2_sample(std::span<const double> x, RandomStream& rng);
double phi2_true_quantile(std::span<const double> x, double tau);

/// Domain [-0.5, 1]^2 with Cauchy(0, 0.75) noise; only quantiles exist.
class Phi2Objective : public Objective {
 public:
  Phi2Objective();

  std::string name() const override { return "phi2"; }
  const Domain& domain() const override { return domain_; }
  double sample(std::span<const double> x, RandomStream& rng) const override;
  std::optional<double> true_risk(std::span<const double> x, double tau,
                                  Functional functional) const override;

 private:
  Domain domain_;
};

// -- Registry -----------------------------------------------------------------

class ObjectiveRegistry {
 public:
  using Factory = std::function<std::unique_ptr<Objective>(Functional)>;

  /// Registry holding "phi1" and "phi2".
  static ObjectiveRegistry with_builtins();

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Throws std::invalid_argument for unknown names.
  std::unique_ptr<Objective> create(const std::string& name,
                                    Functional functional) const;

 private:
  std::map<std::string, Factory> factories_;
};

// -- Grid oracle --------------------------------------------------------------

struct GridOptimum {
  std::vector<double> x;
  double g = 0.0;
};

/// Default points per dimension: 1e5 in 1D, 700 in 2D, ~1e6 total beyond.
std::size_t default_grid_resolution(std::size_t dimension);

/// Maximizer of true_risk over a uniform grid including the domain corners
/// (a lower bound on g*, off by at most the grid gap). `resolution` is the
/// number of points per dimension, 0 for the default. Throws
/// std::invalid_argument when the objective has no true risk for the
/// functional.
GridOptimum grid_optimum(const Objective& objective, double tau,
                         Functional functional, std::size_t resolution = 0);

}  // namespace storoo
