#include "storoo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace storoo {
namespace {

double log_term(double theta, std::int64_t horizon, double eta) {
  const double t = static_cast<double>(horizon);
  return std::log(theta * t * t / eta);
}

double geometric_gap(const ComplexityInputs& in, double alpha) {
  const double gap =
      1.0 - std::pow(in.rho, in.d * in.gamma_hat + in.gamma_hat * alpha);
  if (!(gap > 0.0)) {
    throw std::invalid_argument("regret bound: requires rho^(d gamma + gamma alpha) < 1");
  }
  return gap;
}

void check_horizon(std::int64_t horizon, double eta) {
  if (horizon < 1) throw std::invalid_argument("regret bound: T must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("regret bound: eta must be positive");
}

}  // namespace

Regret simple_regret(double g_star, double g_at_returned) {
  const double raw = g_star - g_at_returned;
  return {raw, std::max(raw, 0.0)};
}

double m_eta_h(const SafeConstants& v, double eta, std::int64_t horizon,
               double bias) {
  return log_term(v.theta, horizon, eta) * std::pow(v.kappa / bias, v.alpha);
}

double m_eta_h(const SafeConstants& v, double eta, std::int64_t horizon,
               double beta_hat, double gamma_hat, double delta_h) {
  return m_eta_h(v, eta, horizon, beta_hat * std::pow(delta_h, gamma_hat));
}

double quantile_margin(double tau) { return std::min(tau, 1.0 - tau); }

SafeConstants safe_constants_quantile(double tau, double beta_hat,
                                      double gamma_hat, double diameter,
                                      double density_floor) {
  if (!(density_floor > 0.0)) {
    throw std::invalid_argument("safe_constants_quantile: density floor must be positive");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("safe_constants_quantile: tau not in (0,1)");
  }
  const double m = quantile_margin(tau);
  const double spread = beta_hat * std::pow(diameter, gamma_hat) * density_floor;
  return {2.0, std::sqrt(8.0 * m * m + 4.0 * spread * spread) / (m * density_floor),
          2.0};
}

SafeConstants safe_constants_cvar(double tau, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("safe_constants_cvar: requires a < b");
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw std::invalid_argument("safe_constants_cvar: tau not in [0,1)");
  }
  const double kappa = (b - a) * (1.0 + std::sqrt(10.0 * (1.0 - tau))) /
                       (std::sqrt(2.0) * (1.0 - tau));
  return {6.0, kappa, 2.0};
}

SafeConstants safe_constants_cvar_displayed(double tau, double a, double b,
                                            double beta_hat, double gamma_hat,
                                            double delta_ref) {
  SafeConstants v = safe_constants_cvar(tau, a, b);
  v.kappa /= beta_hat * std::pow(delta_ref, gamma_hat);
  return v;
}

RegretBound regret_bound_generic(const SafeConstants& v,
                                 const ComplexityInputs& in,
                                 std::int64_t horizon, double eta) {
  check_horizon(horizon, eta);
  const double exponent = 1.0 / (in.d + v.alpha);
  const double bracket = in.K * in.C * std::pow(v.kappa, v.alpha) *
                         std::pow(2.0 * in.beta_hat, -in.d) /
                         geometric_gap(in, v.alpha);
  RegretBound out;
  out.constant = 2.0 * in.beta_hat * std::pow(bracket, exponent);
  out.rate = std::pow(log_term(v.theta, horizon, eta) /
                          static_cast<double>(horizon),
                      exponent);
  out.bound = out.constant * out.rate;
  return out;
}

RegretBound regret_bound_quantile(const ComplexityInputs& in,
                                  std::int64_t horizon, double eta) {
  check_horizon(horizon, eta);
  if (!(in.density_floor > 0.0)) {
    throw std::invalid_argument("regret_bound_quantile: density floor must be positive");
  }
  const double m = quantile_margin(in.tau);
  const double spread =
      in.beta_hat * std::pow(in.diameter, in.gamma_hat) * in.density_floor;
  const double mf = m * in.density_floor;
  const double power = in.K * in.C * in.beta_hat * in.beta_hat *
                       (16.0 * m * m + 8.0 * spread * spread) /
                       (mf * mf * geometric_gap(in, 2.0));
  const double exponent = 1.0 / (in.d + 2.0);
  RegretBound out;
  out.constant = std::pow(power, exponent);
  out.rate = std::pow(log_term(2.0, horizon, eta) / static_cast<double>(horizon),
                      exponent);
  out.bound = out.constant * out.rate;
  return out;
}

RegretBound regret_bound_cvar(const ComplexityInputs& in, std::int64_t horizon,
                              double eta, double a, double b) {
  check_horizon(horizon, eta);
  if (!(a < b)) throw std::invalid_argument("regret_bound_cvar: requires a < b");
  const double tail = 1.0 - in.tau;
  const double lead = 1.0 + std::sqrt(10.0 * tail);
  const double bracket = lead * lead * in.K * in.C * (b - a) * (b - a) *
                         std::pow(2.0 * in.beta_hat, -in.d) /
                         (2.0 * tail * tail * geometric_gap(in, 2.0));
  const double exponent = 1.0 / (in.d + 2.0);
  RegretBound out;
  out.constant = 2.0 * in.beta_hat * std::pow(bracket, exponent);
  out.rate = std::pow(log_term(6.0, horizon, eta) / static_cast<double>(horizon),
                      exponent);
  out.bound = out.constant * out.rate;
  return out;
}

}  // namespace storoo
