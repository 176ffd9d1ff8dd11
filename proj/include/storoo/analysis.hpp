#pragma once

#include <cstdint>

namespace storoo {

/// (theta, kappa, alpha): a node sampled m_{eta,h}(theta, kappa, alpha)
/// times meets the expansion condition with high probability.
struct SafeConstants {
  double theta = 2.0;
  double kappa = 0.7071067811865476;
  double alpha = 2.0;
};

/// Problem constants the regret bounds depend on. d, C and the density
/// floor are supplied by the user; nothing here is estimated from data.
struct ComplexityInputs {
  double d = 0.0;       ///< near-optimality dimension
  double C = 1.0;       ///< near-optimality constant
  double rho = 1.0 / 3.0;
  double c = 0.5;
  double K = 3.0;
  double beta_hat = 1.0;
  double gamma_hat = 1.0;
  double tau = 0.5;
  double density_floor = 1.0;  ///< min over X of the density near the quantile
  double diameter = 1.0;       ///< diam(X)
};

struct Regret {
  double raw = 0.0;      ///< g* - g(x_T); slightly negative under grid slack
  double clamped = 0.0;  ///< max(raw, 0)
};

Regret simple_regret(double g_star, double g_at_returned);

/// log(theta T^2/eta) (kappa / (beta_hat delta_h^gamma_hat))^alpha, with
/// `bias` = beta_hat delta_h^gamma_hat.
double m_eta_h(const SafeConstants& v, double eta, std::int64_t horizon,
               double bias);
double m_eta_h(const SafeConstants& v, double eta, std::int64_t horizon,
               double beta_hat, double gamma_hat, double delta_h);

/// Quantile safe constants for Hoeffding bounds. Throws
/// std::invalid_argument unless density_floor > 0 and tau in (0, 1).
SafeConstants safe_constants_quantile(double tau, double beta_hat,
                                      double gamma_hat, double diameter,
                                      double density_floor);

/// Brown-bound CVaR safe constants with kappa = (b-a)(1+sqrt(10(1-tau)))
/// / (sqrt(2)(1-tau)); the radius term enters through m_{eta,h}.
SafeConstants safe_constants_cvar(double tau, double a, double b);

/// Same triple with kappa additionally divided by beta_hat delta_ref^gamma_hat,
/// as displayed next to the Brown bounds.
SafeConstants safe_constants_cvar_displayed(double tau, double a, double b,
                                            double beta_hat, double gamma_hat,
                                            double delta_ref);

/// min(tau, 1 - tau)
double quantile_margin(double tau);

struct RegretBound {
  double constant = 0.0;  ///< c1, c2 or c3
  double rate = 0.0;      ///< [log(theta T^2/eta)/T]^{1/(d+alpha)}
  double bound = 0.0;     ///< constant * rate
};

/// Generic bound for a safe-constant vector:
///   c1 = 2 beta [K C kappa^alpha (2 beta)^{-d} / (1 - rho^{d gamma + gamma alpha})]^{1/(d+alpha)}.
/// Throws std::invalid_argument when rho^{d gamma + gamma alpha} >= 1.
RegretBound regret_bound_generic(const SafeConstants& v,
                                 const ComplexityInputs& inputs,
                                 std::int64_t horizon, double eta);

/// Quantile bound with c2^{d+2} = K C beta^2 (16 m^2 + 8 (beta diam^gamma f)^2)
/// / ((m f)^2 (1 - rho^{d gamma + 2 gamma})), log term log(2T^2/eta).
RegretBound regret_bound_quantile(const ComplexityInputs& inputs,
                                  std::int64_t horizon, double eta);

/// CVaR bound with c3 = 2 beta [(1+sqrt(10(1-tau)))^2 K C (b-a)^2 (2 beta)^{-d}
/// / (2 (1-tau)^2 (1 - rho^{d gamma + 2 gamma}))]^{1/(d+2)}, log term log(6T^2/eta).
RegretBound regret_bound_cvar(const ComplexityInputs& inputs,
                              std::int64_t horizon, double eta, double a,
                              double b);

}  // namespace storoo
