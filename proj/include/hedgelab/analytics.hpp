#pragma once

// Black-Scholes call kernel parameterised by the cumulated variance lambda
// instead of calendar time, so one set of formulas serves every profile.

#include <cmath>
#include <limits>

#include "hedgelab/errors.hpp"
#include "hedgelab/normal.hpp"
#include "hedgelab/schedule.hpp"

namespace hedgelab {

struct OptionSpec {
  double strike = 1.0;

  explicit OptionSpec(double k) : strike(k) {
    if (!(k > 0.0)) throw ParameterError("strike must be positive");
  }
  [[nodiscard]] double payoff(double x) const { return x > strike ? x - strike : 0.0; }
};

inline double call_payoff(double x, double strike) { return x > strike ? x - strike : 0.0; }

struct Greeks {
  double price = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};

/// v(lambda, x) = ln(x/K)/sqrt(lambda) + sqrt(lambda)/2
inline double v_value(double lambda, double x, double strike) {
  if (!(lambda > 0.0)) throw DomainError("v requires lambda > 0");
  const double s = std::sqrt(lambda);
  return std::log(x / strike) / s + 0.5 * s;
}

/// phi(v(lambda, x)); continuous extension at lambda = 0.
inline double phi_tilde(double lambda, double x, double strike) {
  if (lambda < 0.0) throw DomainError("phi_tilde requires lambda >= 0");
  if (lambda == 0.0) return x == strike ? kInvSqrt2Pi : 0.0;
  return normal_pdf(v_value(lambda, x, strike));
}

/// q(lambda, x) = ln(x/K)/(2 lambda) - 1/4
inline double q_factor(double lambda, double x, double strike) {
  if (!(lambda > 0.0)) throw DomainError("q requires lambda > 0");
  return std::log(x / strike) / (2.0 * lambda) - 0.25;
}

/// p = (rho / sigma(y)) q
inline double p_factor(double lambda, double x, double sigma_y, double rho, double strike) {
  if (!(sigma_y > 0.0)) throw DomainError("p requires sigma(y) > 0");
  return rho / sigma_y * q_factor(lambda, x, strike);
}

inline double bs_price(double lambda, double x, double strike) {
  if (lambda < 0.0) throw DomainError("price requires lambda >= 0");
  if (lambda == 0.0) return call_payoff(x, strike);
  const double v = v_value(lambda, x, strike);
  return x * normal_cdf(v) - strike * normal_cdf(v - std::sqrt(lambda));
}

/// Hedge ratio Phi(v); at lambda = 0 the step 1{x > K}, 1/2 at the strike.
inline double delta(double lambda, double x, double strike) {
  if (lambda < 0.0) throw DomainError("delta requires lambda >= 0");
  if (lambda == 0.0) return x > strike ? 1.0 : (x == strike ? 0.5 : 0.0);
  return normal_cdf(v_value(lambda, x, strike));
}

/// d^2 C / dx^2 = phi_tilde / (x sqrt(lambda)).
inline double gamma(double lambda, double x, double strike) {
  if (lambda < 0.0) throw DomainError("gamma requires lambda >= 0");
  if (!(x > 0.0)) throw DomainError("gamma requires x > 0");
  if (lambda == 0.0) return x == strike ? std::numeric_limits<double>::infinity() : 0.0;
  return phi_tilde(lambda, x, strike) / (x * std::sqrt(lambda));
}

inline Greeks greeks(double lambda, double x, double strike) {
  return {bs_price(lambda, x, strike), delta(lambda, x, strike), gamma(lambda, x, strike)};
}

/// dC_x/dt along the profile: phi_tilde * sigma_hat^2 * q / sqrt(lambda).
inline double delta_time_derivative(double t, double x, const VolatilityProfile& profile,
                                    double strike) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("delta time-derivative is defined on [0, 1)");
  const double lam = profile.lambda(t);
  return phi_tilde(lam, x, strike) * profile.adjusted_vol_sq(t) * q_factor(lam, x, strike) /
         std::sqrt(lam);
}

}  // namespace hedgelab
