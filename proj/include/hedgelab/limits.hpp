#pragma once

// Limits of the discrete hedging errors: the cost functionals J, J*, J0, the
// min-identity, and the Lepinette coefficients eta, eta0. The lambda-integrals
// are evaluated in u = sqrt(lambda), which removes the lambda^{-1/2}
// singularity at the origin: lambda^{-1/2} d lambda = 2 du.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "hedgelab/analytics.hpp"
#include "hedgelab/errors.hpp"
#include "hedgelab/normal.hpp"

namespace hedgelab {

struct QuadratureConfig {
  double rel_tol = 1e-9;
  double lambda_max = 400.0;
  bool substitute = true;
};

/// G(a) = E|Z + a| = 2 phi(a) + a (2 Phi(a) - 1)
inline double g_func(double a) {
  const double m = std::abs(a);
  return 2.0 * normal_pdf(m) + m * (1.0 - 2.0 * normal_cdf(-m));
}

/// Lambda(a) = Var|Z + a| = 1 + a^2 - G(a)^2, written through d = G(a) - |a|
/// to avoid cancellation for large |a|.
inline double lambda_func(double a) {
  const double m = std::abs(a);
  const double d = 2.0 * (normal_pdf(m) - m * normal_cdf(-m));
  return 1.0 - 2.0 * m * d - d * d;
}

/// E|a Z + b| for a >= 0.
inline double expected_abs_linear(double a, double b) {
  if (a < 0.0) throw ParameterError("expected_abs_linear requires a >= 0");
  const double m = std::abs(b);
  if (a == 0.0) return m;
  const double z = m / a;
  return 2.0 * a * normal_pdf(z) + m * (1.0 - 2.0 * normal_cdf(-z));
}

namespace detail {

struct GslWorkspace {
  explicit GslWorkspace(std::size_t n) : w(gsl_integration_workspace_alloc(n)) {}
  ~GslWorkspace() { gsl_integration_workspace_free(w); }
  GslWorkspace(const GslWorkspace&) = delete;
  GslWorkspace& operator=(const GslWorkspace&) = delete;
  gsl_integration_workspace* w;
};

inline void disable_gsl_abort() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

/// Integrates f(lambda) lambda^{-1/2} over (0, lambda_max].
inline double integrate_lambda(const std::function<double(double)>& f, double x, double strike,
                               const QuadratureConfig& cfg, const char* what) {
  if (!(cfg.rel_tol > 0.0)) throw ParameterError("quadrature tolerance must be positive");
  if (!(cfg.lambda_max > 0.0)) throw ParameterError("lambda_max must be positive");
  disable_gsl_abort();
  constexpr std::size_t kLimit = 2000;
  GslWorkspace ws(kLimit);
  double result = 0.0;
  double abserr = 0.0;
  int status = 0;

  if (cfg.substitute) {
    const auto integrand = [&f](double u) { return u <= 0.0 ? 0.0 : 2.0 * f(u * u); };
    gsl_function fn{[](double u, void* p) { return (*static_cast<decltype(integrand)*>(p))(u); },
                    const_cast<void*>(static_cast<const void*>(&integrand))};
    // Breaks at the scales of the integrand: a spike of width |ln(x/K)| near
    // u = 0, the kink of |q| at sqrt(2 ln(x/K)), and the bulk of phi_tilde.
    const double u_max = std::sqrt(cfg.lambda_max);
    const double c = std::abs(std::log(x / strike));
    const double uc = std::sqrt(2.0 * c);
    std::vector<double> cand{0.5 * c, c, 4.0 * c, 0.5 * uc, uc, 2.0 * uc + 1.0};
    std::sort(cand.begin(), cand.end());
    std::vector<double> breaks{0.0};
    for (const double b : cand) {
      if (b > breaks.back() * 1.01 + 1e-12 && b < u_max) breaks.push_back(b);
    }
    breaks.push_back(u_max);
    status = gsl_integration_qagp(&fn, breaks.data(), breaks.size(), 0.0, cfg.rel_tol, kLimit, ws.w,
                                  &result, &abserr);
  } else {
    const auto integrand = [&f](double lam) { return lam <= 0.0 ? 0.0 : f(lam) / std::sqrt(lam); };
    gsl_function fn{[](double l, void* p) { return (*static_cast<decltype(integrand)*>(p))(l); },
                    const_cast<void*>(static_cast<const void*>(&integrand))};
    status = gsl_integration_qags(&fn, 0.0, cfg.lambda_max, 0.0, cfg.rel_tol, kLimit, ws.w, &result,
                                  &abserr);
  }

  if (status != GSL_SUCCESS || !std::isfinite(result)) {
    std::ostringstream os;
    os << what << ": quadrature did not converge (x=" << x << ", K=" << strike << ", value=" << result
       << ", error estimate=" << abserr << ", gsl status=" << gsl_strerror(status) << ")";
    throw NumericalError(os.str());
  }
  return result;
}

inline void check_price(double x, double strike) {
  if (!(x > 0.0)) throw DomainError("limit functionals need x > 0");
  if (!(strike > 0.0)) throw DomainError("limit functionals need K > 0");
}

}  // namespace detail

/// x * int lambda^{-1/2} phi_tilde dlambda - 2 min(x, K); vanishes identically.
inline double min_identity_residual(double x, double strike, const QuadratureConfig& cfg = {}) {
  detail::check_price(x, strike);
  const double integral = detail::integrate_lambda(
      [&](double lam) { return phi_tilde(lam, x, strike); }, x, strike, cfg, "min identity");
  return x * integral - 2.0 * std::min(x, strike);
}

/// J*(x) = x int lambda^{-1/2} phi_tilde |q| dlambda; the rho -> infinity limit of J.
inline double j_star(double x, double strike, const QuadratureConfig& cfg = {}) {
  detail::check_price(x, strike);
  const double integral = detail::integrate_lambda(
      [&](double lam) {
        const double ph = phi_tilde(lam, x, strike);
        if (ph == 0.0) return 0.0;
        return ph * std::abs(q_factor(lam, x, strike));
      },
      x, strike, cfg, "J*");
  return x * integral;
}

/// J0 = int lambda^{-1/2} phi_tilde E|(sigma_y/rho) Z + q| dlambda, the
/// share-volume limit for a constant spread.
inline double j_zero(double x, double sigma_y, double rho, double strike,
                     const QuadratureConfig& cfg = {}) {
  detail::check_price(x, strike);
  if (!(sigma_y > 0.0)) throw DomainError("J0 needs sigma(y) > 0");
  if (!(rho > 0.0)) throw DomainError("J0 needs rho > 0");
  const double a = sigma_y / rho;
  return detail::integrate_lambda(
      [&](double lam) {
        const double ph = phi_tilde(lam, x, strike);
        if (ph == 0.0) return 0.0;
        return ph * expected_abs_linear(a, q_factor(lam, x, strike));
      },
      x, strike, cfg, "J0");
}

/// J(x, y, rho) = x * J0(x, y, rho): limit of the dollar trading volume.
inline double j_limit(double x, double sigma_y, double rho, double strike,
                      const QuadratureConfig& cfg = {}) {
  return x * j_zero(x, sigma_y, rho, strike, cfg);
}

/// eta = 1 - kappa sigma(y1) rho^{-1} sqrt(8/pi)
inline double eta(double sigma_y, double rho, double kappa) {
  if (!(rho > 0.0)) throw DomainError("eta needs rho > 0");
  return 1.0 - kappa * sigma_y / rho * kSqrt8OverPi;
}

/// eta0 = sigma(y1) rho^{-1} S1^{-1} sqrt(8/pi), as printed for the
/// constant-spread regime. `kappa_multiplier` scales it (1 keeps the printed form).
inline double eta_zero(double sigma_y, double rho, double s1, double kappa_multiplier = 1.0) {
  if (!(rho > 0.0)) throw DomainError("eta0 needs rho > 0");
  if (!(s1 > 0.0)) throw DomainError("eta0 needs S1 > 0");
  return kappa_multiplier * sigma_y / (rho * s1) * kSqrt8OverPi;
}

}  // namespace hedgelab
