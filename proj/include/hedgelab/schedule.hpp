#pragma once

// Revision grids t_i = 1 - (1 - i/n)^mu, their fine simulation grids, and the
// deterministic adjusted-volatility profiles that drive every pricing kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "hedgelab/errors.hpp"

namespace hedgelab {

inline void validate_grid_exponent(double mu) {
  if (!(mu >= 1.0 && mu < 2.0)) {
    throw ParameterError("grid exponent mu must satisfy 1 <= mu < 2, got " + std::to_string(mu));
  }
}

/// Rebalancing dates on [0, 1]; endpoints are exact.
inline std::vector<double> revision_times(std::size_t n, double mu) {
  if (n == 0) throw ParameterError("revision count n must be >= 1");
  validate_grid_exponent(mu);
  std::vector<double> t(n + 1);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i] = 1.0 - std::pow(1.0 - static_cast<double>(i) / dn, mu);
  }
  t.front() = 0.0;
  t.back() = 1.0;
  return t;
}

struct RevisionSchedule {
  std::size_t n = 0;
  double mu = 1.0;
  std::vector<double> times;          // t_0 = 0 < ... < t_n = 1
  std::size_t substeps_per_interval = 5;

  static RevisionSchedule make(std::size_t n, double mu, std::size_t substeps = 5) {
    if (substeps == 0) throw ParameterError("substeps_per_interval must be >= 1");
    return RevisionSchedule{n, mu, revision_times(n, mu), substeps};
  }

  [[nodiscard]] std::size_t fine_size() const { return n * substeps_per_interval + 1; }

  /// Index of revision date t_i inside the fine grid.
  [[nodiscard]] std::size_t fine_index(std::size_t i) const { return i * substeps_per_interval; }

  /// Fine grid, uniform inside each revision interval; contains every t_i.
  [[nodiscard]] std::vector<double> fine_times() const {
    std::vector<double> f(fine_size());
    const auto m = substeps_per_interval;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = times[i];
      const double h = (times[i + 1] - a) / static_cast<double>(m);
      for (std::size_t k = 0; k < m; ++k) f[i * m + k] = a + static_cast<double>(k) * h;
    }
    f.back() = 1.0;
    return f;
  }
};

/// sigma_hat^2_t = mu^{-1/2} rho sqrt(n) (1-t)^{(1-mu)/(2mu)}
struct NewFormProfile {
  double rho = 1.0;
  std::size_t n = 1;
  double mu = 1.0;
};

/// sigma_hat^2 = sigma0^2 + rho n^{1/2 - alpha}, constant in t.
struct ClassicProfile {
  double sigma0 = 0.2;
  double rho = 1.0;
  std::size_t n = 1;
  double alpha = 0.0;
};

class VolatilityProfile {
 public:
  VolatilityProfile(NewFormProfile p) : mode_(p) {  // NOLINT(google-explicit-constructor)
    if (!(p.rho > 0.0)) throw ParameterError("rho must be positive");
    if (p.n == 0) throw ParameterError("n must be >= 1");
    validate_grid_exponent(p.mu);
  }
  VolatilityProfile(ClassicProfile p) : mode_(p) {  // NOLINT(google-explicit-constructor)
    if (!(p.sigma0 > 0.0)) throw ParameterError("sigma0 must be positive");
    if (!(p.rho >= 0.0)) throw ParameterError("rho must be non-negative");
    if (p.n == 0) throw ParameterError("n must be >= 1");
    if (!(p.alpha >= 0.0 && p.alpha <= 0.5)) throw ParameterError("alpha must lie in [0, 1/2]");
  }

  [[nodiscard]] bool is_new_form() const { return std::holds_alternative<NewFormProfile>(mode_); }
  [[nodiscard]] const NewFormProfile* new_form() const { return std::get_if<NewFormProfile>(&mode_); }
  [[nodiscard]] const ClassicProfile* classic() const { return std::get_if<ClassicProfile>(&mode_); }

  [[nodiscard]] double rho() const {
    return std::visit([](const auto& p) { return p.rho; }, mode_);
  }
  [[nodiscard]] std::size_t n() const {
    return std::visit([](const auto& p) { return p.n; }, mode_);
  }
  /// Grid exponent; the classic profile is paired with the uniform grid.
  [[nodiscard]] double mu() const {
    if (const auto* p = new_form()) return p->mu;
    return 1.0;
  }

  /// mu_tilde = 2 sqrt(mu) / (mu + 1); equals 1 on the uniform grid.
  [[nodiscard]] double mu_tilde() const {
    const double m = mu();
    return 2.0 * std::sqrt(m) / (m + 1.0);
  }

  [[nodiscard]] double lambda0() const { return lambda(0.0); }

  /// Convergence rate exponent beta = mu / (2 (mu + 1)).
  [[nodiscard]] double beta() const {
    const double m = mu();
    return m / (2.0 * (m + 1.0));
  }

  /// Normalisation theta_n = n^beta rho^{2 beta}.
  [[nodiscard]] double theta_n() const {
    const double b = beta();
    return std::pow(static_cast<double>(n()), b) * std::pow(rho(), 2.0 * b);
  }

  [[nodiscard]] double adjusted_vol_sq(double t) const {
    if (!(t >= 0.0 && t < 1.0)) {
      throw DomainError("adjusted volatility is defined on [0, 1) only");
    }
    if (const auto* p = new_form()) {
      const double scale = p->rho * std::sqrt(static_cast<double>(p->n)) / std::sqrt(p->mu);
      if (p->mu == 1.0) return scale;
      return scale * std::pow(1.0 - t, (1.0 - p->mu) / (2.0 * p->mu));
    }
    return classic_vol_sq(*classic());
  }

  /// lambda_t = integral of sigma_hat^2 over [t, 1]; exactly zero at t = 1.
  [[nodiscard]] double lambda(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("lambda is defined on [0, 1] only");
    if (t == 1.0) return 0.0;
    if (const auto* p = new_form()) {
      const double l0 = mu_tilde() * p->rho * std::sqrt(static_cast<double>(p->n));
      if (p->mu == 1.0) return l0 * (1.0 - t);
      return l0 * std::pow(1.0 - t, (p->mu + 1.0) / (2.0 * p->mu));
    }
    return classic_vol_sq(*classic()) * (1.0 - t);
  }

 private:
  static double classic_vol_sq(const ClassicProfile& p) {
    return p.sigma0 * p.sigma0 +
           p.rho * std::pow(static_cast<double>(p.n), 0.5 - p.alpha);
  }

  std::variant<NewFormProfile, ClassicProfile> mode_;
};

inline double adjusted_vol_sq(double t, const VolatilityProfile& profile) {
  return profile.adjusted_vol_sq(t);
}

inline double lambda_of_t(double t, const VolatilityProfile& profile) {
  return profile.lambda(t);
}

struct GridDiagnostics {
  std::vector<double> ratios;  // delta_lambda_j / sqrt(delta_t_j), j = 1..interior_end
  std::size_t interior_end = 0;
  double max_rel_deviation = 0.0;  // max_j |ratio_j / rho - 1|
  double min_delta_lambda = 0.0;
  double max_delta_lambda = 0.0;
};

/// Per-interval ratios that should approach rho as n grows. Interior indices
/// are j = 1 .. n - ceil(sqrt(n)); the last few intervals before maturity are
/// excluded because their relative error is O(1/(n (1 - j/n))).
inline GridDiagnostics grid_diagnostics(const RevisionSchedule& schedule,
                                        const VolatilityProfile& profile) {
  if (!profile.is_new_form()) throw ConfigurationError("grid diagnostics need a new-form profile");
  const std::size_t n = schedule.n;
  const auto cut = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  GridDiagnostics d;
  d.interior_end = n > cut ? n - cut : 1;
  d.min_delta_lambda = std::numeric_limits<double>::infinity();
  const double rho = profile.rho();
  for (std::size_t j = 1; j <= d.interior_end; ++j) {
    const double dl = profile.lambda(schedule.times[j - 1]) - profile.lambda(schedule.times[j]);
    const double dt = schedule.times[j] - schedule.times[j - 1];
    const double r = dl / std::sqrt(dt);
    d.ratios.push_back(r);
    d.max_rel_deviation = std::max(d.max_rel_deviation, std::abs(r / rho - 1.0));
    d.min_delta_lambda = std::min(d.min_delta_lambda, dl);
    d.max_delta_lambda = std::max(d.max_delta_lambda, dl);
  }
  return d;
}

}  // namespace hedgelab
