#pragma once

// Discrete Leland and Lepinette hedges, transaction-cost regimes, exact wealth
// accounting, and the replication errors corrected by their known limits.

#include <cmath>
#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "hedgelab/analytics.hpp"
#include "hedgelab/errors.hpp"
#include "hedgelab/limits.hpp"
#include "hedgelab/models.hpp"
#include "hedgelab/schedule.hpp"

namespace hedgelab {

/// Cost kappa n^{-alpha} S |d gamma| (dollar volume).
struct DollarProportional {
  double kappa = 0.01;
  double alpha = 0.0;
};
/// Half-spread kappa n^{-1/2} S: cost kappa n^{-1/2} S |d gamma|.
struct SpreadPriceProportional {
  double kappa = 0.01;
};
/// Constant half-spread kappa: cost kappa |d gamma| (share volume).
struct ConstantSpread {
  double kappa = 0.01;
};

using CostModel = std::variant<DollarProportional, SpreadPriceProportional, ConstantSpread>;

inline double cost_kappa(const CostModel& c) {
  return std::visit([](const auto& m) { return m.kappa; }, c);
}

inline void validate_cost_model(const CostModel& c) {
  if (const auto* d = std::get_if<DollarProportional>(&c)) {
    if (!(d->kappa >= 0.0 && d->kappa < 1.0)) throw ParameterError("dollar cost rate kappa must lie in [0, 1)");
    if (!(d->alpha >= 0.0 && d->alpha <= 0.5)) throw ParameterError("cost exponent alpha must lie in [0, 1/2]");
  } else if (!(cost_kappa(c) >= 0.0)) {
    throw ParameterError("cost rate kappa must be non-negative");
  }
}

enum class Strategy { Leland, Lepinette };

inline std::string_view to_string(Strategy s) {
  return s == Strategy::Leland ? "leland" : "lepinette";
}

/// gamma_{i-1} = C_x(t_{i-1}, S_{t_{i-1}}) held on (t_{i-1}, t_i], i = 1..n.
inline std::vector<double> leland_positions(const PathBundle& path, const RevisionSchedule& schedule,
                                            const VolatilityProfile& profile, double strike) {
  std::vector<double> g(schedule.n);
  for (std::size_t i = 0; i < schedule.n; ++i) {
    const double lam = profile.lambda(schedule.times[i]);
    g[i] = delta(lam, path.s[schedule.fine_index(i)], strike);
  }
  return g;
}

/// Accumulated integral of C_xt(u, S_u) over [0, t_i] for i = 0..n-1, one
/// midpoint-in-lambda term per fine substep (sigma_hat^2 du = -d lambda).
inline std::vector<double> lepinette_corrections(const PathBundle& path,
                                                 const RevisionSchedule& schedule,
                                                 const VolatilityProfile& profile, double strike) {
  const std::vector<double> fine = schedule.fine_times();
  std::vector<double> corr(schedule.n, 0.0);
  double acc = 0.0;
  double lam_prev = profile.lambda(fine[0]);
  for (std::size_t i = 1; i < schedule.n; ++i) {
    for (std::size_t k = schedule.fine_index(i - 1); k < schedule.fine_index(i); ++k) {
      const double lam_next = profile.lambda(fine[k + 1]);
      const double mid = 0.5 * (lam_prev + lam_next);
      const double x = path.s[k];
      const double ph = phi_tilde(mid, x, strike);
      if (ph != 0.0) acc += ph * q_factor(mid, x, strike) / std::sqrt(mid) * (lam_prev - lam_next);
      lam_prev = lam_next;
    }
    corr[i] = acc;
  }
  return corr;
}

inline std::vector<double> lepinette_positions(const PathBundle& path,
                                               const RevisionSchedule& schedule,
                                               const VolatilityProfile& profile, double strike) {
  std::vector<double> g = leland_positions(path, schedule, profile, strike);
  const std::vector<double> c = lepinette_corrections(path, schedule, profile, strike);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= c[i];
  return g;
}

struct CostBreakdown {
  std::vector<double> costs;  // costs[i - 1] is charged at t_i, i = 1..n
  double volume = 0.0;        // J_n in the regime's units
  double total = 0.0;
};

/// Charges each rebalance at t_1..t_{n-1}. The opening trade at t_0 is free;
/// liquidation at t_n toward 1{S_1 > K} is charged only when requested.
inline CostBreakdown apply_costs(const std::vector<double>& positions, const PathBundle& path,
                                 const RevisionSchedule& schedule, const CostModel& cost,
                                 bool liquidation = false, double strike = 1.0) {
  const std::size_t n = schedule.n;
  if (positions.size() != n) throw ParameterError("positions must have one entry per interval");
  CostBreakdown out;
  out.costs.assign(n, 0.0);
  const double dn = static_cast<double>(n);
  const auto charge = [&](std::size_t i, double dgamma) {
    const double s = path.s[schedule.fine_index(i)];
    const double a = std::abs(dgamma);
    double c = 0.0;
    double vol = 0.0;
    if (const auto* d = std::get_if<DollarProportional>(&cost)) {
      vol = s * a;
      c = d->kappa * std::pow(dn, -d->alpha) * vol;
    } else if (const auto* sp = std::get_if<SpreadPriceProportional>(&cost)) {
      vol = s * a;
      c = sp->kappa / std::sqrt(dn) * vol;
    } else {
      vol = a;
      c = std::get<ConstantSpread>(cost).kappa * vol;
    }
    out.costs[i - 1] = c;
    out.volume += vol;
    out.total += c;
  };
  for (std::size_t i = 1; i < n; ++i) charge(i, positions[i] - positions[i - 1]);
  if (liquidation) {
    const double target = path.s[schedule.fine_index(n)] > strike ? 1.0 : 0.0;
    charge(n, target - positions[n - 1]);
  }
  return out;
}

struct HedgeOptions {
  bool liquidation = false;
};

struct HedgeOutcome {
  double v0 = 0.0;           // initial capital C(0, S_0)
  double gamma0 = 0.0;       // initial position
  double trading_gain = 0.0; // sum gamma_{i-1} (S_{t_i} - S_{t_{i-1}})
  double total_cost = 0.0;
  double volume = 0.0;
  double terminal_wealth = 0.0;
  double payoff = 0.0;
  double raw_error = 0.0;    // V_1 - h(S_1)
  double s1 = 0.0;
  double y1 = 0.0;
  double sigma_y1 = 0.0;
  double strike = 1.0;
  bool classic_profile = false;
};

inline HedgeOutcome hedge_path(const PathBundle& path, const RevisionSchedule& schedule,
                               const VolatilityProfile& profile, const MarketModel& model,
                               double strike, Strategy strategy, const CostModel& cost,
                               const HedgeOptions& opts = {}) {
  if (profile.n() != schedule.n) throw ConfigurationError("profile and schedule disagree on n");
  if (path.s.size() != schedule.fine_size()) throw ConfigurationError("path is not on the schedule's fine grid");
  const std::vector<double> pos = strategy == Strategy::Leland
                                      ? leland_positions(path, schedule, profile, strike)
                                      : lepinette_positions(path, schedule, profile, strike);
  const CostBreakdown cb = apply_costs(pos, path, schedule, cost, opts.liquidation, strike);

  HedgeOutcome o;
  o.strike = strike;
  o.classic_profile = !profile.is_new_form();
  o.v0 = bs_price(profile.lambda0(), path.s[0], strike);
  o.gamma0 = pos[0];
  double gain = 0.0;
  for (std::size_t i = 1; i <= schedule.n; ++i) {
    gain += pos[i - 1] * (path.s[schedule.fine_index(i)] - path.s[schedule.fine_index(i - 1)]);
  }
  o.trading_gain = gain;
  o.total_cost = cb.total;
  o.volume = cb.volume;
  o.terminal_wealth = o.v0 + gain - cb.total;
  o.s1 = path.s.back();
  o.y1 = path.y.back();
  o.sigma_y1 = model.sigma(o.y1);
  o.payoff = call_payoff(o.s1, strike);
  o.raw_error = o.terminal_wealth - o.payoff;
  return o;
}

enum class CorrectionMode {
  None,                             // raw error V_1 - h(S_1)
  LelandFixedRho,                   // + kappa J(S_1, y_1, rho) - min
  LelandRhoOfN,                     // + kappa J*(S_1) - min
  Lepinette,                        // - eta min
  HighFreqSpreadPrice,              // - min (cost limit vanishes)
  HighFreqConstantSpreadLeland,     // + kappa J0 - min
  HighFreqConstantSpreadLepinette,  // - (1 - eta0) min
  ClassicConstVol                   // + kappa J(S_1, sigma0, rho) - min
};

inline std::string_view to_string(CorrectionMode m) {
  switch (m) {
    case CorrectionMode::None: return "none";
    case CorrectionMode::LelandFixedRho: return "leland_fixed_rho";
    case CorrectionMode::LelandRhoOfN: return "leland_rho_of_n";
    case CorrectionMode::Lepinette: return "lepinette";
    case CorrectionMode::HighFreqSpreadPrice: return "high_freq_spread_price";
    case CorrectionMode::HighFreqConstantSpreadLeland: return "high_freq_constant_spread_leland";
    case CorrectionMode::HighFreqConstantSpreadLepinette: return "high_freq_constant_spread_lepinette";
    case CorrectionMode::ClassicConstVol: return "classic_const_vol";
  }
  return "unknown";
}

struct CorrectionOptions {
  bool eta0_times_kappa = false;
  QuadratureConfig quad{};
};

/// Throws ConfigurationError when the cost regime does not match the mode.
inline void check_correction_compatible(CorrectionMode mode, const CostModel& cost) {
  const auto* dollar = std::get_if<DollarProportional>(&cost);
  switch (mode) {
    case CorrectionMode::None: return;
    case CorrectionMode::LelandFixedRho:
    case CorrectionMode::LelandRhoOfN:
    case CorrectionMode::Lepinette:
    case CorrectionMode::ClassicConstVol:
      if (dollar == nullptr || dollar->alpha != 0.0) {
        throw ConfigurationError(std::string(to_string(mode)) +
                                 " correction needs dollar-proportional costs with alpha = 0");
      }
      return;
    case CorrectionMode::HighFreqSpreadPrice:
      if (!std::holds_alternative<SpreadPriceProportional>(cost)) {
        throw ConfigurationError("high_freq_spread_price correction needs spread-price costs");
      }
      return;
    case CorrectionMode::HighFreqConstantSpreadLeland:
    case CorrectionMode::HighFreqConstantSpreadLepinette:
      if (!std::holds_alternative<ConstantSpread>(cost)) {
        throw ConfigurationError(std::string(to_string(mode)) + " correction needs constant-spread costs");
      }
      return;
  }
}

inline double corrected_error(const HedgeOutcome& o, CorrectionMode mode, double rho,
                              const CostModel& cost, const CorrectionOptions& opts = {}) {
  check_correction_compatible(mode, cost);
  const double kappa = cost_kappa(cost);
  const double k = o.strike;
  const double m = std::min(o.s1, k);
  switch (mode) {
    case CorrectionMode::None: return o.raw_error;
    case CorrectionMode::LelandFixedRho:
      if (o.classic_profile) throw ConfigurationError("leland_fixed_rho expects the new-form profile");
      return o.raw_error - m + (kappa == 0.0 ? 0.0 : kappa * j_limit(o.s1, o.sigma_y1, rho, k, opts.quad));
    case CorrectionMode::ClassicConstVol:
      if (!o.classic_profile) throw ConfigurationError("classic_const_vol expects the classic profile");
      return o.raw_error - m + (kappa == 0.0 ? 0.0 : kappa * j_limit(o.s1, o.sigma_y1, rho, k, opts.quad));
    case CorrectionMode::LelandRhoOfN:
      return o.raw_error - m + (kappa == 0.0 ? 0.0 : kappa * j_star(o.s1, k, opts.quad));
    case CorrectionMode::Lepinette:
      return o.raw_error - eta(o.sigma_y1, rho, kappa) * m;
    case CorrectionMode::HighFreqSpreadPrice:
      return o.raw_error - m;
    case CorrectionMode::HighFreqConstantSpreadLeland:
      return o.raw_error - m + (kappa == 0.0 ? 0.0 : kappa * j_zero(o.s1, o.sigma_y1, rho, k, opts.quad));
    case CorrectionMode::HighFreqConstantSpreadLepinette: {
      const double e0 = eta_zero(o.sigma_y1, rho, o.s1, opts.eta0_times_kappa ? kappa : 1.0);
      return o.raw_error - (1.0 - e0) * m;
    }
  }
  return o.raw_error;
}

}  // namespace hedgelab
