#pragma once

// Monte-Carlo harness: hedging tables, convergence-rate fits, super-hedging
// checks and terminal-price sampling for quantile pricing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hedgelab/analytics.hpp"
#include "hedgelab/errors.hpp"
#include "hedgelab/hedging.hpp"
#include "hedgelab/limits.hpp"
#include "hedgelab/models.hpp"
#include "hedgelab/quantile.hpp"
#include "hedgelab/schedule.hpp"

namespace hedgelab {

/// Raised when a rho(n) rule violates rho -> infinity, rho n^{-mu/(2(mu+2))} -> 0.
class RhoRuleError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

struct ModelSpec {
  std::string kind = "hull_white";  // catalog name, or "sin_squared_gbm"
  ModelParams params{};

  [[nodiscard]] MarketModel make() const {
    if (kind == "sin_squared_gbm") return make_sin_squared_gbm(params);
    return make_model(model_kind_from_string(kind), params);
  }

  static ModelKind model_kind_from_string(const std::string& s) {
    for (const auto k : {ModelKind::HullWhite, ModelKind::UniformElliptic, ModelKind::SteinStein,
                         ModelKind::Heston, ModelKind::Scott, ModelKind::ConstantVol}) {
      if (to_string(k) == s) return k;
    }
    throw ParameterError("unknown model kind '" + s + "'");
  }
};

enum class ProfileForm { NewForm, Classic };
enum class RhoRule { Fixed, Power, Leland };

struct ProfileSpec {
  ProfileForm form = ProfileForm::NewForm;
  RhoRule rule = RhoRule::Fixed;
  double rho = 2.0;           // Fixed
  double rho_scale = 1.0;     // Power: rho(n) = scale n^exponent
  double rho_exponent = 0.1;
  double sigma0 = 0.2;        // Classic
  double alpha = 0.0;         // Classic volatility exponent

  /// rho for n revisions; the Leland rule is kappa sigma0 sqrt(8/pi).
  [[nodiscard]] double rho_for(std::size_t n, double kappa) const {
    switch (rule) {
      case RhoRule::Fixed: return rho;
      case RhoRule::Power: return rho_scale * std::pow(static_cast<double>(n), rho_exponent);
      case RhoRule::Leland: return kappa * sigma0 * kSqrt8OverPi;
    }
    return rho;
  }

  [[nodiscard]] VolatilityProfile make(std::size_t n, double mu, double kappa) const {
    const double r = rho_for(n, kappa);
    if (form == ProfileForm::NewForm) return VolatilityProfile(NewFormProfile{r, n, mu});
    return VolatilityProfile(ClassicProfile{sigma0, r, n, alpha});
  }
};

/// Upper bound on the exponent of a power rule rho(n) = c n^k.
inline double rho_exponent_bound(double mu) { return mu / (2.0 * (mu + 2.0)); }

struct ExperimentConfig {
  ModelSpec model{};
  double strike = 1.0;
  std::vector<std::size_t> n_list{10, 50, 100, 500, 1000};
  double mu = 1.0;
  std::size_t substeps = 5;
  ProfileSpec profile{};
  CostModel cost = DollarProportional{0.01, 0.0};
  Strategy strategy = Strategy::Lepinette;
  CorrectionMode correction = CorrectionMode::Lepinette;
  bool liquidation = false;
  bool eta0_times_kappa = false;
  std::size_t n_paths = 500;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  QuadratureConfig quad{};
};

/// Domain checks shared by the harness and the config parser. A rho rule
/// that breaks rho -> infinity with rho n^{-mu/(2(mu+2))} -> 0 raises RhoRuleError.
inline void validate(const ExperimentConfig& c) {
  validate_grid_exponent(c.mu);
  if (c.substeps == 0) throw ParameterError("substeps must be >= 1");
  if (c.n_paths == 0) throw ParameterError("path count must be >= 1");
  if (c.n_list.empty()) throw ParameterError("n list must not be empty");
  for (const auto n : c.n_list) {
    if (n == 0) throw ParameterError("every n must be >= 1");
  }
  if (!(c.strike > 0.0)) throw ParameterError("strike must be positive");
  validate_cost_model(c.cost);
  if (c.profile.form == ProfileForm::Classic && c.mu != 1.0) {
    throw ParameterError("the classic profile uses the uniform grid (mu = 1)");
  }
  if (c.profile.rule == RhoRule::Fixed && !(c.profile.rho > 0.0)) throw ParameterError("rho must be positive");
  if (c.profile.rule == RhoRule::Power) {
    if (!(c.profile.rho_scale > 0.0)) throw ParameterError("rho_scale must be positive");
    const double bound = rho_exponent_bound(c.mu);
    if (!(c.profile.rho_exponent > 0.0 && c.profile.rho_exponent < bound)) {
      throw RhoRuleError("rho(n) = c n^k needs 0 < k < mu/(2(mu+2)) = " + std::to_string(bound) +
                         ", got k = " + std::to_string(c.profile.rho_exponent));
    }
  }
  if (c.correction == CorrectionMode::LelandRhoOfN && c.profile.rule != RhoRule::Power) {
    throw RhoRuleError("leland_rho_of_n correction needs a growing rho(n) power rule");
  }
  check_correction_compatible(c.correction, c.cost);
  const bool classic = c.profile.form == ProfileForm::Classic;
  if (c.correction == CorrectionMode::ClassicConstVol && !classic) {
    throw ConfigurationError("classic_const_vol correction needs the classic profile");
  }
  if (classic && c.correction != CorrectionMode::None && c.correction != CorrectionMode::ClassicConstVol) {
    throw ConfigurationError("the classic profile supports corrections none and classic_const_vol");
  }
  (void)c.model.make();
}

struct MeanCI {
  double mean = 0.0;
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Sample mean with a 95% normal interval, mean +- 1.96 SE.
inline MeanCI mean_ci(std::span<const double> xs) {
  if (xs.empty()) throw ParameterError("mean_ci needs samples");
  const auto n = static_cast<double>(xs.size());
  double s = 0.0;
  for (const double x : xs) s += x;
  const double m = s / n;
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  const double se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {m, se, m - 1.96 * se, m + 1.96 * se};
}

inline double rms(std::span<const double> xs) {
  double s = 0.0;
  for (const double x : xs) s += x * x;
  return std::sqrt(s / static_cast<double>(xs.size()));
}

/// Per-path results for one n, indexed by path.
struct PathResults {
  std::vector<double> raw;
  std::vector<double> corrected;
  std::vector<double> s1;
};

inline PathResults simulate_hedges(const ExperimentConfig& c, std::size_t n) {
  const MarketModel model = c.model.make();
  const RevisionSchedule schedule = RevisionSchedule::make(n, c.mu, c.substeps);
  const double kappa = cost_kappa(c.cost);
  const VolatilityProfile profile = c.profile.make(n, c.mu, kappa);
  const double rho = profile.rho();
  PathResults r;
  r.raw.resize(c.n_paths);
  r.corrected.resize(c.n_paths);
  r.s1.resize(c.n_paths);
  const HedgeOptions hopts{c.liquidation};
  const CorrectionOptions copts{c.eta0_times_kappa, c.quad};
  simulate_paths(
      model, schedule, c.n_paths, c.seed,
      [&](const PathBundle& path) {
        const HedgeOutcome o = hedge_path(path, schedule, profile, model, c.strike, c.strategy, c.cost, hopts);
        r.raw[path.path_index] = o.raw_error;
        r.corrected[path.path_index] = corrected_error(o, c.correction, rho, c.cost, copts);
        r.s1[path.path_index] = o.s1;
      },
      c.threads);
  return r;
}

struct ExperimentRow {
  std::size_t n = 0;
  double gain_loss = 0.0;
  MeanCI corrected{};
  double rms_corrected = 0.0;
  double rms_raw = 0.0;
  double price = 0.0;
  double initial_delta = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
};

inline ExperimentRow run_row(const ExperimentConfig& c, std::size_t n) {
  const auto t0 = std::chrono::steady_clock::now();
  const PathResults r = simulate_hedges(c, n);
  ExperimentRow row;
  row.n = n;
  row.gain_loss = mean_ci(r.raw).mean;
  row.corrected = mean_ci(r.corrected);
  row.rms_corrected = rms(r.corrected);
  row.rms_raw = rms(r.raw);
  const VolatilityProfile profile = c.profile.make(n, c.mu, cost_kappa(c.cost));
  const double s0 = c.model.params.s0;
  row.price = bs_price(profile.lambda0(), s0, c.strike);
  row.initial_delta = delta(profile.lambda0(), s0, c.strike);
  row.n_paths = c.n_paths;
  row.seed = c.seed;
  row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

inline ExperimentReport run_table(const ExperimentConfig& c) {
  validate(c);
  ExperimentReport rep;
  for (const auto n : c.n_list) rep.rows.push_back(run_row(c, n));
  return rep;
}

inline void write_report_csv(std::ostream& os, const ExperimentReport& rep) {
  os << "n,gain_loss,corrected_error,ci_lo,ci_hi,price,strategy\n";
  char buf[256];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.10f,%.10f,%.10f,%.10f,%.10f,%.10f\n", r.n, r.gain_loss,
                  r.corrected.mean, r.corrected.lo, r.corrected.hi, r.price, r.initial_delta);
    os << buf;
  }
}

inline void print_report(std::ostream& os, const ExperimentReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%6s %12s %12s %12s %12s %10s %10s %8s\n", "n", "gain/loss",
                "corrected", "lower", "upper", "price", "strategy", "time[s]");
  os << buf;
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%6zu %12.7f %12.7f %12.7f %12.7f %10.7f %10.7f %8.2f\n", r.n,
                  r.gain_loss, r.corrected.mean, r.corrected.lo, r.corrected.hi, r.price,
                  r.initial_delta, r.runtime_s);
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Convergence rates

struct LogLogFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
};

/// Least squares of log(y) on log(x).
inline LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw ParameterError("log-log fit needs >= 3 matched points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::log(y[i]) - f.intercept - f.slope * std::log(x[i]);
    sse += e * e;
  }
  f.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

struct ConvergencePoint {
  std::size_t n = 0;
  double rms = 0.0;
  double mean = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  LogLogFit fit{};
  double beta = 0.0;  // theoretical rate exponent for the configured grid
};

/// Slope of log RMS(error) against log n, where the error is the configured
/// correction (CorrectionMode::None gives the raw replication error).
inline ConvergenceResult convergence_study(const ExperimentConfig& c, std::span<const std::size_t> ladder) {
  if (ladder.size() < 5) throw ParameterError("convergence ladder needs >= 5 rungs");
  const auto [lo, hi] = std::minmax_element(ladder.begin(), ladder.end());
  if (std::log10(static_cast<double>(*hi) / static_cast<double>(*lo)) < 1.5 - 1e-12) {
    throw ParameterError("convergence ladder must span >= 1.5 decades");
  }
  ExperimentConfig cc = c;
  cc.n_list.assign(ladder.begin(), ladder.end());
  validate(cc);
  ConvergenceResult out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto n : ladder) {
    const PathResults r = simulate_hedges(cc, n);
    const ConvergencePoint p{n, rms(r.corrected), mean_ci(r.corrected).mean};
    out.points.push_back(p);
    xs.push_back(static_cast<double>(n));
    ys.push_back(p.rms);
  }
  out.fit = fit_loglog(xs, ys);
  out.beta = c.mu / (2.0 * (c.mu + 1.0));
  return out;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceResult& r) {
  os << "n,rms,mean\n";
  char buf[128];
  for (const auto& p : r.points) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g\n", p.n, p.rms, p.mean);
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Super-hedging

struct SuperhedgeResult {
  std::size_t n = 0;
  double fraction = 0.0;        // share of paths with V_1 >= h(S_1) - tolerance
  double min_error = 0.0;
  bool lower_bound_nonnegative = true;  // (1 - kappa) min(S_1, K) >= 0 on every path
};

inline SuperhedgeResult superhedge_check(const ExperimentConfig& c, std::size_t n, double tolerance = 0.0) {
  ExperimentConfig cc = c;
  cc.n_list = {n};
  validate(cc);
  const PathResults r = simulate_hedges(cc, n);
  SuperhedgeResult out;
  out.n = n;
  const double kappa = cost_kappa(c.cost);
  std::size_t ok = 0;
  out.min_error = r.raw.front();
  for (std::size_t i = 0; i < r.raw.size(); ++i) {
    if (r.raw[i] >= -tolerance) ++ok;
    out.min_error = std::min(out.min_error, r.raw[i]);
    if ((1.0 - kappa) * std::min(r.s1[i], c.strike) < 0.0) out.lower_bound_nonnegative = false;
  }
  out.fraction = static_cast<double>(ok) / static_cast<double>(r.raw.size());
  return out;
}

// ---------------------------------------------------------------------------
// Terminal prices for quantile pricing

inline std::vector<double> sample_terminal_prices(const MarketModel& model, const RevisionSchedule& schedule,
                                                  std::size_t n_paths, std::uint64_t seed,
                                                  unsigned threads = 1) {
  std::vector<double> s1(n_paths);
  simulate_paths(
      model, schedule, n_paths, seed, [&](const PathBundle& p) { s1[p.path_index] = p.s.back(); },
      threads);
  return s1;
}

}  // namespace hedgelab
