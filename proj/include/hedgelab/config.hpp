#pragma once

// INI run configuration: parsing with strict key checking, defaults, and the
// manifest serialisation that reproduces a run.
//
// Sections and keys (all optional, defaults in parentheses):
//   [model]        kind (hull_white), sigma_min, a, b, delta, sigma0, corr, s0, y0
//   [option]       strike (1)
//   [schedule]     n (10,50,100,500,1000), mu (1), substeps (5)
//   [profile]      form (new_form|classic), rho_rule (fixed|power|leland), rho,
//                  rho_scale, rho_exponent, sigma0, alpha
//   [costs]        type (dollar_proportional|spread_price_proportional|constant_spread),
//                  kappa (0.01), alpha (0)
//   [hedge]        strategy (lepinette), correction (lepinette), liquidation, eta0_times_kappa
//   [monte_carlo]  paths (500), seed (42), threads (1)
//   [quadrature]   rel_tol, lambda_max, substitute
//   [convergence]  ladder
//   [superhedge]   n, tolerance
//   [quantile]     epsilon, kappa, steps, eps_grid, r_grid
//   [limits]       x_min, x_max, points, sigma, rho
//   [manifest]     command, version (written by the tool, checked on re-run)

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hedgelab/errors.hpp"
#include "hedgelab/experiments.hpp"
#include "hedgelab/quantile.hpp"
#include "hedgelab/version.hpp"

namespace hedgelab {

/// Schema violation: unknown key, malformed value, or out-of-domain setting.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& key, const std::string& msg)
      : std::runtime_error(key + ": " + msg), key_(key) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct QuantileSettings {
  QuantileConfig config{};
  std::size_t steps = 100;
  std::vector<double> eps_grid{0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
  std::vector<double> r_grid{0.0, 0.025, 0.05, 0.075, 0.1};
};

struct LimitsSettings {
  double x_min = 0.2;
  double x_max = 5.0;
  std::size_t points = 20;
  double sigma = 4.0;
  double rho = 2.0;
};

struct RunConfig {
  std::string command;
  ExperimentConfig experiment{};
  std::vector<std::size_t> ladder{50, 100, 200, 400, 800, 1600};
  std::vector<std::size_t> superhedge_n{200, 2000};
  double superhedge_tolerance = 0.0;
  QuantileSettings quantile{};
  LimitsSettings limits{};
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"model", {"kind", "sigma_min", "a", "b", "delta", "sigma0", "corr", "s0", "y0"}},
      {"option", {"strike"}},
      {"schedule", {"n", "mu", "substeps"}},
      {"profile", {"form", "rho_rule", "rho", "rho_scale", "rho_exponent", "sigma0", "alpha"}},
      {"costs", {"type", "kappa", "alpha"}},
      {"hedge", {"strategy", "correction", "liquidation", "eta0_times_kappa"}},
      {"monte_carlo", {"paths", "seed", "threads"}},
      {"quadrature", {"rel_tol", "lambda_max", "substitute"}},
      {"convergence", {"ladder"}},
      {"superhedge", {"n", "tolerance"}},
      {"quantile", {"epsilon", "kappa", "steps", "eps_grid", "r_grid"}},
      {"limits", {"x_min", "x_max", "points", "sigma", "rho"}},
      {"manifest", {"command", "version"}},
  };
  return s;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Drops "; ..." and "# ..." trailing comments, which the INI reader keeps as part of the value.
inline std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    out << line << '\n';
  }
  return out.str();
}

inline double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) throw SchemaError(key, "expected a number, got '" + raw + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw SchemaError(key, "expected a non-negative integer, got '" + raw + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw SchemaError(key, "expected true/false, got '" + raw + "'");
}

inline std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(trim(item));
  }
  return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& raw) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(raw)) out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  if (out.empty()) throw SchemaError(key, "expected a non-empty list");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split_list(raw)) out.push_back(parse_double(key, item));
  if (out.empty()) throw SchemaError(key, "expected a non-empty list");
  return out;
}

template <class E>
E parse_enum(const std::string& key, const std::string& raw, std::initializer_list<std::pair<const char*, E>> opts) {
  const std::string v = trim(raw);
  std::string names;
  for (const auto& [name, e] : opts) {
    if (v == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw SchemaError(key, "unknown value '" + raw + "' (expected one of " + names + ")");
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Parses INI text. Unknown sections/keys and malformed values raise
/// SchemaError with the offending "section.key"; domain violations raise
/// SchemaError too, except a rho rule that fails rho -> infinity with
/// rho n^{-mu/(2(mu+2))} -> 0, which raises RhoRuleError.
inline RunConfig parse_config_string(const std::string& text, const std::string& command) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is(detail::strip_inline_comments(text));
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw SchemaError("<file>", std::string("malformed INI: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) throw SchemaError(section, "key outside any section");
    const auto it = detail::schema().find(section);
    if (it == detail::schema().end()) throw SchemaError(section, "unknown section");
    for (const auto& [key, value] : keys) {
      if (!it->second.count(key)) throw SchemaError(section + "." + key, "unknown key");
    }
  }

  RunConfig rc;
  rc.command = command;
  ExperimentConfig& c = rc.experiment;
  const auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (const auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  };
  const auto num = [&](const std::string& path, double& dst) {
    if (const auto v = get(path)) dst = detail::parse_double(path, *v);
  };
  const auto flag = [&](const std::string& path, bool& dst) {
    if (const auto v = get(path)) dst = detail::parse_bool(path, *v);
  };

  if (const auto v = get("manifest.command"); v && !command.empty() && detail::trim(*v) != command) {
    throw SchemaError("manifest.command", "manifest was written by '" + detail::trim(*v) + "', not '" + command + "'");
  }

  // model
  if (const auto v = get("model.kind")) c.model.kind = detail::trim(*v);
  ModelParams& mp = c.model.params;
  // Unset parameters default to the Hull-White market used in the tables.
  mp = ModelParams{2.0, -2.0, 1.0, 0.0, 0.0, 0.05, 1.0, 2.0};
  if (c.model.kind == "sin_squared_gbm") mp.sigma_min = 0.1;
  num("model.sigma_min", mp.sigma_min);
  num("model.a", mp.a);
  num("model.b", mp.b);
  num("model.delta", mp.delta);
  num("model.sigma0", mp.sigma0);
  num("model.corr", mp.corr);
  num("model.s0", mp.s0);
  num("model.y0", mp.y0);
  num("option.strike", c.strike);

  // schedule
  if (const auto v = get("schedule.n")) c.n_list = detail::parse_size_list("schedule.n", *v);
  num("schedule.mu", c.mu);
  if (const auto v = get("schedule.substeps")) c.substeps = detail::parse_u64("schedule.substeps", *v);

  // profile
  if (const auto v = get("profile.form")) {
    c.profile.form = detail::parse_enum<ProfileForm>(
        "profile.form", *v, {{"new_form", ProfileForm::NewForm}, {"classic", ProfileForm::Classic}});
  }
  if (const auto v = get("profile.rho_rule")) {
    c.profile.rule = detail::parse_enum<RhoRule>(
        "profile.rho_rule", *v, {{"fixed", RhoRule::Fixed}, {"power", RhoRule::Power}, {"leland", RhoRule::Leland}});
  }
  num("profile.rho", c.profile.rho);
  num("profile.rho_scale", c.profile.rho_scale);
  num("profile.rho_exponent", c.profile.rho_exponent);
  num("profile.sigma0", c.profile.sigma0);
  num("profile.alpha", c.profile.alpha);

  // costs
  enum class CostType { Dollar, SpreadPrice, Constant };
  CostType ct = CostType::Dollar;
  if (const auto v = get("costs.type")) {
    ct = detail::parse_enum<CostType>("costs.type", *v,
                                      {{"dollar_proportional", CostType::Dollar},
                                       {"spread_price_proportional", CostType::SpreadPrice},
                                       {"constant_spread", CostType::Constant}});
  }
  double kappa = 0.01;
  double alpha = 0.0;
  num("costs.kappa", kappa);
  num("costs.alpha", alpha);
  if (ct != CostType::Dollar && get("costs.alpha")) throw SchemaError("costs.alpha", "only dollar_proportional costs take alpha");
  switch (ct) {
    case CostType::Dollar: c.cost = DollarProportional{kappa, alpha}; break;
    case CostType::SpreadPrice: c.cost = SpreadPriceProportional{kappa}; break;
    case CostType::Constant: c.cost = ConstantSpread{kappa}; break;
  }

  // hedge
  if (const auto v = get("hedge.strategy")) {
    c.strategy = detail::parse_enum<Strategy>("hedge.strategy", *v,
                                              {{"leland", Strategy::Leland}, {"lepinette", Strategy::Lepinette}});
  }
  if (const auto v = get("hedge.correction")) {
    c.correction = detail::parse_enum<CorrectionMode>(
        "hedge.correction", *v,
        {{"none", CorrectionMode::None},
         {"leland_fixed_rho", CorrectionMode::LelandFixedRho},
         {"leland_rho_of_n", CorrectionMode::LelandRhoOfN},
         {"lepinette", CorrectionMode::Lepinette},
         {"high_freq_spread_price", CorrectionMode::HighFreqSpreadPrice},
         {"high_freq_constant_spread_leland", CorrectionMode::HighFreqConstantSpreadLeland},
         {"high_freq_constant_spread_lepinette", CorrectionMode::HighFreqConstantSpreadLepinette},
         {"classic_const_vol", CorrectionMode::ClassicConstVol}});
  }
  flag("hedge.liquidation", c.liquidation);
  flag("hedge.eta0_times_kappa", c.eta0_times_kappa);

  // monte_carlo
  if (const auto v = get("monte_carlo.paths")) c.n_paths = detail::parse_u64("monte_carlo.paths", *v);
  if (const auto v = get("monte_carlo.seed")) c.seed = detail::parse_u64("monte_carlo.seed", *v);
  if (const auto v = get("monte_carlo.threads")) {
    c.threads = static_cast<unsigned>(detail::parse_u64("monte_carlo.threads", *v));
  }

  // quadrature
  num("quadrature.rel_tol", c.quad.rel_tol);
  num("quadrature.lambda_max", c.quad.lambda_max);
  flag("quadrature.substitute", c.quad.substitute);

  if (const auto v = get("convergence.ladder")) rc.ladder = detail::parse_size_list("convergence.ladder", *v);
  if (const auto v = get("superhedge.n")) rc.superhedge_n = detail::parse_size_list("superhedge.n", *v);
  num("superhedge.tolerance", rc.superhedge_tolerance);

  QuantileSettings& q = rc.quantile;
  num("quantile.epsilon", q.config.epsilon);
  num("quantile.kappa", q.config.kappa);
  if (const auto v = get("quantile.steps")) q.steps = detail::parse_u64("quantile.steps", *v);
  if (const auto v = get("quantile.eps_grid")) q.eps_grid = detail::parse_double_list("quantile.eps_grid", *v);
  if (const auto v = get("quantile.r_grid")) q.r_grid = detail::parse_double_list("quantile.r_grid", *v);
  q.config.n_paths = c.n_paths;
  q.config.seed = c.seed;

  LimitsSettings& l = rc.limits;
  num("limits.x_min", l.x_min);
  num("limits.x_max", l.x_max);
  if (const auto v = get("limits.points")) l.points = detail::parse_u64("limits.points", *v);
  num("limits.sigma", l.sigma);
  num("limits.rho", l.rho);

  // Domain checks; an invalid rho rule surfaces as RhoRuleError.
  const auto domain = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const RhoRuleError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw SchemaError(key, e.what());
    } catch (const std::logic_error& e) {
      throw SchemaError(key, e.what());
    }
  };
  if (!(c.mu >= 1.0 && c.mu < 2.0)) throw SchemaError("schedule.mu", "mu must lie in [1, 2)");
  domain("config", [&] { validate(c); });
  if (!(rc.superhedge_tolerance >= 0.0)) throw SchemaError("superhedge.tolerance", "must be >= 0");
  for (const double e : q.eps_grid) {
    if (!(e >= 0.001 - 1e-15 && e <= 0.1 + 1e-15)) throw SchemaError("quantile.eps_grid", "epsilon values must lie in [0.001, 0.1]");
  }
  for (const double r : q.r_grid) {
    if (!(r >= 0.0 && r <= 0.1 + 1e-15)) throw SchemaError("quantile.r_grid", "r values must lie in [0, 0.1]");
  }
  if (q.steps == 0) throw SchemaError("quantile.steps", "must be >= 1");
  if (command == "quantile") domain("quantile", [&] { validate(q.config); });
  if (!(l.x_min > 0.0 && l.x_max > l.x_min)) throw SchemaError("limits.x_min", "need 0 < x_min < x_max");
  if (l.points < 2) throw SchemaError("limits.points", "must be >= 2");
  if (!(l.sigma > 0.0)) throw SchemaError("limits.sigma", "must be positive");
  if (!(l.rho > 0.0)) throw SchemaError("limits.rho", "must be positive");
  return rc;
}

inline RunConfig parse_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw SchemaError("--config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), command);
}

/// Full INI dump of a run; parsing it back reproduces the run.
inline std::string to_ini(const RunConfig& rc) {
  using detail::fmt;
  using detail::join;
  const ExperimentConfig& c = rc.experiment;
  const ModelParams& p = c.model.params;
  std::ostringstream os;
  os << "[manifest]\ncommand = " << rc.command << "\nversion = " << HEDGELAB_VERSION << "\n\n";
  os << "[model]\nkind = " << c.model.kind << "\nsigma_min = " << fmt(p.sigma_min) << "\na = " << fmt(p.a)
     << "\nb = " << fmt(p.b) << "\ndelta = " << fmt(p.delta) << "\nsigma0 = " << fmt(p.sigma0)
     << "\ncorr = " << fmt(p.corr) << "\ns0 = " << fmt(p.s0) << "\ny0 = " << fmt(p.y0) << "\n\n";
  os << "[option]\nstrike = " << fmt(c.strike) << "\n\n";
  os << "[schedule]\nn = " << join(c.n_list) << "\nmu = " << fmt(c.mu) << "\nsubsteps = " << c.substeps << "\n\n";
  const char* form = c.profile.form == ProfileForm::NewForm ? "new_form" : "classic";
  const char* rule = c.profile.rule == RhoRule::Fixed ? "fixed" : c.profile.rule == RhoRule::Power ? "power" : "leland";
  os << "[profile]\nform = " << form << "\nrho_rule = " << rule << "\nrho = " << fmt(c.profile.rho)
     << "\nrho_scale = " << fmt(c.profile.rho_scale) << "\nrho_exponent = " << fmt(c.profile.rho_exponent)
     << "\nsigma0 = " << fmt(c.profile.sigma0) << "\nalpha = " << fmt(c.profile.alpha) << "\n\n";
  os << "[costs]\n";
  if (const auto* d = std::get_if<DollarProportional>(&c.cost)) {
    os << "type = dollar_proportional\nkappa = " << fmt(d->kappa) << "\nalpha = " << fmt(d->alpha) << "\n\n";
  } else if (const auto* s = std::get_if<SpreadPriceProportional>(&c.cost)) {
    os << "type = spread_price_proportional\nkappa = " << fmt(s->kappa) << "\n\n";
  } else {
    os << "type = constant_spread\nkappa = " << fmt(std::get<ConstantSpread>(c.cost).kappa) << "\n\n";
  }
  os << "[hedge]\nstrategy = " << to_string(c.strategy) << "\ncorrection = " << to_string(c.correction)
     << "\nliquidation = " << (c.liquidation ? "true" : "false")
     << "\neta0_times_kappa = " << (c.eta0_times_kappa ? "true" : "false") << "\n\n";
  os << "[monte_carlo]\npaths = " << c.n_paths << "\nseed = " << c.seed << "\nthreads = " << c.threads << "\n\n";
  os << "[quadrature]\nrel_tol = " << fmt(c.quad.rel_tol) << "\nlambda_max = " << fmt(c.quad.lambda_max)
     << "\nsubstitute = " << (c.quad.substitute ? "true" : "false") << "\n\n";
  os << "[convergence]\nladder = " << join(rc.ladder) << "\n\n";
  os << "[superhedge]\nn = " << join(rc.superhedge_n) << "\ntolerance = " << fmt(rc.superhedge_tolerance) << "\n\n";
  const QuantileSettings& q = rc.quantile;
  os << "[quantile]\nepsilon = " << fmt(q.config.epsilon) << "\nkappa = " << fmt(q.config.kappa)
     << "\nsteps = " << q.steps << "\neps_grid = " << join(q.eps_grid) << "\nr_grid = " << join(q.r_grid) << "\n\n";
  const LimitsSettings& l = rc.limits;
  os << "[limits]\nx_min = " << fmt(l.x_min) << "\nx_max = " << fmt(l.x_max) << "\npoints = " << l.points
     << "\nsigma = " << fmt(l.sigma) << "\nrho = " << fmt(l.rho) << "\n";
  return os.str();
}

}  // namespace hedgelab
