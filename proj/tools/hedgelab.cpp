// hedgelab: command-line front end for the hedging experiments.
//
//   hedgelab table      --config configs/table1.cfg --seed 42 --out out/
//   hedgelab converge   --config configs/converge.cfg
//   hedgelab limits     --check-identity
//   hedgelab quantile   --config configs/fig2.cfg
//   hedgelab superhedge --config configs/superhedge.cfg
//   hedgelab diag       --config configs/table1.cfg
//
// Exit codes: 0 success, 2 schema/domain violation, 3 invalid rho(n) rule,
// 4 numerical failure, 1 anything else.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hedgelab/config.hpp"
#include "hedgelab/experiments.hpp"
#include "hedgelab/limits.hpp"
#include "hedgelab/quantile.hpp"
#include "hedgelab/schedule.hpp"

namespace fs = std::filesystem;
using namespace hedgelab;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out = ".";
  bool check_identity = false;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

template <class Fn>
void write_csv(const fs::path& p, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_file(p, os.str());
  std::cerr << "wrote " << p.string() << "\n";
}

RunConfig load(const std::string& command, const Options& o) {
  RunConfig rc = o.config.empty() ? parse_config_string("", command) : parse_config(o.config, command);
  if (o.seed) {
    rc.experiment.seed = *o.seed;
    rc.quantile.config.seed = *o.seed;
  }
  if (o.threads) rc.experiment.threads = *o.threads;
  return rc;
}

int cmd_table(const RunConfig& rc, const fs::path& out) {
  const ExperimentReport rep = run_table(rc.experiment);
  print_report(std::cout, rep);
  write_csv(out / "report.csv", [&](std::ostream& os) { write_report_csv(os, rep); });
  return 0;
}

int cmd_converge(const RunConfig& rc, const fs::path& out) {
  const ConvergenceResult r = convergence_study(rc.experiment, rc.ladder);
  std::printf("%8s %14s %14s\n", "n", "rms", "mean");
  for (const auto& p : r.points) std::printf("%8zu %14.8f %14.8f\n", p.n, p.rms, p.mean);
  std::printf("slope = %.4f +- %.4f   (rate exponent beta = %.4f)\n", r.fit.slope, r.fit.slope_se, r.beta);
  write_csv(out / "convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, r); });
  return 0;
}

int cmd_limits(const RunConfig& rc, const fs::path& out, bool check_identity) {
  const LimitsSettings& l = rc.limits;
  const double k = rc.experiment.strike;
  const QuadratureConfig& q = rc.experiment.quad;
  double worst = 0.0;
  std::ostringstream csv;
  csv << "x,min_identity_residual,J,J_star,J0\n";
  std::printf("%10s %14s %14s %14s %14s\n", "x", "residual", "J", "J*", "J0");
  for (std::size_t i = 0; i < l.points; ++i) {
    const double x = l.x_min + (l.x_max - l.x_min) * static_cast<double>(i) / static_cast<double>(l.points - 1);
    const double res = min_identity_residual(x, k, q);
    const double j = j_limit(x, l.sigma, l.rho, k, q);
    const double js = j_star(x, k, q);
    const double j0 = j_zero(x, l.sigma, l.rho, k, q);
    worst = std::max(worst, std::abs(res));
    std::printf("%10.5f %14.3e %14.8f %14.8f %14.8f\n", x, res, j, js, j0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.10g,%.6e,%.12g,%.12g,%.12g\n", x, res, j, js, j0);
    csv << buf;
  }
  write_file(out / "limits.csv", csv.str());
  std::cerr << "wrote " << (out / "limits.csv").string() << "\n";
  if (check_identity) {
    const bool ok = worst <= 1e-8;
    std::printf("min identity: max |residual| = %.3e  %s\n", worst, ok ? "ok" : "FAILED (> 1e-8)");
    if (!ok) return 4;
  }
  return 0;
}

int cmd_quantile(const RunConfig& rc, const fs::path& out) {
  const ExperimentConfig& c = rc.experiment;
  const QuantileSettings& qs = rc.quantile;
  const MarketModel model = c.model.make();
  const RevisionSchedule sched = RevisionSchedule::make(qs.steps, 1.0, c.substeps);
  const std::vector<double> s1 = sample_terminal_prices(model, sched, qs.config.n_paths, qs.config.seed, c.threads);
  const double s0 = model.s0();
  const double d = delta_epsilon(s1, qs.config.epsilon, qs.config.kappa, s0, c.strike);
  const ReductionSurface surf =
      reduction_surface(qs.eps_grid, qs.r_grid, s1, qs.config.kappa, s0, c.strike, s0);
  std::printf("epsilon = %g  kappa = %g  N = %zu\n", qs.config.epsilon, qs.config.kappa, qs.config.n_paths);
  std::printf("delta_eps = %.6f   1 - delta_eps = %.6f\n", d, 1.0 - d);
  std::printf("%10s %14s", "epsilon", "1-delta");
  for (const double r : surf.rs) std::printf("   r=%-8.4g", r);
  std::printf("\n");
  for (std::size_t i = 0; i < surf.epsilons.size(); ++i) {
    std::printf("%10.4g %14.6f", surf.epsilons[i], surf.reduction[i]);
    for (const double v : surf.value[i]) std::printf(" %12.6f", v);
    std::printf("\n");
  }
  write_csv(out / "surface.csv", [&](std::ostream& os) { write_surface_csv(os, surf); });
  write_csv(out / "price_reduction.csv", [&](std::ostream& os) { write_price_reduction_csv(os, surf); });
  return 0;
}

int cmd_superhedge(const RunConfig& rc, const fs::path& out) {
  std::ostringstream csv;
  csv << "n,fraction,min_error,lower_bound_nonnegative\n";
  std::printf("%8s %10s %14s %8s\n", "n", "fraction", "min error", "bound>=0");
  for (const auto n : rc.superhedge_n) {
    const SuperhedgeResult r = superhedge_check(rc.experiment, n, rc.superhedge_tolerance);
    std::printf("%8zu %10.4f %14.8f %8s\n", r.n, r.fraction, r.min_error, r.lower_bound_nonnegative ? "yes" : "no");
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu,%.10f,%.10f,%d\n", r.n, r.fraction, r.min_error,
                  r.lower_bound_nonnegative ? 1 : 0);
    csv << buf;
  }
  write_file(out / "superhedge.csv", csv.str());
  std::cerr << "wrote " << (out / "superhedge.csv").string() << "\n";
  return 0;
}

int cmd_diag(const RunConfig& rc, const fs::path& out) {
  const ExperimentConfig& c = rc.experiment;
  std::ostringstream csv;
  csv << "n,rho,interior_end,max_rel_deviation,min_delta_lambda,max_delta_lambda\n";
  std::printf("%8s %10s %10s %16s %16s %16s\n", "n", "rho", "interior", "max rel dev", "min dlambda", "max dlambda");
  for (const auto n : c.n_list) {
    const RevisionSchedule s = RevisionSchedule::make(n, c.mu, c.substeps);
    const VolatilityProfile p = c.profile.make(n, c.mu, cost_kappa(c.cost));
    const GridDiagnostics d = grid_diagnostics(s, p);
    std::printf("%8zu %10.5f %10zu %16.6e %16.6e %16.6e\n", n, p.rho(), d.interior_end, d.max_rel_deviation,
                d.min_delta_lambda, d.max_delta_lambda);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%zu,%.10e,%.10e,%.10e\n", n, p.rho(), d.interior_end,
                  d.max_rel_deviation, d.min_delta_lambda, d.max_delta_lambda);
    csv << buf;
  }
  write_file(out / "diag.csv", csv.str());
  std::cerr << "wrote " << (out / "diag.csv").string() << "\n";
  return 0;
}

int dispatch(const std::string& command, const Options& o) {
  const RunConfig rc = load(command, o);
  const fs::path out(o.out);
  fs::create_directories(out);
  int code = 0;
  if (command == "table") code = cmd_table(rc, out);
  else if (command == "converge") code = cmd_converge(rc, out);
  else if (command == "limits") code = cmd_limits(rc, out, o.check_identity);
  else if (command == "quantile") code = cmd_quantile(rc, out);
  else if (command == "superhedge") code = cmd_superhedge(rc, out);
  else if (command == "diag") code = cmd_diag(rc, out);
  write_file(out / "manifest.ini", to_ini(rc));
  std::cerr << "wrote " << (out / "manifest.ini").string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo lab for hedging under transaction costs in stochastic-volatility markets"};
  app.require_subcommand(1);
  Options o;
  const std::pair<const char*, const char*> commands[] = {
      {"table", "hedging-error table over the n list"},
      {"converge", "log-log RMS convergence study over the ladder"},
      {"limits", "cost-limit functionals and the min identity on an x grid"},
      {"quantile", "quantile price factor and reduction surface"},
      {"superhedge", "share of paths with nonnegative replication error"},
      {"diag", "revision-grid diagnostics"},
  };
  std::string chosen;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "seed override");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads");
    if (std::string(name) == "limits") sub->add_flag("--check-identity", o.check_identity, "fail unless residuals <= 1e-8");
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return dispatch(chosen, o);
  } catch (const RhoRuleError& e) {
    std::cerr << "error: rho rule: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "error: config " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
