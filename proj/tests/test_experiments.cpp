#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "hedgelab/experiments.hpp"

namespace hl = hedgelab;

namespace {

hl::ExperimentConfig table1() {
  hl::ExperimentConfig c;
  c.model.kind = "hull_white";
  c.model.params = hl::ModelParams{2.0, -2.0, 1.0, 0.0, 0.0, 0.05, 1.0, 2.0};
  c.profile.rho = 2.0;
  c.cost = hl::DollarProportional{0.01, 0.0};
  c.n_paths = 500;
  c.seed = 42;
  return c;
}

std::string report_bytes(const hl::ExperimentConfig& c) {
  std::ostringstream os;
  hl::write_report_csv(os, hl::run_table(c));
  return os.str();
}

}  // namespace

TEST(MeanCI, CoverageSelfTest) {
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> nd(0.3, 2.0);
  int covered = 0;
  const int reps = 1000;
  std::vector<double> xs(200);
  for (int r = 0; r < reps; ++r) {
    for (auto& x : xs) x = nd(rng);
    const auto ci = hl::mean_ci(xs);
    if (ci.lo <= 0.3 && 0.3 <= ci.hi) ++covered;
  }
  const double frac = static_cast<double>(covered) / reps;
  EXPECT_GT(frac, 0.925);
  EXPECT_LT(frac, 0.975);
}

TEST(MeanCI, HandValues) {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto ci = hl::mean_ci(xs);
  EXPECT_DOUBLE_EQ(ci.mean, 2.5);
  EXPECT_NEAR(ci.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_NEAR(ci.hi - ci.mean, 1.96 * ci.se, 1e-15);
  EXPECT_NEAR(hl::rms(xs), std::sqrt(7.5), 1e-15);
}

TEST(Table, PriceColumns) {
  auto c = table1();
  c.n_paths = 10;
  const double want1[] = {0.7914, 0.9399, 0.9747, 0.99917, 0.99993};
  const auto rep = hl::run_table(c);
  ASSERT_EQ(rep.rows.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(rep.rows[i].price, want1[i], 5e-5) << rep.rows[i].n;
  auto c2 = c;
  c2.cost = hl::DollarProportional{0.001, 0.0};
  c2.profile.rho = 4.0;
  c2.n_list = {50};
  EXPECT_NEAR(hl::run_table(c2).rows[0].price, 0.9922, 5e-5);
}

TEST(Table, FirstRowCorrectedError) {
  auto c = table1();
  c.n_list = {10};
  const auto row = hl::run_table(c).rows[0];
  EXPECT_GE(row.corrected.mean, -0.28);
  EXPECT_LE(row.corrected.mean, -0.17);
  EXPECT_EQ(row.n_paths, 500u);
}

TEST(Table, GainLossIsMeanRawError) {
  auto c = table1();
  c.n_paths = 300;
  const auto r = hl::simulate_hedges(c, 20);
  const auto row = hl::run_row(c, 20);
  double s = 0.0;
  for (const double x : r.raw) s += x;
  EXPECT_NEAR(row.gain_loss, s / r.raw.size(), 1e-15);
}

TEST(Table, Deterministic) {
  auto c = table1();
  c.n_list = {10, 50};
  c.n_paths = 200;
  EXPECT_EQ(report_bytes(c), report_bytes(c));
  auto d = c;
  d.seed = 43;
  EXPECT_NE(report_bytes(c), report_bytes(d));
}

TEST(Table, ThreadCountDoesNotChangeReport) {
  auto c = table1();
  c.n_list = {10, 50};
  c.n_paths = 203;
  const std::string one = report_bytes(c);
  c.threads = 4;
  EXPECT_EQ(report_bytes(c), one);
  c.threads = 7;
  EXPECT_EQ(report_bytes(c), one);
}

TEST(Validate, RhoRules) {
  auto c = table1();
  EXPECT_NO_THROW(hl::validate(c));
  c.profile.rule = hl::RhoRule::Power;
  c.profile.rho_exponent = 0.1;
  EXPECT_NO_THROW(hl::validate(c));
  c.profile.rho_exponent = 0.3;
  EXPECT_THROW(hl::validate(c), hl::RhoRuleError);
  c.profile.rho_exponent = 1.0 / 6.0;
  EXPECT_THROW(hl::validate(c), hl::RhoRuleError);
  c.mu = 1.5;
  c.profile.rho_exponent = 0.2;
  EXPECT_NO_THROW(hl::validate(c));
  c = table1();
  c.strategy = hl::Strategy::Leland;
  c.correction = hl::CorrectionMode::LelandRhoOfN;
  EXPECT_THROW(hl::validate(c), hl::RhoRuleError);
}

TEST(Validate, ModeAndDomain) {
  auto c = table1();
  c.cost = hl::ConstantSpread{0.01};
  EXPECT_THROW(hl::validate(c), hl::ConfigurationError);
  c = table1();
  c.correction = hl::CorrectionMode::ClassicConstVol;
  EXPECT_THROW(hl::validate(c), hl::ConfigurationError);
  c = table1();
  c.profile.form = hl::ProfileForm::Classic;
  EXPECT_THROW(hl::validate(c), hl::ConfigurationError);
  c.correction = hl::CorrectionMode::None;
  EXPECT_NO_THROW(hl::validate(c));
  c.mu = 1.5;
  EXPECT_THROW(hl::validate(c), hl::ParameterError);
  c = table1();
  c.mu = 2.0;
  EXPECT_THROW(hl::validate(c), hl::ParameterError);
  c = table1();
  c.model.kind = "nope";
  EXPECT_THROW(hl::validate(c), hl::ParameterError);
}

TEST(Convergence, FitOnExactData) {
  const std::vector<double> x{50, 100, 200, 400, 800, 1600};
  std::vector<double> y;
  for (const double v : x) y.push_back(3.0 * std::pow(v, -0.25));
  const auto f = hl::fit_loglog(x, y);
  EXPECT_NEAR(f.slope, -0.25, 1e-13);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
}

TEST(Convergence, LadderChecks) {
  const auto c = table1();
  const std::vector<std::size_t> short_ladder{50, 100, 200, 400};
  EXPECT_THROW(hl::convergence_study(c, short_ladder), hl::ParameterError);
  const std::vector<std::size_t> narrow{50, 60, 70, 80, 90, 100};
  EXPECT_THROW(hl::convergence_study(c, narrow), hl::ParameterError);
}

// A steeper grid gives a faster rate.
TEST(Convergence, SlopeOrderingInMu) {
  auto c = table1();
  c.strategy = hl::Strategy::Leland;
  c.correction = hl::CorrectionMode::LelandFixedRho;
  c.n_paths = 1000;
  c.seed = 7;
  const std::vector<std::size_t> ladder{50, 100, 200, 400, 800, 1600};
  const auto r1 = hl::convergence_study(c, ladder);
  c.mu = 1.5;
  const auto r15 = hl::convergence_study(c, ladder);
  EXPECT_NEAR(r1.beta, 0.25, 1e-15);
  EXPECT_NEAR(r15.beta, 0.3, 1e-15);
  EXPECT_LT(r15.fit.slope, r1.fit.slope);
}

TEST(Superhedge, FractionAndNegativeControl) {
  auto c = table1();
  c.strategy = hl::Strategy::Leland;
  c.correction = hl::CorrectionMode::LelandRhoOfN;
  c.profile.rule = hl::RhoRule::Power;
  c.profile.rho_scale = 1.0;
  c.profile.rho_exponent = 0.1;
  c.n_paths = 1000;
  const auto a = hl::superhedge_check(c, 200);
  const auto b = hl::superhedge_check(c, 2000);
  EXPECT_TRUE(a.lower_bound_nonnegative);
  EXPECT_TRUE(b.lower_bound_nonnegative);
  EXPECT_LE(a.fraction, b.fraction);
  EXPECT_GT(b.fraction, 0.95);

  auto neg = table1();
  neg.strategy = hl::Strategy::Leland;
  neg.correction = hl::CorrectionMode::None;
  neg.profile.rho = 0.05;
  neg.cost = hl::DollarProportional{0.5, 0.0};
  neg.n_paths = 1000;
  const auto bad = hl::superhedge_check(neg, 200);
  EXPECT_LT(bad.fraction, 0.5);
  EXPECT_LT(bad.min_error, 0.0);
}

// Row means with 5 and 20 substeps agree within their combined Monte-Carlo error.
TEST(Table, InsensitiveToSubsteps) {
  auto c = table1();
  for (const std::size_t n : {10u, 100u}) {
    c.substeps = 5;
    const auto a = hl::run_row(c, n).corrected;
    c.substeps = 20;
    const auto b = hl::run_row(c, n).corrected;
    EXPECT_LE(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.se, b.se)) << "n=" << n << " " << a.mean << " " << b.mean;
  }
}
