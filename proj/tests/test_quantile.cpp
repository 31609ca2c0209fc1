#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/quantile.hpp"

namespace hl = hedgelab;

namespace {

std::vector<double> lognormal_sample(std::size_t n, std::uint64_t seed, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> s(n);
  for (auto& x : s) x = std::exp(-0.5 * sigma * sigma + sigma * nd(rng));
  return s;
}

}  // namespace

TEST(Upsilon, HandCases) {
  const std::vector<double> flat(2000, 1.0);
  const double k = 0.01;
  for (const double a : {0.001, 0.005, 0.0099, 0.0101, 0.3, 1.0}) {
    EXPECT_EQ(hl::upsilon(a, flat, k, 1.0, 1.0), a > k ? 1.0 : 0.0) << a;
  }
  const auto s = lognormal_sample(5000, 1, 0.8);
  EXPECT_EQ(hl::upsilon(1.0, s, 0.001, 1.0, 1.0), 1.0);
}

TEST(Upsilon, Monotone) {
  const auto s = lognormal_sample(3000, 2, 1.2);
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double u = hl::upsilon(i / 200.0, s, 0.002, 1.0, 1.0);
    EXPECT_GE(u, prev);
    prev = u;
  }
}

TEST(DeltaEpsilon, DegenerateSample) {
  const std::vector<double> flat(1000, 1.0);
  for (const double e : {0.001, 0.01, 0.5, 0.999}) {
    EXPECT_NEAR(hl::delta_epsilon(flat, e, 0.001, 1.0, 1.0), 0.001, 1e-15);
  }
}

TEST(DeltaEpsilon, RefusesUnresolvableQuantile) {
  const auto s = lognormal_sample(999, 3, 0.5);
  EXPECT_THROW(hl::delta_epsilon(s, 0.001, 0.001, 1.0, 1.0), hl::ParameterError);
  EXPECT_NO_THROW(hl::delta_epsilon(s, 0.002, 0.001, 1.0, 1.0));
  hl::QuantileConfig c;
  c.n_paths = 999;
  EXPECT_THROW(hl::validate(c), hl::ParameterError);
  c.n_paths = 1000;
  c.epsilon = 1.0;
  EXPECT_THROW(hl::validate(c), hl::ParameterError);
}

TEST(DeltaEpsilon, MonotoneInEpsilonAndBounded) {
  const auto s = lognormal_sample(10000, 4, 1.5);
  double prev = 2.0;
  for (const double e : {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.3, 0.9}) {
    const double d = hl::delta_epsilon(s, e, 0.001, 1.0, 1.0);
    EXPECT_LE(d, prev);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    prev = d;
  }
}

// The returned factor is admissible and the next order statistic down is not.
TEST(DeltaEpsilon, InfimumAtEmpiricalResolution) {
  const auto s = lognormal_sample(20000, 5, 1.0);
  const double kappa = 0.001;
  std::vector<double> x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) x[i] = (1.0 - kappa) * std::min(s[i], 1.0);
  std::sort(x.begin(), x.end());
  for (const double e : {0.001, 0.0123, 0.05, 0.25}) {
    const double d = hl::delta_epsilon(s, e, kappa, 1.0, 1.0);
    EXPECT_GE(hl::upsilon(d, s, kappa, 1.0, 1.0), 1.0 - e);
    const auto k = static_cast<std::size_t>(std::floor(e * s.size() + 1e-9));
    EXPECT_DOUBLE_EQ(d, 1.0 - x[k - 1]);
    const double below = 1.0 - x[k] - 1e-12;
    EXPECT_LT(hl::upsilon(below, s, kappa, 1.0, 1.0), 1.0 - e);
    EXPECT_LT(hl::upsilon(d - 2.0 / s.size(), s, kappa, 1.0, 1.0), 1.0 - e + 1.0 / s.size());
  }
}

TEST(Surface, Columns) {
  const auto s = lognormal_sample(10000, 6, 1.3);
  const std::vector<double> eps{0.001, 0.01, 0.1};
  const std::vector<double> r{0.0, 0.05, 0.1};
  const auto sf = hl::reduction_surface(eps, r, s, 0.001, 1.0, 1.0, 0.7);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double red = 1.0 - hl::delta_epsilon(s, eps[i], 0.001, 1.0, 1.0);
    EXPECT_EQ(sf.value[i][0], red);
    EXPECT_EQ(sf.reduction[i], red);
    EXPECT_NEAR(sf.price_reduction[i], 0.7 * red, 1e-15);
    for (std::size_t j = 1; j < r.size(); ++j) {
      EXPECT_NEAR(sf.value[i][j] / sf.value[i][j - 1], std::pow(eps[i], -(r[j] - r[j - 1])), 1e-13);
    }
  }
  std::ostringstream os;
  hl::write_surface_csv(os, sf);
  const std::string out = os.str();
  EXPECT_EQ(out.substr(0, out.find('\n')), "epsilon,r,value");
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 10);
}

TEST(DeltaEpsilon, Reproducible) {
  const auto a = lognormal_sample(5000, 9, 1.0);
  const auto b = lognormal_sample(5000, 9, 1.0);
  EXPECT_EQ(hl::delta_epsilon(a, 0.01, 0.001, 1.0, 1.0), hl::delta_epsilon(b, 0.01, 0.001, 1.0, 1.0));
}
