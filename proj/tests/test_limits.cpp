#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/limits.hpp"

namespace hl = hedgelab;

namespace {

// Reference formulas written out directly, without the library kernels.
double ref_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double ref_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double ref_abs_mean(double a, double b) {
  if (a == 0.0) return std::abs(b);
  const double c = b / a;
  return a * (2.0 * ref_pdf(c) + c * (2.0 * ref_cdf(c) - 1.0));
}

enum class Kind { JStar, J, J0 };

// Midpoint sum in u = sqrt(lambda) on (0, 30] with 10^6 cells.
double riemann(Kind kind, double x, double sigma, double rho, double strike) {
  const std::size_t cells = 1000000;
  const double u_max = 30.0;
  const double h = u_max / static_cast<double>(cells);
  const double l = std::log(x / strike);
  double sum = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double u = (static_cast<double>(i) + 0.5) * h;
    const double lam = u * u;
    const double v = l / u + 0.5 * u;
    const double ph = ref_pdf(v);
    const double q = l / (2.0 * lam) - 0.25;
    const double inner = kind == Kind::JStar ? std::abs(q) : ref_abs_mean(sigma / rho, q);
    sum += 2.0 * ph * inner;  // lambda^{-1/2} d lambda = 2 du
  }
  sum *= h;
  return kind == Kind::J0 ? sum : x * sum;
}

}  // namespace

TEST(GFunc, ValuesAndSymmetry) {
  EXPECT_NEAR(hl::g_func(0.0), std::sqrt(2.0 / M_PI), 1e-16);
  EXPECT_NEAR(hl::g_func(0.0), 0.7978845608028654, 1e-15);
  for (const double a : {0.1, 0.9, 2.5, 7.0}) EXPECT_DOUBLE_EQ(hl::g_func(-a), hl::g_func(a));
  EXPECT_NEAR(hl::g_func(10.0), 10.0, 1e-20 + 1e-15 * 10.0);
  EXPECT_NEAR(hl::g_func(10.0) - 10.0, 0.0, 1e-20);
}

TEST(GFunc, Bounds) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng);
    const double g = hl::g_func(a);
    EXPECT_GE(g, std::abs(a));
    EXPECT_LE(g, std::abs(a) + 2.0 * ref_pdf(a) + 1e-15);
  }
}

TEST(LambdaFunc, ValuesAndBounds) {
  EXPECT_NEAR(hl::lambda_func(0.0), 1.0 - 2.0 / M_PI, 1e-15);
  EXPECT_NEAR(hl::lambda_func(0.0), 0.36338022763241865, 1e-15);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng);
    const double v = hl::lambda_func(a);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_LE(std::abs(v - 1.0), 4.0 * std::abs(a) * ref_pdf(a) + 4.0 * ref_pdf(a) * ref_pdf(a) + 1e-14);
  }
}

TEST(LambdaFunc, SamplingOracle) {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> nd;
  const std::size_t n = 1000000;
  std::vector<double> z(n);
  for (auto& v : z) v = nd(rng);
  for (const double a : {0.0, 0.5, 2.0}) {
    double m = 0.0;
    for (const double v : z) m += std::abs(v + a);
    m /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (const double v : z) {
      const double d = std::abs(v + a) - m;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    m2 /= (n - 1.0);
    m4 /= n;
    const double se = std::sqrt((m4 - m2 * m2) / n);
    EXPECT_NEAR(m2, hl::lambda_func(a), 3.0 * se) << "a=" << a;
  }
}

TEST(ExpectedAbsLinear, Values) {
  EXPECT_NEAR(hl::expected_abs_linear(1.0, 0.0), std::sqrt(2.0 / M_PI), 1e-16);
  EXPECT_EQ(hl::expected_abs_linear(0.0, -3.0), 3.0);
  EXPECT_NEAR(hl::expected_abs_linear(0.7, -1.3), 0.7 * hl::g_func(-1.3 / 0.7), 1e-15);
  EXPECT_THROW(hl::expected_abs_linear(-0.1, 1.0), hl::ParameterError);
}

TEST(ExpectedAbsLinear, SamplingOracle) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  const std::size_t n = 1000000;
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::abs(0.5 * nd(rng) + 1.0);
    s += v;
    s2 += v * v;
  }
  const double m = s / n;
  const double se = std::sqrt((s2 / n - m * m) / (n - 1.0));
  EXPECT_NEAR(m, hl::expected_abs_linear(0.5, 1.0), 3.0 * se);
}

TEST(MinIdentity, Examples) {
  EXPECT_LE(std::abs(hl::min_identity_residual(1.0, 1.0)), 1e-8);
  EXPECT_LE(std::abs(hl::min_identity_residual(2.0, 1.0)), 1e-8);
  EXPECT_LE(std::abs(hl::min_identity_residual(0.3, 1.0)), 1e-8);
}

TEST(MinIdentity, Grid) {
  for (int i = 0; i < 20; ++i) {
    const double x = 0.2 + 4.8 * i / 19.0;
    EXPECT_LE(std::abs(hl::min_identity_residual(x, 1.0)), 1e-8) << "x=" << x;
  }
  for (const double x : {0.999, 0.99999, 1.00001, 1.001}) {
    EXPECT_LE(std::abs(hl::min_identity_residual(x, 1.0)), 1e-8) << "x=" << x;
  }
}

TEST(MinIdentity, WithoutSubstitution) {
  hl::QuadratureConfig cfg;
  cfg.substitute = false;
  for (const double x : {0.5, 1.0, 2.0}) EXPECT_LE(std::abs(hl::min_identity_residual(x, 1.0, cfg)), 1e-7) << x;
}

TEST(Functionals, RiemannOracle) {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> lx(-1.2, 1.2);
  std::uniform_real_distribution<double> us(0.5, 5.0);
  std::uniform_real_distribution<double> ur(0.5, 8.0);
  for (int k = 0; k < 10; ++k) {
    double l = lx(rng);
    if (std::abs(l) < 0.05) l = l < 0 ? -0.05 : 0.05;
    const double x = std::exp(l);
    const double sigma = us(rng);
    const double rho = ur(rng);
    const double js = hl::j_star(x, 1.0);
    const double j = hl::j_limit(x, sigma, rho, 1.0);
    const double j0 = hl::j_zero(x, sigma, rho, 1.0);
    EXPECT_NEAR(js / riemann(Kind::JStar, x, sigma, rho, 1.0), 1.0, 1e-6) << "x=" << x;
    EXPECT_NEAR(j / riemann(Kind::J, x, sigma, rho, 1.0), 1.0, 1e-6) << "x=" << x << " s=" << sigma << " r=" << rho;
    EXPECT_NEAR(j0 / riemann(Kind::J0, x, sigma, rho, 1.0), 1.0, 1e-6) << "x=" << x;
  }
  EXPECT_NEAR(hl::j_star(1.0, 1.0) / riemann(Kind::JStar, 1.0, 1.0, 1.0, 1.0), 1.0, 1e-6);
  EXPECT_NEAR(hl::j_star(1.0, 1.0), 0.5, 1e-9);
}

TEST(Functionals, InnerExpectationSampling) {
  // J with G replaced by a sample mean over common draws; per-draw integrals
  // give the standard error.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const std::size_t draws = 100000;
  const std::size_t cells = 2000;
  const double u_max = 20.0;
  const double h = u_max / cells;
  for (const double x : {1.0, 1.4}) {
    const double sigma = 2.0;
    const double rho = 2.0;
    const double a = sigma / rho;
    std::vector<double> w(cells);
    std::vector<double> q(cells);
    const double l = std::log(x);
    double quad_ref = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      const double u = (i + 0.5) * h;
      w[i] = 2.0 * h * x * ref_pdf(l / u + 0.5 * u);
      q[i] = l / (2.0 * u * u) - 0.25;
      quad_ref += w[i] * ref_abs_mean(a, q[i]);
    }
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
      const double z = nd(rng);
      double f = 0.0;
      for (std::size_t i = 0; i < cells; ++i) f += w[i] * std::abs(a * z + q[i]);
      s += f;
      s2 += f * f;
    }
    const double m = s / draws;
    const double se = std::sqrt((s2 / draws - m * m) / (draws - 1.0));
    EXPECT_NEAR(m, quad_ref, 3.0 * se) << "x=" << x;
    if (x != 1.0) {
      EXPECT_NEAR(quad_ref / hl::j_limit(x, sigma, rho, 1.0), 1.0, 1e-3);
    }
  }
  EXPECT_NEAR(hl::j_limit(1.0, 2.0, 2.0, 1.0), 2.0 * hl::g_func(0.25), 1e-8);
}

TEST(Functionals, RhoToInfinity) {
  for (const double x : {0.5, 1.0, 2.0}) {
    const double js = hl::j_star(x, 1.0);
    for (const double sigma : {0.5, 4.0}) {
      EXPECT_LE(std::abs(hl::j_limit(x, sigma, 1e4, 1.0) - js) / js, 1e-3) << x;
      EXPECT_LE(std::abs(hl::j_zero(x, sigma, 1e4, 1.0) - js / x) / (js / x), 1e-3) << x;
    }
  }
}

TEST(Functionals, MonotoneInRho) {
  for (const double x : {0.4, 0.9, 1.0, 1.3, 3.0}) {
    double prev = hl::j_limit(x, 2.0, 0.25, 1.0);
    for (const double rho : {0.5, 1.0, 2.0, 8.0, 64.0}) {
      const double j = hl::j_limit(x, 2.0, rho, 1.0);
      EXPECT_LE(j, prev * (1.0 + 1e-9)) << x << " " << rho;
      prev = j;
    }
    EXPECT_GE(prev, hl::j_star(x, 1.0) * (1.0 - 1e-9));
  }
}

TEST(Functionals, JStarBelowMin) {
  for (int i = 0; i < 30; ++i) {
    const double x = 0.05 + 0.2 * i;
    EXPECT_LE(hl::j_star(x, 1.0), std::min(x, 1.0) * (1.0 + 1e-9)) << x;
  }
  // below the strike q < 0 throughout, so the integral telescopes to J*(x) = x
  EXPECT_NEAR(hl::j_star(1e-4, 1.0), 1e-4, 1e-12);
  EXPECT_NEAR(hl::j_star(0.7, 1.0), 0.7, 1e-9);
  EXPECT_LT(hl::j_star(2.0, 1.0), 1.0);
}

TEST(Functionals, ZeroIsJOverX) {
  for (const double x : {0.3, 1.0, 2.2}) {
    EXPECT_NEAR(hl::j_zero(x, 1.5, 3.0, 1.0) * x, hl::j_limit(x, 1.5, 3.0, 1.0), 1e-14 * x);
  }
}

TEST(Functionals, UnderHedgingInequality) {
  const double sigma0 = 0.3;
  for (const double kappa : {0.01, 0.05}) {
    const double rho = kappa * sigma0 * hl::kSqrt8OverPi;
    for (const double x : {0.5, 0.9, 1.0, 1.1, 2.0}) {
      EXPECT_GE(kappa * hl::j_limit(x, sigma0, rho, 1.0), std::min(x, 1.0) * (1.0 - 1e-9)) << x;
    }
  }
}

TEST(Functionals, DomainErrors) {
  EXPECT_THROW(hl::j_star(0.0, 1.0), hl::DomainError);
  EXPECT_THROW(hl::j_limit(1.0, 0.0, 1.0, 1.0), hl::DomainError);
  EXPECT_THROW(hl::j_zero(1.0, 1.0, -1.0, 1.0), hl::DomainError);
  hl::QuadratureConfig bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(hl::j_star(1.0, 1.0, bad), hl::ParameterError);
}

TEST(Eta, Values) {
  EXPECT_EQ(hl::eta(2.0, 3.0, 0.0), 1.0);
  const double s = 2.27;
  const double k = 0.01;
  EXPECT_NEAR(hl::eta(s, k * s * hl::kSqrt8OverPi, k), 0.0, 1e-15);
  EXPECT_NEAR(hl::eta(2.27, 2.0, 0.01), 1.0 - 0.01 * 2.27 * std::sqrt(8.0 / M_PI) / 2.0, 1e-15);
  EXPECT_NEAR(hl::eta(2.27, 2.0, 0.01), 0.98189, 5e-6);
  EXPECT_NEAR(hl::eta_zero(2.0, 4.0, 0.5), 2.0 / (4.0 * 0.5) * std::sqrt(8.0 / M_PI), 1e-15);
  EXPECT_NEAR(hl::eta_zero(2.0, 4.0, 0.5, 0.01), 0.01 * hl::eta_zero(2.0, 4.0, 0.5), 1e-15);
  EXPECT_THROW(hl::eta(1.0, 0.0, 0.1), hl::DomainError);
  EXPECT_THROW(hl::eta_zero(1.0, 1.0, 0.0), hl::DomainError);
}
