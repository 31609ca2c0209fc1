#pragma once

// Quantile pricing: the smallest price factor delta_eps such that the limiting
// hedge (1 - kappa) min(S_1, K) covers (1 - delta_eps) S_0 with probability at
// least 1 - eps, estimated on a sample of terminal prices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "hedgelab/errors.hpp"

namespace hedgelab {

struct QuantileConfig {
  double epsilon = 0.001;
  double kappa = 0.001;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 42;
};

inline void validate(const QuantileConfig& c) {
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(c.kappa >= 0.0 && c.kappa < 1.0)) throw ParameterError("kappa must lie in [0, 1)");
  if (c.n_paths < 1000) throw ParameterError("quantile pricing needs N >= 1000 terminal prices");
}

/// X = (1 - kappa) min(S_1, K), sorted ascending.
inline std::vector<double> covered_values(std::span<const double> s1, double kappa, double strike) {
  std::vector<double> x(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) x[i] = (1.0 - kappa) * std::min(s1[i], strike);
  std::sort(x.begin(), x.end());
  return x;
}

/// Empirical P((1 - kappa) min(S_1, K) > (1 - a) S_0).
inline double upsilon(double a, std::span<const double> s1, double kappa, double s0, double strike) {
  if (s1.empty()) throw ParameterError("upsilon needs a non-empty sample");
  const double level = (1.0 - a) * s0;
  std::size_t hits = 0;
  for (const double s : s1) {
    if ((1.0 - kappa) * std::min(s, strike) > level) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(s1.size());
}

/// delta_eps = 1 - X_(k) / S_0 with k = floor(eps N) on the sorted values X.
/// X_(k) is the largest order statistic that leaves at most eps N sample
/// points at or below the covered level, so Upsilon(delta_eps) >= 1 - eps on
/// samples without ties.
inline double delta_epsilon_sorted(std::span<const double> sorted_x, double epsilon, double s0) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(s0 > 0.0)) throw ParameterError("S0 must be positive");
  const auto n = static_cast<double>(sorted_x.size());
  const auto k = static_cast<std::size_t>(std::floor(epsilon * n + 1e-9));
  if (k < 1) throw ParameterError("epsilon * N < 1: the quantile is not resolvable on this sample");
  return 1.0 - sorted_x[k - 1] / s0;
}

inline double delta_epsilon(std::span<const double> s1, double epsilon, double kappa, double s0,
                            double strike) {
  const std::vector<double> x = covered_values(s1, kappa, strike);
  return delta_epsilon_sorted(x, epsilon, s0);
}

struct ReductionSurface {
  std::vector<double> epsilons;
  std::vector<double> rs;
  std::vector<double> reduction;           // 1 - delta_eps per epsilon
  std::vector<std::vector<double>> value;  // value[i][j] = (1 - delta_{eps_i}) eps_i^{-r_j}
  std::vector<double> price_reduction;     // (1 - delta_eps) * price per epsilon
};

inline ReductionSurface reduction_surface(std::span<const double> eps_grid, std::span<const double> r_grid,
                                          std::span<const double> s1, double kappa, double s0,
                                          double strike, double price) {
  const std::vector<double> x = covered_values(s1, kappa, strike);
  ReductionSurface out;
  out.epsilons.assign(eps_grid.begin(), eps_grid.end());
  out.rs.assign(r_grid.begin(), r_grid.end());
  for (const double e : eps_grid) {
    const double red = 1.0 - delta_epsilon_sorted(x, e, s0);
    out.reduction.push_back(red);
    out.price_reduction.push_back(red * price);
    std::vector<double> row;
    row.reserve(r_grid.size());
    for (const double r : r_grid) row.push_back(red * std::pow(e, -r));
    out.value.push_back(std::move(row));
  }
  return out;
}

/// CSV rows (epsilon, r, value) for external plotting.
inline void write_surface_csv(std::ostream& os, const ReductionSurface& s) {
  os << "epsilon,r,value\n";
  char buf[128];
  for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
    for (std::size_t j = 0; j < s.rs.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.10g\n", s.epsilons[i], s.rs[j], s.value[i][j]);
      os << buf;
    }
  }
}

/// CSV rows (epsilon, reduction_factor, price_reduction).
inline void write_price_reduction_csv(std::ostream& os, const ReductionSurface& s) {
  os << "epsilon,reduction_factor,price_reduction\n";
  char buf[128];
  for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g,%.10g,%.10g\n", s.epsilons[i], s.reduction[i],
                  s.price_reduction[i]);
    os << buf;
  }
}

}  // namespace hedgelab
