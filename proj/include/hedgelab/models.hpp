#pragma once

// Stochastic-volatility market models
//   dS = sigma(y) S dW1,   dy = F1(t, y) dt + F2(t, y) (r dW1 + sqrt(1 - r^2) dW2)
// and their path simulation on the fine grid of a revision schedule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hedgelab/errors.hpp"
#include "hedgelab/schedule.hpp"

namespace hedgelab {

enum class ModelKind { HullWhite, UniformElliptic, SteinStein, Heston, Scott, ConstantVol, Custom };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::HullWhite: return "hull_white";
    case ModelKind::UniformElliptic: return "uniform_elliptic";
    case ModelKind::SteinStein: return "stein_stein";
    case ModelKind::Heston: return "heston";
    case ModelKind::Scott: return "scott";
    case ModelKind::ConstantVol: return "constant_vol";
    case ModelKind::Custom: return "custom";
  }
  return "unknown";
}

/// Catalog parameters; each model reads the subset it needs.
struct ModelParams {
  double sigma_min = 0.0;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;   // Scott exponent
  double sigma0 = 0.0;  // ConstantVol level
  double corr = 0.0;
  double s0 = 1.0;
  double y0 = 0.0;
};

struct CustomDynamics {
  std::function<double(double)> sigma;
  std::function<double(double, double)> drift;      // F1(t, y)
  std::function<double(double, double)> diffusion;  // F2(t, y)
  double sigma_lower_bound = 0.0;
};

class MarketModel {
 public:
  MarketModel(ModelKind kind, ModelParams p, CustomDynamics custom = {})
      : kind_(kind), p_(p), custom_(std::move(custom)) {}

  [[nodiscard]] ModelKind kind() const { return kind_; }
  [[nodiscard]] const ModelParams& params() const { return p_; }
  [[nodiscard]] double corr() const { return p_.corr; }
  [[nodiscard]] double s0() const { return p_.s0; }
  [[nodiscard]] double y0() const { return p_.y0; }

  [[nodiscard]] double sigma(double y) const {
    switch (kind_) {
      case ModelKind::HullWhite: return y + p_.sigma_min;
      case ModelKind::UniformElliptic: return y * y + p_.sigma_min;
      case ModelKind::SteinStein: return std::sqrt(y * y + p_.sigma_min);
      case ModelKind::Heston: return std::sqrt((y > 0.0 ? y : 0.0) + p_.sigma_min);
      case ModelKind::Scott: return std::exp(p_.delta * y) + p_.sigma_min;
      case ModelKind::ConstantVol: return p_.sigma0;
      case ModelKind::Custom: return custom_.sigma(y);
    }
    return 0.0;
  }

  [[nodiscard]] double drift(double t, double y) const {
    switch (kind_) {
      case ModelKind::HullWhite: return p_.a * y;
      case ModelKind::UniformElliptic:
      case ModelKind::SteinStein:
      case ModelKind::Scott: return p_.a - p_.b * y;
      case ModelKind::Heston: return p_.a - p_.b * (y > 0.0 ? y : 0.0);
      case ModelKind::ConstantVol: return 0.0;
      case ModelKind::Custom: return custom_.drift ? custom_.drift(t, y) : 0.0;
    }
    return 0.0;
  }

  [[nodiscard]] double diffusion(double t, double y) const {
    switch (kind_) {
      case ModelKind::HullWhite: return p_.b * y;
      case ModelKind::UniformElliptic:
      case ModelKind::SteinStein:
      case ModelKind::Scott: return 1.0;
      case ModelKind::Heston: return std::sqrt(y > 0.0 ? y : 0.0);
      case ModelKind::ConstantVol: return 0.0;
      case ModelKind::Custom: return custom_.diffusion ? custom_.diffusion(t, y) : 0.0;
    }
    return 0.0;
  }

  /// Lower bound of sigma for models satisfying the uniform-ellipticity condition.
  [[nodiscard]] double sigma_lower_bound() const {
    switch (kind_) {
      case ModelKind::HullWhite:  // holds while y stays positive, which GBM preserves
      case ModelKind::UniformElliptic:
      case ModelKind::Scott: return p_.sigma_min;
      case ModelKind::SteinStein:
      case ModelKind::Heston: return std::sqrt(p_.sigma_min);
      case ModelKind::ConstantVol: return p_.sigma0;
      case ModelKind::Custom: return custom_.sigma_lower_bound;
    }
    return 0.0;
  }

 private:
  ModelKind kind_;
  ModelParams p_;
  CustomDynamics custom_;
};

/// Builds a catalog model, validating its parameter domain.
inline MarketModel make_model(ModelKind kind, const ModelParams& p, CustomDynamics custom = {}) {
  if (!(p.s0 > 0.0)) throw ParameterError("S0 must be positive");
  if (!(p.corr >= -1.0 && p.corr <= 1.0)) throw ParameterError("correlation must lie in [-1, 1]");
  switch (kind) {
    case ModelKind::ConstantVol:
      if (!(p.sigma0 > 0.0)) throw ParameterError("constant volatility sigma0 must be positive");
      break;
    case ModelKind::HullWhite:
      if (!(p.sigma_min > 0.0)) throw ParameterError("sigma_min must be positive");
      if (!(p.y0 > 0.0)) throw ParameterError("Hull-White factor needs y0 > 0");
      break;
    case ModelKind::UniformElliptic:
    case ModelKind::SteinStein:
    case ModelKind::Scott:
      if (!(p.sigma_min > 0.0)) throw ParameterError("sigma_min must be positive");
      if (!(p.b > 0.0)) throw ParameterError("mean reversion b must be positive");
      if (kind == ModelKind::Scott && !(p.delta >= 0.0)) throw ParameterError("Scott delta must be >= 0");
      break;
    case ModelKind::Heston:
      if (!(p.sigma_min > 0.0)) throw ParameterError("sigma_min must be positive");
      if (!(p.b > 0.0)) throw ParameterError("mean reversion b must be positive");
      if (!(p.y0 >= 0.0)) throw ParameterError("Heston factor needs y0 >= 0");
      break;
    case ModelKind::Custom:
      if (!custom.sigma) throw ParameterError("custom model needs a sigma map");
      break;
  }
  return MarketModel(kind, p, std::move(custom));
}

/// sigma(y) = sin^2(y) + sigma_min with a geometric Brownian factor
/// dy = y (a dt + b dZ); the bounded-volatility example used for quantile pricing.
inline MarketModel make_sin_squared_gbm(const ModelParams& p) {
  CustomDynamics c;
  const double smin = p.sigma_min;
  const double a = p.a;
  const double b = p.b;
  c.sigma = [smin](double y) {
    const double s = std::sin(y);
    return s * s + smin;
  };
  c.drift = [a](double, double y) { return a * y; };
  c.diffusion = [b](double, double y) { return b * y; };
  c.sigma_lower_bound = smin;
  return make_model(ModelKind::Custom, p, std::move(c));
}

// ---------------------------------------------------------------------------
// Random streams

/// SplitMix64 finaliser; a stateless mix of (seed, path index).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

inline std::uint64_t path_stream_seed(std::uint64_t master_seed, std::uint64_t path_index) {
  return mix64(mix64(master_seed) ^ mix64(path_index + 0x632BE59BD9B4E019ULL));
}

/// Standard normal generator owned by one path.
class PathRng {
 public:
  PathRng(std::uint64_t master_seed, std::uint64_t path_index)
      : engine_(path_stream_seed(master_seed, path_index)) {}
  double normal() { return dist_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

struct PathBundle {
  std::uint64_t seed = 0;
  std::size_t path_index = 0;
  std::vector<double> s;  // aligned with the fine grid
  std::vector<double> y;
};

/// One path on the given fine grid. Per substep: xi1 then xi2; log-price step
/// with sigma(y) frozen over the substep; Euler step for y (truncated at zero
/// for Heston).
inline void simulate_path_into(const MarketModel& model, const std::vector<double>& fine,
                               std::uint64_t seed, std::size_t path_index, PathBundle& out) {
  const std::size_t m = fine.size();
  out.seed = seed;
  out.path_index = path_index;
  out.s.resize(m);
  out.y.resize(m);
  PathRng rng(seed, path_index);
  const double r = model.corr();
  const double rc = std::sqrt(1.0 - r * r);
  const bool heston = model.kind() == ModelKind::Heston;
  double log_s = std::log(model.s0());
  double y = model.y0();
  out.s[0] = model.s0();
  out.y[0] = y;
  for (std::size_t k = 1; k < m; ++k) {
    const double t = fine[k - 1];
    const double dt = fine[k] - t;
    const double sq = std::sqrt(dt);
    const double xi1 = rng.normal();
    const double xi2 = rng.normal();
    const double sig = model.sigma(y);
    const double f1 = model.drift(t, y);
    const double f2 = model.diffusion(t, y);
    log_s += -0.5 * sig * sig * dt + sig * sq * xi1;
    y += f1 * dt + f2 * sq * (r * xi1 + rc * xi2);
    if (heston && y < 0.0) y = 0.0;
    out.s[k] = std::exp(log_s);
    out.y[k] = y;
  }
}

inline PathBundle simulate_path(const MarketModel& model, const RevisionSchedule& schedule,
                                std::uint64_t seed, std::size_t path_index) {
  PathBundle b;
  simulate_path_into(model, schedule.fine_times(), seed, path_index, b);
  return b;
}

/// Streams N paths to `visit(const PathBundle&)`. Paths are split into
/// contiguous index blocks, one per worker; the visitor must be safe to call
/// concurrently for distinct path indices.
template <class Visitor>
void simulate_paths(const MarketModel& model, const RevisionSchedule& schedule, std::size_t n_paths,
                    std::uint64_t seed, Visitor&& visit, unsigned threads = 1) {
  if (n_paths == 0) throw ParameterError("path count must be >= 1");
  const std::vector<double> fine = schedule.fine_times();
  const auto worker = [&](std::size_t begin, std::size_t end) {
    PathBundle b;
    for (std::size_t i = begin; i < end; ++i) {
      simulate_path_into(model, fine, seed, i, b);
      visit(static_cast<const PathBundle&>(b));
    }
  };
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(threads, n_paths));
  if (w == 1) {
    worker(0, n_paths);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
      pool.emplace_back([&, k] {
        try {
          worker(n_paths * k / w, n_paths * (k + 1) / w);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::vector<double> sigma_path(const MarketModel& model, const PathBundle& path) {
  std::vector<double> out(path.y.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = model.sigma(path.y[k]);
  return out;
}

}  // namespace hedgelab
