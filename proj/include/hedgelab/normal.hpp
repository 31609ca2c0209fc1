#pragma once

#include <cmath>
#include <numbers>

namespace hedgelab {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)
inline constexpr double kSqrt8OverPi = 1.59576912160573071175978423973;   // sqrt(8/pi)

/// Standard normal density.
inline double normal_pdf(double z) noexcept {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

/// Standard normal distribution function, via erfc so both tails keep full
/// relative precision.
inline double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace hedgelab
