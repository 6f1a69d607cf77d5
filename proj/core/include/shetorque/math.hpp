#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace shetorque {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double angle) noexcept {
  double wrapped = std::remainder(angle, kTwoPi);
  if (wrapped <= -kPi) wrapped += kTwoPi;
  return wrapped;
}

inline constexpr double deg(double rad) noexcept { return rad * 180.0 / kPi; }
inline constexpr double rad(double deg) noexcept { return deg * kPi / 180.0; }

}  // namespace shetorque
