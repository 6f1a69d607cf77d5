#pragma once

#include "shetorque/motor_model.hpp"

namespace shetorque {

enum class LoadKind { no_load, linear };

/// Mechanical load law. A linear load opposes the rotor with
/// coefficient * omega_m; no_load is exactly zero torque and zero friction.
struct LoadSpec {
  LoadKind kind = LoadKind::no_load;
  double coefficient = 0.0;  // N m s / rad, linear only

  static LoadSpec none() { return {}; }
  static LoadSpec linear(double coefficient);

  /// Coefficient that puts nameplate torque (power / speed) at nameplate speed.
  static LoadSpec rated_linear(double rated_power_w, double rated_speed_rpm);

  [[nodiscard]] double torque(double omega_m) const noexcept {
    return kind == LoadKind::linear ? coefficient * omega_m : 0.0;
  }

  void validate() const;
};

inline constexpr double kRatedPowerW = 3000.0;
inline constexpr double kRatedSpeedRpm = 1415.0;

/// Stable steady-state fundamental slip for a load law, by torque balance on
/// the fundamental equivalent circuit. Returns 0 for no_load. Throws
/// Error(unstable_region) when the load line does not cross the torque-slip
/// curve between synchronous speed and breakdown.
double equilibrium_slip(const MotorParameters& params, double v1, double omega_s, const LoadSpec& load);

/// Stable slip delivering a constant shaft torque; same error contract.
double slip_for_torque(const MotorParameters& params, double v1, double omega_s, double torque);

}  // namespace shetorque
