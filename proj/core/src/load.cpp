#include "shetorque/load.hpp"

#include <functional>

#include "shetorque/errors.hpp"

namespace shetorque {
namespace {

// Root of f on [0, s_breakdown] where f(0) <= 0 and f is expected to rise.
double bisect_slip(const std::function<double(double)>& f, double s_breakdown) {
  double lo = 0.0;
  double hi = s_breakdown;
  if (f(hi) < 0.0) {
    throw Error(Errc::unstable_region, "load exceeds breakdown torque");
  }
  if (f(lo) >= 0.0) return 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LoadSpec LoadSpec::linear(double coefficient) {
  LoadSpec spec{LoadKind::linear, coefficient};
  spec.validate();
  return spec;
}

LoadSpec LoadSpec::rated_linear(double rated_power_w, double rated_speed_rpm) {
  const double omega = rated_speed_rpm * kTwoPi / 60.0;
  return linear(rated_power_w / omega / omega);
}

void LoadSpec::validate() const {
  if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
    throw Error(Errc::invalid_input, "load coefficient must be non-negative");
  }
}

double equilibrium_slip(const MotorParameters& params, double v1, double omega_s, const LoadSpec& load) {
  load.validate();
  if (load.kind == LoadKind::no_load) return 0.0;
  const double s_bd = breakdown_slip(params, omega_s);
  return bisect_slip(
      [&](double s) {
        return fundamental_torque(v1, s, params, omega_s) -
               load.torque(rotor_speed(s, omega_s, params.pole_pairs));
      },
      s_bd);
}

double slip_for_torque(const MotorParameters& params, double v1, double omega_s, double torque) {
  if (!(torque >= 0.0)) throw Error(Errc::invalid_input, "load torque must be non-negative");
  if (torque == 0.0) return 0.0;
  const double s_bd = breakdown_slip(params, omega_s);
  return bisect_slip([&](double s) { return fundamental_torque(v1, s, params, omega_s) - torque; }, s_bd);
}

}  // namespace shetorque
