#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "shetorque/motor_model.hpp"

namespace shetorque {

/// One torque harmonic A cos(order omega_s t + phase).
struct TorquePhasor {
  int order = 6;
  double amplitude = 0.0;
  double phase = 0.0;  // (-pi, pi]

  [[nodiscard]] Complex as_complex() const { return std::polar(amplitude, phase); }
  static TorquePhasor from_complex(int order, Complex value);
};

enum class Method { she_pwm, classic, ratio_i, ratio_ii };

std::string_view to_string(Method method) noexcept;
/// Accepts "SHE_PWM", "CLASSIC", "RATIO_I", "RATIO_II" (case-insensitive).
Method method_from_string(std::string_view text);

struct PhasorSum {
  double amplitude;
  double phase;
};

/// B1 cos(x + dtheta) + B2 cos(x + pi).
PhasorSum phasor_sum(double b1, double b2, double delta_theta);

/// cos(dtheta) that minimises phasor_sum for the given amplitudes.
double min_ratio(double b1, double b2);

/// Phase difference theta_{6k-1} - theta_{6k+1} of the two torque components,
/// 2 phi_1 + phi_{6k-1} - phi_{6k+1}, wrapped to (-pi, pi].
double delta_theta_estimate(double phi_1, double phi_minus, double phi_plus);

/// Estimated A_{6k-1} / A_{6k+1}.
double torque_amplitude_ratio(double v_minus, double v_plus, double s_minus, double s_plus);

/// RATIO_I: target V_{6k-1}/V_{6k+1}; RATIO_II: target V_{6k+1}/V_{6k-1}.
double target_voltage_ratio(Method variant, double s_minus, double s_plus, double delta_theta);

/// Torque harmonic produced by two harmonic solutions whose rotating fields
/// differ in electrical speed by a positive multiple of 6 omega_s. The
/// resulting order is that difference divided by omega_s.
TorquePhasor interaction_torque(const HarmonicSolution& a, const HarmonicSolution& b,
                                const MotorParameters& params);

/// A_{6k+-1}, theta_{6k+-1}: the torque component from the fundamental
/// interacting with one (6k+-1) harmonic (air-gap flux of each times rotor
/// current of the other).
TorquePhasor torque_component_phasors(const HarmonicSolution& fund, const HarmonicSolution& harm,
                                      const MotorParameters& params);

/// Phasor sum of same-order components.
TorquePhasor combine_torque(std::span<const TorquePhasor> components);

/// Flux-free estimate (3 R_r / 2 omega_s)((1-s1)/s1) I_r1 (I_r+ - I_r-),
/// signed. Throws Error(singular_slip) for s1 < 1e-6.
double torque_estimate_simplified(double i_r1, double i_r_minus, double i_r_plus, double s1,
                                  double omega_s, double r_r);

/// Flux-free component of a single (6k+-1) harmonic, as a phasor of order 6k:
/// the sin(6k omega_s t) term with sign - for the 6k-1 branch and + for 6k+1.
TorquePhasor flux_free_component(int k, Sequence sequence, double i_r1, double i_r_h, double s1,
                                 double omega_s, double r_r);

/// Which slip definition the ratio estimator feeds into the phase and
/// amplitude estimates.
///   as_printed:      s_{6k+-1} = ((6k+-1) w_s +- p w_m) / ((6k+-1) w_s)
///   field_direction: harmonic_slip(), i.e. backward field for 6k-1
enum class SlipConvention { as_printed, field_direction };

std::string_view to_string(SlipConvention convention) noexcept;
SlipConvention slip_convention_from_string(std::string_view text);

double estimator_slip(int k, Sequence sequence, double s1, SlipConvention convention);

/// Intermediate values of the on-line ratio estimator at one operating point.
struct RatioEstimate {
  double s_minus;
  double s_plus;
  double phi_1;
  double phi_minus;
  double phi_plus;
  double delta_theta;
  double ratio;  // as defined by target_voltage_ratio for the variant
};

/// Slips, phases, phase difference and target voltage ratio for RATIO_I /
/// RATIO_II at fundamental slip s1 (k = 1). Propagates
/// Error(no_minimizing_ratio) when cos(dtheta) < 0.
RatioEstimate estimate_ratio_target(Method variant, double s1, const MotorParameters& params,
                                    double omega_s, SlipConvention convention = SlipConvention::as_printed);

/// Signed phase-voltage harmonic: v(t) contains amplitude * sin(order omega_s t).
struct VoltageHarmonic {
  int order;
  double amplitude;
};

enum class InteractionSet {
  fundamental_only,  // only the fundamental x (6k+-1) components
  all_pairs,         // every pair of supplied orders whose fields differ by the torque order
};

/// Steady-state torque harmonic of the requested order for a balanced
/// voltage spectrum at constant rotor speed. Each order is solved on the
/// equivalent circuit at its own slip; s1 is floored at 1e-6.
TorquePhasor predict_torque_harmonic(const MotorParameters& params, std::span<const VoltageHarmonic> voltages,
                                     double s1, double omega_s, int torque_order = 6,
                                     InteractionSet set = InteractionSet::all_pairs);

}  // namespace shetorque
