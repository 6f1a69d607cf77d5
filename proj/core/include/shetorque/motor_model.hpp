#pragma once

#include "shetorque/math.hpp"

namespace shetorque {

/// Slips below this are rejected by circuit solves; the rotor branch
/// resistance R_r/s diverges as s -> 0.
inline constexpr double kSlipEpsilon = 1e-6;

/// Equivalent-circuit and mechanical constants of a three-phase induction
/// motor, SI units. Inductances are leakage values; self inductances are
/// derived.
struct MotorParameters {
  double r_s = 0.0;
  double r_r = 0.0;
  double l_ls = 0.0;
  double l_lr = 0.0;
  double l_m = 0.0;
  int pole_pairs = 0;
  double inertia = 0.0;

  [[nodiscard]] double l_s_self() const noexcept { return l_m + l_ls; }
  [[nodiscard]] double l_r_self() const noexcept { return l_m + l_lr; }

  /// Throws Error(invalid_input) when any invariant is violated.
  void validate() const;

  /// 3 kW, 380 V, 1415 rpm squirrel-cage reference machine.
  static MotorParameters reference_3kw();
};

enum class Sequence { minus, plus };

/// Steady-state operating point. Construction enforces the motoring range
/// 0 <= s1 <= 1.
class OperatingPoint {
 public:
  OperatingPoint(double omega_s, double omega_m, int pole_pairs);

  [[nodiscard]] double omega_s() const noexcept { return omega_s_; }
  [[nodiscard]] double omega_m() const noexcept { return omega_m_; }
  [[nodiscard]] double slip() const noexcept { return s1_; }

 private:
  double omega_s_;
  double omega_m_;
  double s1_;
};

double fundamental_slip(double omega_s, double omega_m, int pole_pairs);

/// Slip of the field produced by the (6k-1) (sequence minus, rotating
/// backward) or (6k+1) (sequence plus) voltage harmonic.
double harmonic_slip(int k, Sequence sequence, double s1);

/// Order 6k-1 or 6k+1.
int harmonic_order(int k, Sequence sequence);

/// Sequence of an odd non-triplen order: 1, 7, 13, ... are plus; 5, 11, ...
/// are minus. Throws Error(unsupported_order) otherwise.
Sequence sequence_of(int order);

/// Physical slip seen by the field of any non-triplen odd order (order 1
/// returns s1 itself).
double slip_for_order(int order, double s1);

/// Closed-form rotor-current phase lag for order n, using the reflected
/// stator resistance (L_m/(L_m+L_ls))^2 R_s. Defined for slip >= 0; the
/// s -> 0 limit is 0.
double rotor_phase(int order, double slip, const MotorParameters& params, double omega_s);

/// Steady-state solve of the single-phase equivalent circuit at one order.
/// Phasors are peak-amplitude, cosine-referenced, at electrical frequency
/// order * omega_s.
struct HarmonicSolution {
  int order = 1;
  double slip = 1.0;
  double omega = 0.0;  // electrical angular frequency of this order (rad/s)

  /// Rotor current with the closed-form phase: |I_r| at angle
  /// arg(voltage) - phi.
  Complex rotor_current;
  /// |E_m| / omega (Wb).
  double magnetizing_flux = 0.0;
  /// Closed-form rotor-current phase lag (rad), in (0, pi/2).
  double phi = 0.0;
  /// Input impedance of the full circuit.
  Complex impedance;

  // Full-circuit phasors.
  Complex voltage;
  Complex stator_current;
  Complex airgap_emf;
  Complex rotor_current_circuit;

  /// Air-gap flux linkage phasor E_m / (j omega).
  [[nodiscard]] Complex airgap_flux() const { return airgap_emf / Complex(0.0, omega); }

  /// Same solution with every phasor advanced by `angle`.
  [[nodiscard]] HarmonicSolution rotated(double angle) const;
};

HarmonicSolution harmonic_circuit_solve(int order, double v_n, double slip_n,
                                        const MotorParameters& params, double omega_s);

/// Solves for the phase-voltage term v(t) = v_n sin(order omega_s t), with
/// v_n signed as produced by the inverter Fourier series.
HarmonicSolution solve_sine_harmonic(int order, double v_n, double slip_n,
                                     const MotorParameters& params, double omega_s);

/// Average torque contributed by one order (N m): (3/2) p |I_r|^2 R_r / (s omega),
/// negative for backward-rotating fields.
double average_torque(const HarmonicSolution& solution, const MotorParameters& params);

/// Fundamental-only electromagnetic torque at slip s1 for a phase-voltage
/// peak amplitude v1. Defined for s1 >= 0 (zero at synchronous speed).
double fundamental_torque(double v1, double s1, const MotorParameters& params, double omega_s);

/// Slip of maximum fundamental torque.
double breakdown_slip(const MotorParameters& params, double omega_s);

/// Mechanical speed (rad/s) for a fundamental slip.
inline double rotor_speed(double s1, double omega_s, int pole_pairs) noexcept {
  return (1.0 - s1) * omega_s / pole_pairs;
}

}  // namespace shetorque
