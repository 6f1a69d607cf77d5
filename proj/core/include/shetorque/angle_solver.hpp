#pragma once

#include <array>
#include <span>
#include <vector>

#include "shetorque/torque_phasors.hpp"

namespace shetorque {

inline constexpr double kDefaultVdc = 560.0;

/// Quarter-wave symmetric two-level pole waveform. Over [0, pi/2] the pole is
/// +V_dc/2 until the first angle and alternates sign at each subsequent one;
/// the remaining quarters follow by symmetry.
struct SwitchingPattern {
  std::vector<double> angles;  // non-decreasing, within [0, pi/2]
  double v_dc = kDefaultVdc;
  double omega_s = kTwoPi * 50.0;

  /// Throws Error(invalid_input) if angles are unordered, out of range, or
  /// v_dc / omega_s are not positive.
  void validate() const;
};

/// 1 + 2 sum_i (-1)^i cos(n alpha_i); the bracket of the Fourier coefficient.
double fourier_bracket(std::span<const double> angles, int n);

/// Peak phase-voltage amplitude of odd, non-triplen order n:
/// (2 V_dc / (n pi)) * fourier_bracket. Signed: the phase voltage contains
/// V_n sin(n omega_s t).
double fourier_amplitude(const SwitchingPattern& pattern, int n);

/// V_1 / (2 V_dc / pi).
double modulation_index(std::span<const double> angles);

/// Signed harmonic spectrum of the pattern for the listed orders.
std::vector<VoltageHarmonic> voltage_spectrum(const SwitchingPattern& pattern, std::span<const int> orders);

/// Non-triplen odd orders 1, 5, 7, ..., up to max_order.
std::vector<int> nontriplen_orders(int max_order);

struct SolverOptions {
  int grid = 200;                   // seed grid points per axis over [0, pi/2]
  double tolerance = 1e-10;         // residual infinity norm
  int max_iterations = 100;
  double classic_ratio = 5.0 / 7.0;  // V5/V7 used by CLASSIC
  double v_dc = kDefaultVdc;
  double omega_s = kTwoPi * 50.0;
};

struct SolveReport {
  SwitchingPattern pattern;
  std::array<double, 2> residuals{};  // |MI - target|, |constraint|
  int iterations = 0;                 // Newton iterations of the selected root
  int branch = 0;                     // index of the selected root in ascending-alpha1 order
  int roots = 0;                      // distinct roots found

  [[nodiscard]] double alpha1() const { return pattern.angles.at(0); }
  [[nodiscard]] double alpha2() const { return pattern.angles.at(1); }
};

/// Fundamental at mi_target with the 5th harmonic eliminated.
SolveReport solve_she_pwm(double mi_target, const SolverOptions& options = {});

/// RATIO_I: V5/V7 = ratio_target; RATIO_II: V7/V5 = ratio_target.
SolveReport solve_ratio(double mi_target, double ratio_target, Method variant, const SolverOptions& options = {});

/// Fixed, load-independent V5/V7 = options.classic_ratio.
SolveReport classic_angles(double mi_target, const SolverOptions& options = {});

/// Dispatches on the method; ratio is ignored for SHE_PWM and CLASSIC.
SolveReport solve_method(Method method, double mi_target, double ratio_target, const SolverOptions& options = {});

struct MaxMiOptions {
  int scan = 400;           // points per axis of the coarse manifold scan
  int refine_passes = 5;    // zoom passes around the best coarse point
  double classic_ratio = 5.0 / 7.0;
};

struct MaxMiResult {
  double mi_max = 0.0;
  std::array<double, 2> angles{};
};

/// Supremum of the modulation index over the feasible triangle subject to
/// the method's harmonic constraint. Throws Error(no_solution) if the
/// constraint has no zero in the triangle.
MaxMiResult max_mi(double ratio_target, Method variant, const MaxMiOptions& options = {});

/// Residual of the method's harmonic constraint in cleared-denominator form.
double constraint_residual(Method method, double ratio_target, double alpha1, double alpha2,
                           double classic_ratio = 5.0 / 7.0);

}  // namespace shetorque
