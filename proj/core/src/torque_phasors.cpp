#include "shetorque/torque_phasors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "shetorque/errors.hpp"

namespace shetorque {
namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

// Signed electrical speed of the rotating field of an order, in units of
// omega_s: +n for positive sequence (including the fundamental), -n for
// negative sequence.
int field_speed(int order) { return order == 1 || sequence_of(order) == Sequence::plus ? order : -order; }

// Phase-domain phasor -> space-vector coefficient in the basis e^{j f t}.
Complex space_vector(Complex phasor, int order) {
  return field_speed(order) > 0 ? phasor : std::conj(phasor);
}

}  // namespace

TorquePhasor TorquePhasor::from_complex(int order, Complex value) {
  return {order, std::abs(value), normalize_angle(std::arg(value))};
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::she_pwm: return "SHE_PWM";
    case Method::classic: return "CLASSIC";
    case Method::ratio_i: return "RATIO_I";
    case Method::ratio_ii: return "RATIO_II";
  }
  return "UNKNOWN";
}

Method method_from_string(std::string_view text) {
  const std::string key = upper(text);
  if (key == "SHE_PWM" || key == "SHE-PWM" || key == "SHE") return Method::she_pwm;
  if (key == "CLASSIC") return Method::classic;
  if (key == "RATIO_I") return Method::ratio_i;
  if (key == "RATIO_II") return Method::ratio_ii;
  throw Error(Errc::invalid_input, "unknown method '" + std::string(text) + "'");
}

std::string_view to_string(SlipConvention convention) noexcept {
  return convention == SlipConvention::as_printed ? "as_printed" : "field_direction";
}

SlipConvention slip_convention_from_string(std::string_view text) {
  if (text == "as_printed") return SlipConvention::as_printed;
  if (text == "field_direction") return SlipConvention::field_direction;
  throw Error(Errc::invalid_input, "unknown slip convention '" + std::string(text) + "'");
}

PhasorSum phasor_sum(double b1, double b2, double delta_theta) {
  if (!(b1 >= 0.0) || !(b2 >= 0.0)) throw Error(Errc::invalid_input, "amplitudes must be non-negative");
  const double re = b1 * std::cos(delta_theta) - b2;
  const double im = b1 * std::sin(delta_theta);
  return {std::hypot(re, im), std::atan2(im, re)};
}

double min_ratio(double b1, double b2) {
  if (!(b1 >= 0.0) || !(b2 >= 0.0)) throw Error(Errc::invalid_input, "amplitudes must be non-negative");
  const double hi = std::max(b1, b2);
  if (hi == 0.0) throw Error(Errc::undefined_ratio, "both amplitudes are zero");
  return std::min(b1, b2) / hi;
}

double delta_theta_estimate(double phi_1, double phi_minus, double phi_plus) {
  return normalize_angle(2.0 * phi_1 + phi_minus - phi_plus);
}

double torque_amplitude_ratio(double v_minus, double v_plus, double s_minus, double s_plus) {
  if (!(v_plus > 0.0) || !(s_minus > 0.0) || !(s_plus > 0.0)) {
    throw Error(Errc::undefined_ratio, "V_plus, s_minus and s_plus must be positive");
  }
  return (v_minus * s_plus) / (v_plus * s_minus);
}

double target_voltage_ratio(Method variant, double s_minus, double s_plus, double delta_theta) {
  if (!(s_minus > 0.0) || !(s_plus > 0.0)) throw Error(Errc::undefined_ratio, "slips must be positive");
  const double c = std::cos(delta_theta);
  if (c < 0.0) {
    throw Error(Errc::no_minimizing_ratio, "cos(delta_theta) < 0 admits no non-negative amplitude ratio");
  }
  switch (variant) {
    case Method::ratio_i: return (s_minus / s_plus) * c;
    case Method::ratio_ii: return (s_plus / s_minus) * c;
    default: throw Error(Errc::invalid_input, "target ratio is defined for RATIO_I and RATIO_II only");
  }
}

TorquePhasor interaction_torque(const HarmonicSolution& a, const HarmonicSolution& b,
                                const MotorParameters& params) {
  const HarmonicSolution* lo = &a;
  const HarmonicSolution* hi = &b;
  int diff = field_speed(b.order) - field_speed(a.order);
  if (diff < 0) {
    std::swap(lo, hi);
    diff = -diff;
  }
  if (diff == 0 || diff % 6 != 0) {
    throw Error(Errc::invalid_pairing, "orders " + std::to_string(a.order) + " and " +
                                           std::to_string(b.order) + " do not beat at a 6k torque order");
  }
  // tau = (3/2) p Im(conj(psi_m) i_r); the cross terms of the two fields
  // beating at +diff reduce to Im(c e^{j diff w t}).
  const Complex psi_lo = space_vector(lo->airgap_flux(), lo->order);
  const Complex psi_hi = space_vector(hi->airgap_flux(), hi->order);
  const Complex ir_lo = space_vector(lo->rotor_current_circuit, lo->order);
  const Complex ir_hi = space_vector(hi->rotor_current_circuit, hi->order);
  const Complex c = std::conj(psi_lo) * ir_hi - psi_hi * std::conj(ir_lo);
  // Im(c e^{jx}) = |c| cos(x + arg c - pi/2)
  return TorquePhasor::from_complex(diff, 1.5 * params.pole_pairs * c * Complex(0.0, -1.0));
}

TorquePhasor torque_component_phasors(const HarmonicSolution& fund, const HarmonicSolution& harm,
                                      const MotorParameters& params) {
  if (fund.order != 1) throw Error(Errc::invalid_pairing, "first solution must be the fundamental");
  if (harm.order < 5 || (harm.order % 6 != 1 && harm.order % 6 != 5)) {
    throw Error(Errc::invalid_pairing, "second solution must be of order 6k+-1");
  }
  return interaction_torque(fund, harm, params);
}

TorquePhasor combine_torque(std::span<const TorquePhasor> components) {
  if (components.empty()) throw Error(Errc::invalid_combination, "no components to combine");
  const int order = components.front().order;
  Complex sum{};
  for (const TorquePhasor& c : components) {
    if (c.order != order) throw Error(Errc::invalid_combination, "components have different orders");
    sum += c.as_complex();
  }
  return TorquePhasor::from_complex(order, sum);
}

double torque_estimate_simplified(double i_r1, double i_r_minus, double i_r_plus, double s1,
                                  double omega_s, double r_r) {
  if (!(omega_s > 0.0)) throw Error(Errc::invalid_frequency, "omega_s must be positive");
  if (!(s1 >= kSlipEpsilon)) throw Error(Errc::singular_slip, "simplified estimate diverges as s1 -> 0");
  return (3.0 * r_r / (2.0 * omega_s)) * ((1.0 - s1) / s1) * i_r1 * (i_r_plus - i_r_minus);
}

TorquePhasor flux_free_component(int k, Sequence sequence, double i_r1, double i_r_h, double s1,
                                 double omega_s, double r_r) {
  if (k < 1) throw Error(Errc::invalid_order, "k must be >= 1");
  const double signed_amp = sequence == Sequence::minus
                                ? torque_estimate_simplified(i_r1, i_r_h, 0.0, s1, omega_s, r_r)
                                : torque_estimate_simplified(i_r1, 0.0, i_r_h, s1, omega_s, r_r);
  // a sin(x) = a cos(x - pi/2)
  return TorquePhasor::from_complex(6 * k, Complex(0.0, -signed_amp));
}

double estimator_slip(int k, Sequence sequence, double s1, SlipConvention convention) {
  if (convention == SlipConvention::field_direction) return harmonic_slip(k, sequence, s1);
  if (k < 1) throw Error(Errc::invalid_order, "harmonic index k must be >= 1");
  if (!(s1 >= 0.0 && s1 <= 1.0)) throw Error(Errc::invalid_input, "s1 must lie in [0, 1]");
  const double n = harmonic_order(k, sequence);
  return sequence == Sequence::minus ? 1.0 - (1.0 - s1) / n : 1.0 + (1.0 - s1) / n;
}

RatioEstimate estimate_ratio_target(Method variant, double s1, const MotorParameters& params,
                                    double omega_s, SlipConvention convention) {
  RatioEstimate e{};
  e.s_minus = estimator_slip(1, Sequence::minus, s1, convention);
  e.s_plus = estimator_slip(1, Sequence::plus, s1, convention);
  e.phi_1 = rotor_phase(1, s1, params, omega_s);
  e.phi_minus = rotor_phase(5, e.s_minus, params, omega_s);
  e.phi_plus = rotor_phase(7, e.s_plus, params, omega_s);
  e.delta_theta = delta_theta_estimate(e.phi_1, e.phi_minus, e.phi_plus);
  e.ratio = target_voltage_ratio(variant, e.s_minus, e.s_plus, e.delta_theta);
  return e;
}

TorquePhasor predict_torque_harmonic(const MotorParameters& params, std::span<const VoltageHarmonic> voltages,
                                     double s1, double omega_s, int torque_order, InteractionSet set) {
  if (torque_order < 6 || torque_order % 6 != 0) {
    throw Error(Errc::invalid_order, "torque order must be a positive multiple of 6");
  }
  const double slip = std::clamp(s1, kSlipEpsilon, 1.0);

  std::vector<HarmonicSolution> solved;
  solved.reserve(voltages.size());
  for (const VoltageHarmonic& v : voltages) {
    solved.push_back(solve_sine_harmonic(v.order, v.amplitude, slip_for_order(v.order, slip), params, omega_s));
  }

  Complex sum{};
  for (std::size_t i = 0; i < solved.size(); ++i) {
    for (std::size_t j = i + 1; j < solved.size(); ++j) {
      if (set == InteractionSet::fundamental_only && solved[i].order != 1 && solved[j].order != 1) continue;
      if (std::abs(field_speed(solved[i].order) - field_speed(solved[j].order)) != torque_order) continue;
      sum += interaction_torque(solved[i], solved[j], params).as_complex();
    }
  }
  return TorquePhasor::from_complex(torque_order, sum);
}

}  // namespace shetorque
