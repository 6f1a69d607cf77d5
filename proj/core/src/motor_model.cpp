#include "shetorque/motor_model.hpp"

#include <string>

#include "shetorque/errors.hpp"

namespace shetorque {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(Errc::invalid_input, std::string(name) + " must be positive and finite");
  }
}

void require_frequency(double omega_s) {
  if (!(omega_s > 0.0) || !std::isfinite(omega_s)) {
    throw Error(Errc::invalid_frequency, "synchronous frequency must be positive");
  }
}

struct CircuitState {
  Complex impedance;
  Complex stator_current;
  Complex airgap_emf;
  Complex rotor_current;
};

// Rotor branch written as an admittance s / (R_r + j s X_lr) so that s = 0
// (open rotor) is representable.
CircuitState solve_circuit(Complex voltage, double omega, double slip, const MotorParameters& p) {
  const Complex y_rotor = slip / Complex(p.r_r, slip * omega * p.l_lr);
  const Complex y_mag = 1.0 / Complex(0.0, omega * p.l_m);
  const Complex z_parallel = 1.0 / (y_rotor + y_mag);
  const Complex z_in = Complex(p.r_s, omega * p.l_ls) + z_parallel;

  CircuitState state;
  state.impedance = z_in;
  state.stator_current = voltage / z_in;
  state.airgap_emf = state.stator_current * z_parallel;
  state.rotor_current = state.airgap_emf * y_rotor;
  return state;
}

}  // namespace

void MotorParameters::validate() const {
  require_positive(r_s, "r_s");
  require_positive(r_r, "r_r");
  require_positive(l_ls, "l_ls");
  require_positive(l_lr, "l_lr");
  require_positive(l_m, "l_m");
  require_positive(inertia, "inertia");
  if (pole_pairs < 1) throw Error(Errc::invalid_input, "pole_pairs must be >= 1");
}

MotorParameters MotorParameters::reference_3kw() {
  MotorParameters p;
  p.r_s = 1.85;
  p.r_r = 1.84;
  p.l_ls = 0.170 - 0.160;
  p.l_lr = 0.170 - 0.160;
  p.l_m = 0.160;
  p.pole_pairs = 2;
  p.inertia = 0.007;
  return p;
}

OperatingPoint::OperatingPoint(double omega_s, double omega_m, int pole_pairs)
    : omega_s_(omega_s), omega_m_(omega_m), s1_(fundamental_slip(omega_s, omega_m, pole_pairs)) {
  if (s1_ < 0.0 || s1_ > 1.0) {
    throw Error(Errc::invalid_input, "operating point outside the motoring range 0 <= s1 <= 1");
  }
}

double fundamental_slip(double omega_s, double omega_m, int pole_pairs) {
  require_frequency(omega_s);
  return (omega_s - pole_pairs * omega_m) / omega_s;
}

double harmonic_slip(int k, Sequence sequence, double s1) {
  if (k < 1) throw Error(Errc::invalid_order, "harmonic index k must be >= 1");
  if (!(s1 >= 0.0 && s1 <= 1.0)) throw Error(Errc::invalid_input, "s1 must lie in [0, 1]");
  return slip_for_order(harmonic_order(k, sequence), s1);
}

int harmonic_order(int k, Sequence sequence) {
  if (k < 1) throw Error(Errc::invalid_order, "harmonic index k must be >= 1");
  return sequence == Sequence::minus ? 6 * k - 1 : 6 * k + 1;
}

Sequence sequence_of(int order) {
  if (order < 1) throw Error(Errc::unsupported_order, "order must be positive");
  switch (order % 6) {
    case 1: return Sequence::plus;
    case 5: return Sequence::minus;
    default: throw Error(Errc::unsupported_order, "order " + std::to_string(order) + " is even or triplen");
  }
}

double slip_for_order(int order, double s1) {
  if (order == 1) return s1;
  const double n = static_cast<double>(order);
  return sequence_of(order) == Sequence::minus ? 1.0 + (1.0 - s1) / n : 1.0 - (1.0 - s1) / n;
}

double rotor_phase(int order, double slip, const MotorParameters& params, double omega_s) {
  require_frequency(omega_s);
  if (order < 1) throw Error(Errc::invalid_order, "order must be positive");
  if (!(slip >= 0.0)) throw Error(Errc::invalid_input, "slip must be non-negative");
  if (slip == 0.0) return 0.0;
  const double reflection = params.l_m / (params.l_m + params.l_ls);
  const double reactance = order * omega_s * (params.l_ls + params.l_lr);
  return std::atan(reactance / (reflection * reflection * params.r_s + params.r_r / slip));
}

HarmonicSolution HarmonicSolution::rotated(double angle) const {
  const Complex turn = std::polar(1.0, angle);
  HarmonicSolution out = *this;
  out.rotor_current *= turn;
  out.voltage *= turn;
  out.stator_current *= turn;
  out.airgap_emf *= turn;
  out.rotor_current_circuit *= turn;
  return out;
}

HarmonicSolution harmonic_circuit_solve(int order, double v_n, double slip_n,
                                        const MotorParameters& params, double omega_s) {
  require_frequency(omega_s);
  if (order < 1) throw Error(Errc::invalid_order, "order must be positive");
  if (!(slip_n >= kSlipEpsilon)) {
    throw Error(Errc::singular_slip, "slip " + std::to_string(slip_n) + " below 1e-6");
  }
  if (!(v_n >= 0.0)) throw Error(Errc::invalid_input, "voltage amplitude must be non-negative");

  const double omega = order * omega_s;
  const CircuitState state = solve_circuit(Complex(v_n, 0.0), omega, slip_n, params);

  HarmonicSolution out;
  out.order = order;
  out.slip = slip_n;
  out.omega = omega;
  out.impedance = state.impedance;
  out.voltage = Complex(v_n, 0.0);
  out.stator_current = state.stator_current;
  out.airgap_emf = state.airgap_emf;
  out.rotor_current_circuit = state.rotor_current;
  out.magnetizing_flux = std::abs(state.airgap_emf) / omega;
  out.phi = rotor_phase(order, slip_n, params, omega_s);
  out.rotor_current = std::polar(std::abs(state.rotor_current), -out.phi);
  return out;
}

HarmonicSolution solve_sine_harmonic(int order, double v_n, double slip_n,
                                     const MotorParameters& params, double omega_s) {
  // v sin(x) = Re(-j v e^{jx}).
  const double angle = v_n >= 0.0 ? -kPi / 2.0 : kPi / 2.0;
  return harmonic_circuit_solve(order, std::abs(v_n), slip_n, params, omega_s).rotated(angle);
}

double average_torque(const HarmonicSolution& solution, const MotorParameters& params) {
  const double magnitude = 1.5 * params.pole_pairs * std::norm(solution.rotor_current_circuit) *
                           params.r_r / (solution.slip * solution.omega);
  if (solution.order == 1) return magnitude;
  return sequence_of(solution.order) == Sequence::plus ? magnitude : -magnitude;
}

double fundamental_torque(double v1, double s1, const MotorParameters& params, double omega_s) {
  require_frequency(omega_s);
  if (!(s1 >= 0.0)) throw Error(Errc::invalid_input, "slip must be non-negative");
  if (s1 == 0.0) return 0.0;
  const CircuitState state = solve_circuit(Complex(v1, 0.0), omega_s, s1, params);
  return 1.5 * params.pole_pairs * std::norm(state.rotor_current) * params.r_r / (s1 * omega_s);
}

double breakdown_slip(const MotorParameters& params, double omega_s) {
  // Torque-slip is unimodal on (0, 1]; golden-section search.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = kSlipEpsilon;
  double hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fundamental_torque(1.0, x1, params, omega_s);
  double f2 = fundamental_torque(1.0, x2, params, omega_s);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fundamental_torque(1.0, x2, params, omega_s);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fundamental_torque(1.0, x1, params, omega_s);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace shetorque
