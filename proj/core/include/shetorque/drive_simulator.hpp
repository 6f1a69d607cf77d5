#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "shetorque/angle_solver.hpp"
#include "shetorque/load.hpp"

namespace shetorque {

struct PhaseVoltages {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Pole voltage (relative to the DC-link midpoint) of one leg at electrical
/// angle theta, for a quarter-wave symmetric pattern.
double pole_voltage(const SwitchingPattern& pattern, double theta);

/// Phase-to-neutral voltages of a star-connected load with isolated neutral,
/// phases displaced by 2 pi / 3.
PhaseVoltages synthesize_waveform(const SwitchingPattern& pattern, double t);

/// Exact averages of the phase voltages over [t0, t1].
PhaseVoltages mean_phase_voltages(const SwitchingPattern& pattern, double t0, double t1);

/// Electrical angles in [0, 2 pi) at which any phase voltage steps, sorted.
std::vector<double> switching_edges(const SwitchingPattern& pattern);

/// Balanced sinusoidal supply: phase a is sum_n V_n sin(n omega_s t), phases
/// b and c are shifted by -/+ 2 pi / 3 of the fundamental.
struct SinusoidalSource {
  double omega_s = kTwoPi * 50.0;
  std::vector<VoltageHarmonic> harmonics;
};

using VoltageSource = std::variant<SwitchingPattern, SinusoidalSource>;

/// Equal-length named channels sampled every dt starting at t0.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(double dt, double t0) : dt_(dt), t0_(t0) {}

  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] double t0() const noexcept { return t0_; }
  [[nodiscard]] std::size_t size() const noexcept { return channels_.empty() ? 0 : channels_.front().second.size(); }
  [[nodiscard]] double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }

  [[nodiscard]] bool has(std::string_view name) const noexcept;
  [[nodiscard]] const std::vector<double>& channel(std::string_view name) const;
  std::vector<double>& add_channel(std::string name, std::vector<double> data = {});
  [[nodiscard]] const std::vector<std::pair<std::string, std::vector<double>>>& channels() const noexcept {
    return channels_;
  }

  /// Throws Error(invalid_input) if channel lengths differ or dt <= 0.
  void validate() const;

  /// Energy bookkeeping over the recorded span (J).
  double electrical_energy_in = 0.0;
  double mechanical_energy_out = 0.0;

 private:
  double dt_ = 0.0;
  double t0_ = 0.0;
  std::vector<std::pair<std::string, std::vector<double>>> channels_;
};

/// CSV with header t,tau_e,omega_m,i_a,i_b,i_c,v_a,v_b,v_c.
void write_time_series_csv(std::ostream& out, const TimeSeries& series);

struct SimulationOptions {
  double duration = 2.0;
  /// Integration step; 0 selects 1/20000 of the fundamental period.
  double dt = 0.0;
  int decimation = 10;
  /// Samples before this time are not stored.
  double record_from = 0.0;
  /// Holds the rotor at this mechanical speed instead of integrating the
  /// mechanical equation (infinite inertia); 0 gives a locked rotor.
  std::optional<double> fixed_speed;
  double initial_speed = 0.0;
};

/// Fixed-step RK4 integration of the stationary-frame flux model
///   dpsi_s/dt = v_s - R_s i_s
///   dpsi_r/dt = -R_r i_r + j p w_m psi_r
///   J dw_m/dt = 1.5 p (psi_sa i_sb - psi_sb i_sa) - T_load(w_m)
/// from rest with zero flux. Pattern voltages are stored as their exact
/// mean over the sample cell centred on each stored instant, so the stored
/// series carries no switching-edge aliasing. Switching instants of a pattern source split
/// the step so the applied voltage is exact. Throws Error(instability) if
/// |w_m| exceeds 2 w_s / p and Error(invalid_input) if the step or duration
/// violate their bounds (>= 2000 steps per period, >= 20 periods).
TimeSeries simulate(const MotorParameters& params, const VoltageSource& source, const LoadSpec& load,
                    const SimulationOptions& options = {});

TimeSeries simulate(const MotorParameters& params, const SwitchingPattern& pattern, const LoadSpec& load,
                    double duration, double dt);

struct HarmonicComponent {
  double amplitude = 0.0;
  double phase = 0.0;  // of amplitude cos(order w_s t + phase)
};

struct ExtractOptions {
  /// Fundamental periods in the window; 0 uses every whole period available.
  int cycles = 0;
  bool require_settled = true;
  /// Allowed relative change of the settling reference between the last two
  /// periods.
  double settle_tolerance = 1e-3;
};

/// Single-bin correlation of one channel at order * omega_s over a window of
/// whole fundamental periods ending at the last sample. The settling check
/// uses the i_a fundamental when the series has it, otherwise the requested
/// component of the channel itself.
HarmonicComponent harmonic_extract(const TimeSeries& series, std::string_view channel, int order, double omega_s,
                                   const ExtractOptions& options = {});

/// Mean of a channel over the same whole-period window.
double window_mean(const TimeSeries& series, std::string_view channel, double omega_s, int cycles = 0);

}  // namespace shetorque
