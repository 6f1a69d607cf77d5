#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shetorque/config_io.hpp"
#include "shetorque/csv.hpp"
#include "shetorque/drive_simulator.hpp"

namespace shetorque {

/// Highest voltage harmonic order fed to the torque predictor.
inline constexpr int kPredictorMaxOrder = 97;

/// Row statuses.
///   ok            angles solved, predictor (and simulation) succeeded
///   fallback_she  RATIO estimator had no minimizing ratio; SHE angles used
///   infeasible    no angle pair meets the target
///   unstable      load beyond breakdown, or the simulation diverged
///   transient     simulation did not settle inside its window
struct SweepRow {
  Condition condition = Condition::custom;
  double mi = 0.0;
  Method method = Method::she_pwm;
  std::optional<double> slip;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::optional<double> v5_over_v7;
  std::optional<double> predicted_a6;
  std::optional<double> simulated_a6;
  std::optional<double> residual;
  std::string status;

  [[nodiscard]] bool usable() const noexcept { return status == "ok" || status == "fallback_she"; }
};

CsvTable sweep_table(const std::vector<SweepRow>& rows);

/// Angles for one (mi, method) at fundamental slip s1. RATIO methods go
/// through the estimator; `fallback` is set when it had no minimizing ratio.
SolveReport select_angles(const ExperimentConfig& cfg, double mi, Method method, double s1, bool* fallback = nullptr);

/// Predicted A_6 for a pattern at slip s1.
double predicted_a6(const ExperimentConfig& cfg, const SwitchingPattern& pattern, double s1);

struct SimulatedPoint {
  double a6 = 0.0;
  double slip = 0.0;  // from the window-mean rotor speed
  TimeSeries series;
};

/// Runs the time-domain model for a pattern under the config's load and
/// extracts the steady-state 6th torque harmonic over the last
/// window_cycles periods.
SimulatedPoint simulate_point(const ExperimentConfig& cfg, const SwitchingPattern& pattern);

/// One cell of the sweep; never throws for infeasible or unstable cells.
SweepRow evaluate_point(const ExperimentConfig& cfg, double mi, Method method);

/// Every (mi, method) cell in config order. Throws Error(config) for an
/// empty grid and Error(empty_result) when no cell is usable.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

/// Default ratio grid for max-mi: 0 to 2 in steps of 0.01.
std::vector<double> default_ratio_grid();

/// Columns variant,ratio,mi_max,alpha1_deg,alpha2_deg,status. Per variant:
/// one row per ratio, a `curve_max` row at the curve maximum and a
/// `max_torque` row at the ratio the estimator selects at breakdown slip.
CsvTable run_max_mi_curve(const ExperimentConfig& cfg);

/// Columns load_nm,slip,phi1_deg,status for constant shaft torques; the
/// default grid is 0 to nameplate torque in 21 points.
CsvTable run_phase_sweep(const ExperimentConfig& cfg);

/// Columns mi,method,alpha1_deg,alpha2_deg,v1,v5,v7,residual,branch,status.
/// RATIO methods use cfg.ratio when given, else the estimator at the
/// circuit-predicted slip.
CsvTable run_solve(const ExperimentConfig& cfg);

}  // namespace shetorque
