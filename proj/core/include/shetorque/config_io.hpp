#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shetorque/angle_solver.hpp"
#include "shetorque/load.hpp"

namespace shetorque {

enum class Condition { no_load_50, linear_50, linear_45, custom };

std::string_view to_string(Condition condition) noexcept;
Condition condition_from_string(std::string_view text);

struct SimulationSettings {
  double duration = 2.0;
  double dt = 0.0;  // 0: 1/20000 of the fundamental period
  int decimation = 10;
  int window_cycles = 20;
};

/// One experiment. Fields not present in the JSON keep these defaults, and
/// a named condition supplies frequency and load before explicit fields are
/// checked against it.
struct ExperimentConfig {
  MotorParameters motor = MotorParameters::reference_3kw();
  double v_dc = kDefaultVdc;
  double frequency_hz = 50.0;
  Condition condition = Condition::custom;
  std::vector<double> mi_grid;
  std::vector<Method> methods{Method::she_pwm, Method::classic, Method::ratio_i, Method::ratio_ii};
  LoadSpec load;
  bool simulate = false;
  SimulationSettings simulation;
  SlipConvention estimator_slips = SlipConvention::as_printed;
  double classic_ratio = 5.0 / 7.0;
  int jobs = 1;

  // max-mi
  std::vector<Method> variants{Method::ratio_i, Method::ratio_ii};
  std::vector<double> ratio_grid;

  // phase-sweep: constant shaft torques (N m) and phase-voltage peak (V)
  std::vector<double> load_grid;
  double phase_voltage = 380.0 * 1.4142135623730951 / 1.7320508075688772;

  // solve: explicit ratio target for RATIO_I / RATIO_II instead of the estimator
  std::optional<double> ratio;

  [[nodiscard]] double omega_s() const noexcept { return kTwoPi * frequency_hz; }

  /// Throws Error(config) on any violated invariant.
  void validate() const;
};

/// Keys r_s, r_r, l_m, pole_pairs, inertia and either l_ls/l_lr or the self
/// inductances l_s_self/l_r_self. Throws Error(config).
MotorParameters parse_motor(std::string_view json_text);
MotorParameters load_motor(const std::filesystem::path& path);
std::string motor_to_json(const MotorParameters& params);

/// `motor` may be an object or a path, resolved against base_dir.
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace shetorque
