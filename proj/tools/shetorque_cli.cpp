// Command-line driver: JSON experiment config in, CSV out.
//
//   shetorque sweep       --config cfg.json [--out rows.csv] [--motor m.json]
//   shetorque max-mi      --config cfg.json [--out curve.csv]
//   shetorque phase-sweep --config cfg.json [--out phase.csv]
//   shetorque solve       --config cfg.json [--out angles.csv]
//   shetorque simulate    --config cfg.json [--out series.csv]
//
// Exit status: 0 success (infeasible rows included), 2 config error,
// 3 empty result, 1 anything else.

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "shetorque/config_io.hpp"
#include "shetorque/errors.hpp"
#include "shetorque/sweep.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEmpty = 3;

struct CommonArgs {
  std::string config;
  std::string out;
  std::string motor;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "experiment configuration (JSON)")->required();
  cmd->add_option("--out", args.out, "output CSV path (default: stdout)");
  cmd->add_option("--motor", args.motor, "motor parameter file overriding the config's motor block");
  cmd->add_option("--jobs", args.jobs, "worker threads overriding the config")->check(CLI::PositiveNumber);
}

shetorque::ExperimentConfig load(const CommonArgs& args) {
  shetorque::ExperimentConfig cfg = shetorque::load_experiment_config(args.config);
  if (!args.motor.empty()) cfg.motor = shetorque::load_motor(args.motor);
  if (args.jobs) cfg.jobs = *args.jobs;
  cfg.validate();
  return cfg;
}

void emit(const CommonArgs& args, const std::function<void(std::ostream&)>& write) {
  if (args.out.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw shetorque::Error(shetorque::Errc::config, "cannot write '" + args.out + "'");
  write(out);
  if (!out.flush()) throw shetorque::Error(shetorque::Errc::invalid_input, "write to '" + args.out + "' failed");
}

void run_simulate(const shetorque::ExperimentConfig& cfg, const CommonArgs& args) {
  using namespace shetorque;
  if (cfg.mi_grid.empty() || cfg.methods.empty()) throw Error(Errc::config, "simulate needs mi_grid and methods");
  const double mi = cfg.mi_grid.front();
  const Method method = cfg.methods.front();
  const double s1 = equilibrium_slip(cfg.motor, mi * 2.0 * cfg.v_dc / kPi, cfg.omega_s(), cfg.load);
  const SolveReport solved = select_angles(cfg, mi, method, s1);
  SimulationOptions opt;
  opt.duration = cfg.simulation.duration;
  opt.dt = cfg.simulation.dt;
  opt.decimation = cfg.simulation.decimation;
  const TimeSeries series = simulate(cfg.motor, VoltageSource{solved.pattern}, cfg.load, opt);
  emit(args, [&](std::ostream& out) { write_time_series_csv(out, series); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-angle inverter torque-ripple experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* sweep = app.add_subcommand("sweep", "methods x modulation-index table of 6th torque harmonics");
  CLI::App* max_mi = app.add_subcommand("max-mi", "maximum modulation index against harmonic ratio");
  CLI::App* phase = app.add_subcommand("phase-sweep", "fundamental rotor-current phase against shaft load");
  CLI::App* solve = app.add_subcommand("solve", "switching angles for each (mi, method)");
  CLI::App* simulate = app.add_subcommand("simulate", "time series of the first (mi, method) cell");
  for (CLI::App* cmd : {sweep, max_mi, phase, solve, simulate}) add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const shetorque::ExperimentConfig cfg = load(args);
    if (sweep->parsed()) {
      const auto rows = shetorque::run_sweep(cfg);
      emit(args, [&](std::ostream& out) { shetorque::sweep_table(rows).write(out); });
    } else if (max_mi->parsed()) {
      const auto table = shetorque::run_max_mi_curve(cfg);
      emit(args, [&](std::ostream& out) { table.write(out); });
    } else if (phase->parsed()) {
      const auto table = shetorque::run_phase_sweep(cfg);
      emit(args, [&](std::ostream& out) { table.write(out); });
    } else if (solve->parsed()) {
      const auto table = shetorque::run_solve(cfg);
      emit(args, [&](std::ostream& out) { table.write(out); });
    } else {
      run_simulate(cfg, args);
    }
  } catch (const shetorque::Error& e) {
    std::cerr << "shetorque: " << e.what() << '\n';
    if (e.code() == shetorque::Errc::config) return kExitConfig;
    if (e.code() == shetorque::Errc::empty_result) return kExitEmpty;
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "shetorque: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
