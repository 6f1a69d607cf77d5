#include "shetorque/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "shetorque/errors.hpp"

namespace shetorque {
namespace {

// Runs task(i) for i in [0, count) on up to `jobs` threads. Each task writes
// only its own slot, so results come out in index order.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SolverOptions solver_options(const ExperimentConfig& cfg) {
  SolverOptions opt;
  opt.v_dc = cfg.v_dc;
  opt.omega_s = cfg.omega_s();
  opt.classic_ratio = cfg.classic_ratio;
  return opt;
}

double fundamental_peak(const ExperimentConfig& cfg, double mi) { return mi * 2.0 * cfg.v_dc / kPi; }

double normalized_residual(const ExperimentConfig& cfg, Method method, double mi, const SolveReport& r,
                           double ratio) {
  const double mi_back = fourier_amplitude(r.pattern, 1) / (2.0 * cfg.v_dc / kPi);
  const double g = constraint_residual(method, ratio, r.alpha1(), r.alpha2(), cfg.classic_ratio);
  return std::max(std::abs(mi_back - mi), std::abs(g));
}

std::optional<double> v5_over_v7(const SwitchingPattern& p) {
  const double v7 = fourier_amplitude(p, 7);
  if (std::abs(v7) < 1e-12 * p.v_dc) return std::nullopt;
  return fourier_amplitude(p, 5) / v7;
}

std::string fmt_int(long v) { return std::to_string(v); }

}  // namespace

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable table({"condition", "mi", "method", "slip", "alpha1_deg", "alpha2_deg", "v5_over_v7", "predicted_a6",
                  "simulated_a6", "status", "residual"});
  const auto degrees = [](const std::optional<double>& a) { return a ? std::optional<double>(deg(*a)) : a; };
  for (const SweepRow& r : rows) {
    table.add_row({std::string(to_string(r.condition)), format_number(r.mi), std::string(to_string(r.method)),
                   format_optional(r.slip), format_optional(degrees(r.alpha1)), format_optional(degrees(r.alpha2)),
                   format_optional(r.v5_over_v7), format_optional(r.predicted_a6), format_optional(r.simulated_a6),
                   r.status, format_optional(r.residual)});
  }
  return table;
}

SolveReport select_angles(const ExperimentConfig& cfg, double mi, Method method, double s1, bool* fallback) {
  const SolverOptions opt = solver_options(cfg);
  if (fallback) *fallback = false;
  if (method == Method::she_pwm || method == Method::classic) return solve_method(method, mi, 0.0, opt);
  double ratio = 0.0;
  try {
    ratio = estimate_ratio_target(method, std::clamp(s1, 0.0, 1.0), cfg.motor, cfg.omega_s(), cfg.estimator_slips)
                .ratio;
  } catch (const Error& e) {
    if (e.code() != Errc::no_minimizing_ratio) throw;
    if (fallback) *fallback = true;
    return solve_she_pwm(mi, opt);
  }
  return solve_ratio(mi, ratio, method, opt);
}

double predicted_a6(const ExperimentConfig& cfg, const SwitchingPattern& pattern, double s1) {
  const std::vector<int> orders = nontriplen_orders(kPredictorMaxOrder);
  const std::vector<VoltageHarmonic> spectrum = voltage_spectrum(pattern, orders);
  return predict_torque_harmonic(cfg.motor, spectrum, s1, cfg.omega_s(), 6).amplitude;
}

SimulatedPoint simulate_point(const ExperimentConfig& cfg, const SwitchingPattern& pattern) {
  const double period = 1.0 / cfg.frequency_hz;
  SimulationOptions opt;
  opt.duration = cfg.simulation.duration;
  opt.dt = cfg.simulation.dt;
  opt.decimation = cfg.simulation.decimation;
  // One spare period ahead of the window feeds the settling check.
  opt.record_from = std::max(0.0, opt.duration - (cfg.simulation.window_cycles + 1) * period);

  SimulatedPoint point;
  point.series = simulate(cfg.motor, VoltageSource{pattern}, cfg.load, opt);
  ExtractOptions ex;
  ex.cycles = cfg.simulation.window_cycles;
  point.a6 = harmonic_extract(point.series, "tau_e", 6, cfg.omega_s(), ex).amplitude;
  const double speed = window_mean(point.series, "omega_m", cfg.omega_s(), ex.cycles);
  point.slip = fundamental_slip(cfg.omega_s(), speed, cfg.motor.pole_pairs);
  return point;
}

SweepRow evaluate_point(const ExperimentConfig& cfg, double mi, Method method) {
  SweepRow row;
  row.condition = cfg.condition;
  row.mi = mi;
  row.method = method;

  double s1 = 0.0;
  try {
    s1 = equilibrium_slip(cfg.motor, fundamental_peak(cfg, mi), cfg.omega_s(), cfg.load);
  } catch (const Error& e) {
    if (e.code() != Errc::unstable_region) throw;
    row.status = "unstable";
    return row;
  }

  bool fallback = false;
  SolveReport solved;
  try {
    solved = select_angles(cfg, mi, method, s1, &fallback);
    if (cfg.simulate) {
      SimulatedPoint sim = simulate_point(cfg, solved.pattern);
      s1 = std::clamp(sim.slip, 0.0, 1.0);
      if (method == Method::ratio_i || method == Method::ratio_ii) {
        solved = select_angles(cfg, mi, method, s1, &fallback);
        sim = simulate_point(cfg, solved.pattern);
        s1 = std::clamp(sim.slip, 0.0, 1.0);
      }
      row.simulated_a6 = sim.a6;
    }
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::infeasible:
      case Errc::undefined_ratio: row.status = "infeasible"; break;
      case Errc::instability: row.status = "unstable"; break;
      case Errc::transient: row.status = "transient"; break;
      default: throw;
    }
    if (!solved.pattern.angles.empty() && e.code() != Errc::infeasible) {
      row.alpha1 = solved.alpha1();
      row.alpha2 = solved.alpha2();
    }
    row.slip = s1;
    return row;
  }

  const Method effective = fallback ? Method::she_pwm : method;
  const double ratio = effective == Method::ratio_i || effective == Method::ratio_ii
                           ? estimate_ratio_target(effective, s1, cfg.motor, cfg.omega_s(), cfg.estimator_slips).ratio
                           : 0.0;
  row.slip = s1;
  row.alpha1 = solved.alpha1();
  row.alpha2 = solved.alpha2();
  row.v5_over_v7 = v5_over_v7(solved.pattern);
  row.predicted_a6 = predicted_a6(cfg, solved.pattern, s1);
  row.residual = normalized_residual(cfg, effective, mi, solved, ratio);
  row.status = fallback ? "fallback_she" : "ok";
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.mi_grid.empty()) throw Error(Errc::config, "mi_grid is empty");
  if (cfg.methods.empty()) throw Error(Errc::config, "methods is empty");
  const std::size_t per_mi = cfg.methods.size();
  std::vector<SweepRow> rows(cfg.mi_grid.size() * per_mi);
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    rows[i] = evaluate_point(cfg, cfg.mi_grid[i / per_mi], cfg.methods[i % per_mi]);
  });
  if (std::none_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.usable(); })) {
    throw Error(Errc::empty_result, "no (mi, method) cell could be solved");
  }
  return rows;
}

std::vector<double> default_ratio_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(i / 100.0);
  return grid;
}

CsvTable run_max_mi_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.variants.empty()) throw Error(Errc::config, "variants is empty");
  const std::vector<double> ratios = cfg.ratio_grid.empty() ? default_ratio_grid() : cfg.ratio_grid;
  MaxMiOptions opt;
  opt.classic_ratio = cfg.classic_ratio;

  struct Cell {
    std::optional<MaxMiResult> result;
  };
  const std::size_t per_variant = ratios.size();
  std::vector<Cell> cells(cfg.variants.size() * per_variant);
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    try {
      cells[i].result = max_mi(ratios[i % per_variant], cfg.variants[i / per_variant], opt);
    } catch (const Error& e) {
      if (e.code() != Errc::no_solution) throw;
    }
  });

  CsvTable table({"variant", "ratio", "mi_max", "alpha1_deg", "alpha2_deg", "status"});
  const auto emit = [&](Method v, double ratio, const std::optional<MaxMiResult>& r, const std::string& status) {
    if (r) {
      table.add_row({std::string(to_string(v)), format_number(ratio), format_number(r->mi_max),
                     format_number(deg(r->angles[0])), format_number(deg(r->angles[1])), status});
    } else {
      table.add_row({std::string(to_string(v)), format_number(ratio), "", "", "", status});
    }
  };

  const double s_bd = breakdown_slip(cfg.motor, cfg.omega_s());
  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
    const Method v = cfg.variants[vi];
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < per_variant; ++k) {
      const auto& r = cells[vi * per_variant + k].result;
      emit(v, ratios[k], r, r ? "ok" : "no_solution");
      if (r && (!best || r->mi_max > cells[vi * per_variant + *best].result->mi_max)) best = k;
    }
    if (best) emit(v, ratios[*best], cells[vi * per_variant + *best].result, "curve_max");

    if (v == Method::ratio_i || v == Method::ratio_ii) {
      try {
        const double r = estimate_ratio_target(v, s_bd, cfg.motor, cfg.omega_s(), cfg.estimator_slips).ratio;
        std::optional<MaxMiResult> m;
        try {
          m = max_mi(r, v, opt);
        } catch (const Error& e) {
          if (e.code() != Errc::no_solution) throw;
        }
        emit(v, r, m, m ? "max_torque" : "max_torque_no_solution");
      } catch (const Error& e) {
        if (e.code() != Errc::no_minimizing_ratio) throw;
        table.add_row({std::string(to_string(v)), "", "", "", "", "max_torque_no_minimizing_ratio"});
      }
    }
  }
  return table;
}

CsvTable run_phase_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> loads = cfg.load_grid;
  if (loads.empty()) {
    const double rated = kRatedPowerW / (kRatedSpeedRpm * kTwoPi / 60.0);
    for (int i = 0; i <= 20; ++i) loads.push_back(rated * i / 20.0);
  }
  CsvTable table({"load_nm", "slip", "phi1_deg", "status"});
  for (double torque : loads) {
    try {
      const double s = slip_for_torque(cfg.motor, cfg.phase_voltage, cfg.omega_s(), torque);
      const double phi = rotor_phase(1, s, cfg.motor, cfg.omega_s());
      table.add_row({format_number(torque), format_number(s), format_number(deg(phi)), "ok"});
    } catch (const Error& e) {
      if (e.code() != Errc::unstable_region) throw;
      table.add_row({format_number(torque), "", "", "unstable_region"});
    }
  }
  return table;
}

CsvTable run_solve(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.mi_grid.empty()) throw Error(Errc::config, "mi_grid is empty");
  if (cfg.methods.empty()) throw Error(Errc::config, "methods is empty");
  CsvTable table({"mi", "method", "alpha1_deg", "alpha2_deg", "v1", "v5", "v7", "residual", "branch", "status"});
  const SolverOptions opt = solver_options(cfg);
  std::size_t usable = 0;
  for (double mi : cfg.mi_grid) {
    for (Method m : cfg.methods) {
      const std::string name(to_string(m));
      try {
        bool fallback = false;
        SolveReport r;
        Method effective = m;
        double ratio = 0.0;
        if (cfg.ratio && (m == Method::ratio_i || m == Method::ratio_ii)) {
          ratio = *cfg.ratio;
          r = solve_ratio(mi, ratio, m, opt);
        } else {
          const double s1 = equilibrium_slip(cfg.motor, fundamental_peak(cfg, mi), cfg.omega_s(), cfg.load);
          r = select_angles(cfg, mi, m, s1, &fallback);
          if (fallback) {
            effective = Method::she_pwm;
          } else if (m == Method::ratio_i || m == Method::ratio_ii) {
            ratio = estimate_ratio_target(m, s1, cfg.motor, cfg.omega_s(), cfg.estimator_slips).ratio;
          }
        }
        table.add_row({format_number(mi), name, format_number(deg(r.alpha1())), format_number(deg(r.alpha2())),
                       format_number(fourier_amplitude(r.pattern, 1)), format_number(fourier_amplitude(r.pattern, 5)),
                       format_number(fourier_amplitude(r.pattern, 7)),
                       format_number(normalized_residual(cfg, effective, mi, r, ratio)), fmt_int(r.branch),
                       fallback ? "fallback_she" : "ok"});
        ++usable;
      } catch (const Error& e) {
        std::string status;
        switch (e.code()) {
          case Errc::infeasible:
          case Errc::undefined_ratio: status = "infeasible"; break;
          case Errc::unstable_region: status = "unstable"; break;
          default: throw;
        }
        table.add_row({format_number(mi), name, "", "", "", "", "", "", "", status});
      }
    }
  }
  if (usable == 0) throw Error(Errc::empty_result, "no (mi, method) cell could be solved");
  return table;
}

}  // namespace shetorque
