#include "shetorque/drive_simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "shetorque/errors.hpp"

namespace shetorque {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kThird = kTwoPi / 3.0;

double wrap_period(double theta) {
  const double r = std::fmod(theta, kTwoPi);
  return r < 0.0 ? r + kTwoPi : r;
}

// Sign of the pole on [0, pi/2]: +1 before the first angle, flipping at each.
double quarter_sign(std::span<const double> angles, double theta) {
  double sign = 1.0;
  for (double a : angles) {
    if (theta >= a) sign = -sign;
  }
  return sign;
}

// Integral of the normalized pole (levels +-1) from 0 to x, x in [0, pi/2].
double quarter_integral(std::span<const double> angles, double x) {
  double acc = 0.0;
  double from = 0.0;
  double sign = 1.0;
  for (double a : angles) {
    if (a >= x) break;
    acc += sign * (a - from);
    from = a;
    sign = -sign;
  }
  return acc + sign * (x - from);
}

double half_integral(std::span<const double> angles, double x) {
  if (x <= 0.5 * kPi) return quarter_integral(angles, x);
  const double q = quarter_integral(angles, 0.5 * kPi);
  return 2.0 * q - quarter_integral(angles, kPi - x);
}

// Antiderivative of the normalized pole; periodic because the waveform has
// zero mean.
double pole_antiderivative(std::span<const double> angles, double theta) {
  const double x = wrap_period(theta);
  if (x <= kPi) return half_integral(angles, x);
  return half_integral(angles, kPi) - half_integral(angles, x - kPi);
}

double normalized_pole(std::span<const double> angles, double theta) {
  const double x = wrap_period(theta);
  if (x < kPi) return quarter_sign(angles, x <= 0.5 * kPi ? x : kPi - x);
  const double y = x - kPi;
  return -quarter_sign(angles, y <= 0.5 * kPi ? y : kPi - y);
}

PhaseVoltages from_poles(double pa, double pb, double pc) {
  const double common = (pa + pb + pc) / 3.0;
  return {pa - common, pb - common, pc - common};
}

PhaseVoltages sinusoidal_voltages(const SinusoidalSource& src, double t) {
  PhaseVoltages v;
  const double theta = src.omega_s * t;
  for (const VoltageHarmonic& h : src.harmonics) {
    const double n = h.order;
    v.a += h.amplitude * std::sin(n * theta);
    v.b += h.amplitude * std::sin(n * (theta - kThird));
    v.c += h.amplitude * std::sin(n * (theta + kThird));
  }
  return v;
}

double source_omega(const VoltageSource& source) {
  return std::visit([](const auto& s) { return s.omega_s; }, source);
}

using State = std::array<double, 7>;  // psi_s(a,b), psi_r(a,b), w_m, E_in, E_mech

struct Machine {
  double r_s, r_r, l_s, l_r, l_m, det, p, inertia;
  LoadSpec load;
  bool locked;

  explicit Machine(const MotorParameters& m, const LoadSpec& ld, bool fixed)
      : r_s(m.r_s),
        r_r(m.r_r),
        l_s(m.l_s_self()),
        l_r(m.l_r_self()),
        l_m(m.l_m),
        det(m.l_s_self() * m.l_r_self() - m.l_m * m.l_m),
        p(m.pole_pairs),
        inertia(m.inertia),
        load(ld),
        locked(fixed) {}

  struct Currents {
    double isa, isb, ira, irb;
  };

  [[nodiscard]] Currents currents(const State& x) const {
    return {(l_r * x[0] - l_m * x[2]) / det, (l_r * x[1] - l_m * x[3]) / det, (l_s * x[2] - l_m * x[0]) / det,
            (l_s * x[3] - l_m * x[1]) / det};
  }

  [[nodiscard]] double torque(const State& x, const Currents& c) const {
    return 1.5 * p * (x[0] * c.isb - x[1] * c.isa);
  }

  [[nodiscard]] State derivative(const State& x, double va, double vb) const {
    const Currents c = currents(x);
    const double we = p * x[4];
    const double te = torque(x, c);
    State d{};
    d[0] = va - r_s * c.isa;
    d[1] = vb - r_s * c.isb;
    d[2] = -r_r * c.ira - we * x[3];
    d[3] = -r_r * c.irb + we * x[2];
    d[4] = locked ? 0.0 : (te - load.torque(x[4])) / inertia;
    d[5] = 1.5 * (va * c.isa + vb * c.isb);
    d[6] = te * x[4];
    return d;
  }
};

State axpy(const State& x, double h, const State& k) {
  State out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * k[i];
  return out;
}

template <typename VoltageAt>
void rk4_step(const Machine& m, State& x, double t, double h, VoltageAt&& voltage) {
  const auto [a0, b0] = voltage(t);
  const auto [a1, b1] = voltage(t + 0.5 * h);
  const auto [a2, b2] = voltage(t + h);
  const State k1 = m.derivative(x, a0, b0);
  const State k2 = m.derivative(axpy(x, 0.5 * h, k1), a1, b1);
  const State k3 = m.derivative(axpy(x, 0.5 * h, k2), a1, b1);
  const State k4 = m.derivative(axpy(x, h, k3), a2, b2);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

std::pair<double, double> clarke(const PhaseVoltages& v) { return {v.a, (v.b - v.c) / kSqrt3}; }

struct Window {
  std::size_t begin;
  std::size_t length;
  std::size_t per_period;
};

Window analysis_window(const TimeSeries& series, double omega_s, int cycles) {
  if (!(omega_s > 0.0)) throw Error(Errc::invalid_frequency, "omega_s must be positive");
  series.validate();
  const double spp = kTwoPi / omega_s / series.dt();
  const double rounded = std::round(spp);
  if (rounded < 1.0 || std::abs(spp - rounded) > 1e-6 * spp) {
    throw Error(Errc::leakage, fmt::format("{:.9g} samples per period is not an integer", spp));
  }
  const auto per = static_cast<std::size_t>(rounded);
  const std::size_t available = series.size() / per;
  if (available == 0) throw Error(Errc::leakage, "series is shorter than one fundamental period");
  std::size_t periods = available;
  if (cycles > 0) {
    if (static_cast<std::size_t>(cycles) > available) {
      throw Error(Errc::leakage, fmt::format("{} periods requested, {} available", cycles, available));
    }
    periods = static_cast<std::size_t>(cycles);
  }
  return {series.size() - periods * per, periods * per, per};
}

HarmonicComponent correlate(const TimeSeries& series, const std::vector<double>& x, std::size_t begin,
                            std::size_t length, int order, double omega_s) {
  double a = 0.0;
  double b = 0.0;
  const double w = order * omega_s;
  for (std::size_t i = begin; i < begin + length; ++i) {
    const double arg = w * series.time(i);
    a += x[i] * std::cos(arg);
    b += x[i] * std::sin(arg);
  }
  const double scale = (order == 0 ? 1.0 : 2.0) / static_cast<double>(length);
  a *= scale;
  b *= scale;
  return {std::hypot(a, b), normalize_angle(std::atan2(-b, a))};
}

}  // namespace

double pole_voltage(const SwitchingPattern& pattern, double theta) {
  return 0.5 * pattern.v_dc * normalized_pole(pattern.angles, theta);
}

PhaseVoltages synthesize_waveform(const SwitchingPattern& pattern, double t) {
  const double theta = pattern.omega_s * t;
  return from_poles(pole_voltage(pattern, theta), pole_voltage(pattern, theta - kThird),
                    pole_voltage(pattern, theta + kThird));
}

PhaseVoltages mean_phase_voltages(const SwitchingPattern& pattern, double t0, double t1) {
  if (!(t1 > t0)) throw Error(Errc::invalid_input, "averaging interval must have positive length");
  const double th0 = pattern.omega_s * t0;
  const double th1 = pattern.omega_s * t1;
  const auto mean = [&](double shift) {
    return (pole_antiderivative(pattern.angles, th1 + shift) - pole_antiderivative(pattern.angles, th0 + shift)) /
           (th1 - th0);
  };
  const double scale = 0.5 * pattern.v_dc;
  return from_poles(scale * mean(0.0), scale * mean(-kThird), scale * mean(kThird));
}

std::vector<double> switching_edges(const SwitchingPattern& pattern) {
  std::vector<double> pole;
  for (double a : pattern.angles) {
    pole.insert(pole.end(), {a, kPi - a, kPi + a, kTwoPi - a});
  }
  pole.push_back(0.0);
  pole.push_back(kPi);
  std::vector<double> edges;
  for (double shift : {0.0, kThird, -kThird}) {
    for (double e : pole) edges.push_back(wrap_period(e + shift));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(), [](double l, double r) { return r - l < 1e-12; }),
              edges.end());
  if (edges.size() > 1 && kTwoPi - edges.back() < 1e-12) edges.pop_back();
  return edges;
}

bool TimeSeries::has(std::string_view name) const noexcept {
  return std::any_of(channels_.begin(), channels_.end(), [&](const auto& c) { return c.first == name; });
}

const std::vector<double>& TimeSeries::channel(std::string_view name) const {
  for (const auto& c : channels_) {
    if (c.first == name) return c.second;
  }
  throw Error(Errc::invalid_input, "no channel named '" + std::string(name) + "'");
}

std::vector<double>& TimeSeries::add_channel(std::string name, std::vector<double> data) {
  if (has(name)) throw Error(Errc::invalid_input, "duplicate channel '" + name + "'");
  channels_.emplace_back(std::move(name), std::move(data));
  return channels_.back().second;
}

void TimeSeries::validate() const {
  if (!(dt_ > 0.0)) throw Error(Errc::invalid_input, "dt must be positive");
  for (const auto& c : channels_) {
    if (c.second.size() != size()) throw Error(Errc::invalid_input, "channel '" + c.first + "' length differs");
  }
}

void write_time_series_csv(std::ostream& out, const TimeSeries& series) {
  series.validate();
  out << 't';
  for (const auto& c : series.channels()) out << ',' << c.first;
  out << '\n';
  fmt::memory_buffer line;
  for (std::size_t i = 0; i < series.size(); ++i) {
    line.clear();
    fmt::format_to(std::back_inserter(line), "{:.12g}", series.time(i));
    for (const auto& c : series.channels()) fmt::format_to(std::back_inserter(line), ",{:.12g}", c.second[i]);
    line.push_back('\n');
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
}

TimeSeries simulate(const MotorParameters& params, const VoltageSource& source, const LoadSpec& load,
                    const SimulationOptions& options) {
  params.validate();
  load.validate();
  if (const auto* pattern = std::get_if<SwitchingPattern>(&source)) pattern->validate();
  const double omega_s = source_omega(source);
  if (!(omega_s > 0.0)) throw Error(Errc::invalid_frequency, "omega_s must be positive");

  const double period = kTwoPi / omega_s;
  const double dt = options.dt > 0.0 ? options.dt : period / 20000.0;
  if (dt > period / 2000.0 * (1.0 + 1e-12)) {
    throw Error(Errc::invalid_input, fmt::format("dt {:.6g} s gives fewer than 2000 steps per period", dt));
  }
  if (options.duration < 20.0 * period * (1.0 - 1e-12)) {
    throw Error(Errc::invalid_input, "duration must cover at least 20 fundamental periods");
  }
  if (options.decimation < 1) throw Error(Errc::invalid_input, "decimation must be >= 1");
  if (options.record_from < 0.0 || options.record_from > options.duration) {
    throw Error(Errc::invalid_input, "record_from must lie within the simulated span");
  }

  const Machine machine(params, load, options.fixed_speed.has_value());
  const double speed_limit = 2.0 * omega_s / params.pole_pairs;

  State x{};
  x[4] = options.fixed_speed.value_or(options.initial_speed);

  const auto steps = static_cast<std::size_t>(std::ceil(options.duration / dt - 1e-9));
  const auto decimation = static_cast<std::size_t>(options.decimation);
  std::size_t first = static_cast<std::size_t>(std::ceil(options.record_from / dt - 1e-9));
  first = (first + decimation - 1) / decimation * decimation;

  TimeSeries series(dt * static_cast<double>(decimation), static_cast<double>(first) * dt);
  const std::size_t expected = first <= steps ? (steps - first) / decimation + 1 : 0;
  constexpr std::array<const char*, 8> names{"tau_e", "omega_m", "i_a", "i_b", "i_c", "v_a", "v_b", "v_c"};
  std::array<std::vector<double>, 8> data;
  for (auto& d : data) d.reserve(expected);
  std::array<std::vector<double>*, 8> ch{};
  for (std::size_t i = 0; i < ch.size(); ++i) ch[i] = &data[i];

  const SwitchingPattern* pattern = std::get_if<SwitchingPattern>(&source);
  const std::vector<double> edges = pattern ? switching_edges(*pattern) : std::vector<double>{};

  const auto voltages_at = [&](double t) {
    return pattern ? synthesize_waveform(*pattern, t) : sinusoidal_voltages(std::get<SinusoidalSource>(source), t);
  };

  double energy_in0 = 0.0;
  double energy_mech0 = 0.0;
  const double cell = dt * static_cast<double>(decimation);
  const auto record = [&](double t) {
    const auto c = machine.currents(x);
    const PhaseVoltages v =
        pattern ? mean_phase_voltages(*pattern, t - 0.5 * cell, t + 0.5 * cell) : voltages_at(t);
    ch[0]->push_back(machine.torque(x, c));
    ch[1]->push_back(x[4]);
    ch[2]->push_back(c.isa);
    ch[3]->push_back(-0.5 * c.isa + 0.5 * kSqrt3 * c.isb);
    ch[4]->push_back(-0.5 * c.isa - 0.5 * kSqrt3 * c.isb);
    ch[5]->push_back(v.a);
    ch[6]->push_back(v.b);
    ch[7]->push_back(v.c);
  };

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k == first) {
      energy_in0 = x[5];
      energy_mech0 = x[6];
    }
    if (k >= first && (k - first) % decimation == 0) record(t);
    if (k == steps) break;

    const double t_end = static_cast<double>(k + 1) * dt;
    if (pattern) {
      // Split at every edge inside the step; the voltage is constant between
      // edges, so it is sampled at each sub-interval midpoint.
      const double theta0 = omega_s * t;
      const double base = std::floor(theta0 / kTwoPi) * kTwoPi;
      auto it = std::upper_bound(edges.begin(), edges.end(), theta0 - base);
      double offset = base;
      double from = t;
      for (;;) {
        if (it == edges.end()) {
          it = edges.begin();
          offset += kTwoPi;
        }
        const double edge_t = (offset + *it) / omega_s;
        const double to = std::min(edge_t, t_end);
        if (to - from > 1e-15) {
          const auto v = clarke(synthesize_waveform(*pattern, 0.5 * (from + to)));
          rk4_step(machine, x, from, to - from, [&](double) { return v; });
          from = to;
        }
        if (edge_t >= t_end) break;
        ++it;
      }
    } else {
      rk4_step(machine, x, t, t_end - t, [&](double tv) { return clarke(voltages_at(tv)); });
    }

    if (!std::isfinite(x[4]) || std::abs(x[4]) > speed_limit) {
      throw Error(Errc::instability,
                  fmt::format("rotor speed left the stable region at t = {:.6g} s (|w_m| > 2 w_s / p)", t_end));
    }
  }

  for (std::size_t i = 0; i < names.size(); ++i) series.add_channel(names[i], std::move(data[i]));
  series.electrical_energy_in = x[5] - energy_in0;
  series.mechanical_energy_out = x[6] - energy_mech0;
  return series;
}

TimeSeries simulate(const MotorParameters& params, const SwitchingPattern& pattern, const LoadSpec& load,
                    double duration, double dt) {
  SimulationOptions options;
  options.duration = duration;
  options.dt = dt;
  return simulate(params, VoltageSource{pattern}, load, options);
}

HarmonicComponent harmonic_extract(const TimeSeries& series, std::string_view channel, int order, double omega_s,
                                   const ExtractOptions& options) {
  if (order < 0) throw Error(Errc::invalid_order, "order must be non-negative");
  const Window w = analysis_window(series, omega_s, options.cycles);
  const std::vector<double>& x = series.channel(channel);

  if (options.require_settled) {
    const bool use_current = series.has("i_a");
    const std::vector<double>& ref = use_current ? series.channel("i_a") : x;
    const int ref_order = use_current ? 1 : order;
    if (series.size() < 2 * w.per_period) throw Error(Errc::transient, "fewer than two periods to judge settling");
    const std::size_t last = series.size() - w.per_period;
    const double a1 = correlate(series, ref, last, w.per_period, ref_order, omega_s).amplitude;
    const double a0 = correlate(series, ref, last - w.per_period, w.per_period, ref_order, omega_s).amplitude;
    const double scale = std::max(std::abs(a0), std::abs(a1));
    if (scale > 1e-12 && std::abs(a1 - a0) >= options.settle_tolerance * scale) {
      throw Error(Errc::transient,
                  fmt::format("fundamental drifts {:.3g}% between the last two periods", 100.0 * std::abs(a1 - a0) / scale));
    }
  }
  return correlate(series, x, w.begin, w.length, order, omega_s);
}

double window_mean(const TimeSeries& series, std::string_view channel, double omega_s, int cycles) {
  const Window w = analysis_window(series, omega_s, cycles);
  const std::vector<double>& x = series.channel(channel);
  double sum = 0.0;
  for (std::size_t i = w.begin; i < w.begin + w.length; ++i) sum += x[i];
  return sum / static_cast<double>(w.length);
}

}  // namespace shetorque
