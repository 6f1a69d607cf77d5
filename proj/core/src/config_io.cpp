#include "shetorque/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "shetorque/errors.hpp"

namespace shetorque {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw Error(Errc::config, message); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
}

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  for (const auto& item : obj.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      fail(fmt::format("unknown key '{}' in {}", item.key(), where));
    }
  }
}

double number(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(fmt::format("'{}' must be a number", key));
  return v.get<double>();
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(fmt::format("'{}' must be a boolean", key));
    out = v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(fmt::format("'{}' must be an integer", key));
    out = v.get<T>();
  } else {
    out = number(obj, key);
  }
}

// A list of numbers, or {"start", "stop", "count"} / {"start", "stop", "step"}.
std::vector<double> grid(const json& v, const char* key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const json& x : v) {
      if (!x.is_number()) fail(fmt::format("'{}' entries must be numbers", key));
      out.push_back(x.get<double>());
    }
    return out;
  }
  if (!v.is_object()) fail(fmt::format("'{}' must be a list or a range object", key));
  reject_unknown(v, key, {"start", "stop", "count", "step"});
  const double start = number(v, "start");
  const double stop = number(v, "stop");
  if (v.contains("count") == v.contains("step")) fail(fmt::format("'{}' range needs exactly one of count, step", key));
  std::size_t count = 0;
  if (v.contains("count")) {
    if (!v.at("count").is_number_integer() || v.at("count").get<long>() < 1) {
      fail(fmt::format("'{}' count must be a positive integer", key));
    }
    count = v.at("count").get<std::size_t>();
  } else {
    const double step = number(v, "step");
    if (!(step > 0.0)) fail(fmt::format("'{}' step must be positive", key));
    count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  }
  if (count == 1) return {start};
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

std::vector<Method> methods(const json& v, const char* key) {
  if (!v.is_array()) fail(fmt::format("'{}' must be a list", key));
  std::vector<Method> out;
  for (const json& x : v) {
    if (!x.is_string()) fail(fmt::format("'{}' entries must be strings", key));
    try {
      const Method m = method_from_string(x.get<std::string>());
      if (std::find(out.begin(), out.end(), m) != out.end()) fail(fmt::format("duplicate method in '{}'", key));
      out.push_back(m);
    } catch (const Error& e) {
      if (e.code() == Errc::config) throw;
      fail(e.what());
    }
  }
  return out;
}

MotorParameters motor_from(const json& obj) {
  if (!obj.is_object()) fail("motor must be an object");
  reject_unknown(obj, "motor", {"r_s", "r_r", "l_ls", "l_lr", "l_s_self", "l_r_self", "l_m", "pole_pairs", "inertia"});
  MotorParameters m;
  try {
    m.r_s = number(obj, "r_s");
    m.r_r = number(obj, "r_r");
    m.l_m = number(obj, "l_m");
    m.inertia = number(obj, "inertia");
    if (!obj.at("pole_pairs").is_number_integer()) fail("'pole_pairs' must be an integer");
    m.pole_pairs = obj.at("pole_pairs").get<int>();
    const auto leakage = [&](const char* leak, const char* self) {
      if (obj.contains(leak) == obj.contains(self)) fail(fmt::format("motor needs exactly one of {}, {}", leak, self));
      return obj.contains(leak) ? number(obj, leak) : number(obj, self) - m.l_m;
    };
    m.l_ls = leakage("l_ls", "l_s_self");
    m.l_lr = leakage("l_lr", "l_r_self");
  } catch (const json::out_of_range& e) {
    fail(std::string("motor: ") + e.what());
  }
  try {
    m.validate();
  } catch (const Error& e) {
    fail(std::string("motor: ") + e.what());
  }
  return m;
}

struct Preset {
  double frequency_hz;
  LoadKind load;
};

std::optional<Preset> preset(Condition c) {
  switch (c) {
    case Condition::no_load_50: return Preset{50.0, LoadKind::no_load};
    case Condition::linear_50: return Preset{50.0, LoadKind::linear};
    case Condition::linear_45: return Preset{45.0, LoadKind::linear};
    case Condition::custom: return std::nullopt;
  }
  return std::nullopt;
}

LoadSpec load_from(const json& v) {
  if (!v.is_object()) fail("'load' must be an object");
  reject_unknown(v, "load", {"kind", "coefficient"});
  LoadSpec spec;
  const std::string kind = v.value("kind", std::string("no_load"));
  if (kind == "no_load") {
    if (v.contains("coefficient")) fail("no_load takes no coefficient");
    return spec;
  }
  if (kind != "linear") fail("load kind must be no_load or linear");
  spec.kind = LoadKind::linear;
  spec.coefficient = v.contains("coefficient")
                         ? number(v, "coefficient")
                         : LoadSpec::rated_linear(kRatedPowerW, kRatedSpeedRpm).coefficient;
  return spec;
}

}  // namespace

std::string_view to_string(Condition condition) noexcept {
  switch (condition) {
    case Condition::no_load_50: return "no_load_50";
    case Condition::linear_50: return "linear_50";
    case Condition::linear_45: return "linear_45";
    case Condition::custom: return "custom";
  }
  return "custom";
}

Condition condition_from_string(std::string_view text) {
  for (Condition c : {Condition::no_load_50, Condition::linear_50, Condition::linear_45, Condition::custom}) {
    if (text == to_string(c)) return c;
  }
  fail("unknown condition '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz)) fail("frequency_hz must be positive");
  if (!(v_dc > 0.0) || !std::isfinite(v_dc)) fail("v_dc must be positive");
  for (std::size_t i = 0; i < mi_grid.size(); ++i) {
    if (!(mi_grid[i] > 0.0 && mi_grid[i] <= 1.0)) fail(fmt::format("mi_grid value {} is outside (0, 1]", mi_grid[i]));
    if (i > 0 && !(mi_grid[i] > mi_grid[i - 1])) fail("mi_grid must be strictly increasing");
  }
  for (double r : ratio_grid) {
    if (!(r >= 0.0) || !std::isfinite(r)) fail("ratio_grid values must be non-negative");
  }
  for (double t : load_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) fail("load_grid values must be non-negative");
  }
  for (Method v : variants) {
    if (v == Method::she_pwm) fail("SHE_PWM has no ratio curve");
  }
  if (ratio && !(*ratio >= 0.0)) fail("ratio must be non-negative");
  if (!(classic_ratio >= 0.0)) fail("classic_ratio must be non-negative");
  if (!(phase_voltage > 0.0)) fail("phase_voltage must be positive");
  if (jobs < 1) fail("jobs must be >= 1");
  if (!(simulation.duration > 0.0) || simulation.dt < 0.0 || simulation.decimation < 1 ||
      simulation.window_cycles < 1) {
    fail("simulation settings out of range");
  }
  if (const auto p = preset(condition)) {
    if (std::abs(p->frequency_hz - frequency_hz) > 1e-12) fail("frequency_hz conflicts with condition");
    if (p->load != load.kind) fail("load kind conflicts with condition");
  }
  try {
    motor.validate();
    load.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

MotorParameters parse_motor(std::string_view json_text) {
  try {
    return motor_from(parse_text(json_text));
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

MotorParameters load_motor(const std::filesystem::path& path) { return parse_motor(read_file(path)); }

std::string motor_to_json(const MotorParameters& m) {
  const json obj = {{"r_s", m.r_s},       {"r_r", m.r_r},
                    {"l_ls", m.l_ls},     {"l_lr", m.l_lr},
                    {"l_m", m.l_m},       {"pole_pairs", m.pole_pairs},
                    {"inertia", m.inertia}};
  return obj.dump(2) + "\n";
}

namespace {

ExperimentConfig config_from(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json root = parse_text(json_text);
  if (!root.is_object()) fail("config must be a JSON object");
  reject_unknown(root, "config",
                 {"motor", "v_dc", "frequency_hz", "condition", "mi_grid", "methods", "load", "simulate",
                  "simulation", "estimator_slips", "classic_ratio", "jobs", "variants", "ratio_grid", "load_grid",
                  "phase_voltage", "ratio"});
  ExperimentConfig cfg;

  if (root.contains("condition")) {
    if (!root.at("condition").is_string()) fail("'condition' must be a string");
    cfg.condition = condition_from_string(root.at("condition").get<std::string>());
    if (const auto p = preset(cfg.condition)) {
      cfg.frequency_hz = p->frequency_hz;
      cfg.load = p->load == LoadKind::linear ? LoadSpec::rated_linear(kRatedPowerW, kRatedSpeedRpm) : LoadSpec{};
    }
  }

  if (root.contains("motor")) {
    const json& m = root.at("motor");
    if (m.is_string()) {
      std::filesystem::path p = m.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      cfg.motor = load_motor(p);
    } else {
      cfg.motor = motor_from(m);
    }
  }

  maybe(root, "v_dc", cfg.v_dc);
  maybe(root, "frequency_hz", cfg.frequency_hz);
  if (root.contains("mi_grid")) cfg.mi_grid = grid(root.at("mi_grid"), "mi_grid");
  if (root.contains("methods")) cfg.methods = methods(root.at("methods"), "methods");
  if (root.contains("load")) cfg.load = load_from(root.at("load"));
  maybe(root, "simulate", cfg.simulate);
  if (root.contains("simulation")) {
    const json& s = root.at("simulation");
    if (!s.is_object()) fail("'simulation' must be an object");
    reject_unknown(s, "simulation", {"duration", "dt", "decimation", "window_cycles"});
    maybe(s, "duration", cfg.simulation.duration);
    maybe(s, "dt", cfg.simulation.dt);
    maybe(s, "decimation", cfg.simulation.decimation);
    maybe(s, "window_cycles", cfg.simulation.window_cycles);
  }
  if (root.contains("estimator_slips")) {
    const json& v = root.at("estimator_slips");
    if (!v.is_string()) fail("'estimator_slips' must be a string");
    try {
      cfg.estimator_slips = slip_convention_from_string(v.get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  maybe(root, "classic_ratio", cfg.classic_ratio);
  maybe(root, "jobs", cfg.jobs);
  if (root.contains("variants")) cfg.variants = methods(root.at("variants"), "variants");
  if (root.contains("ratio_grid")) cfg.ratio_grid = grid(root.at("ratio_grid"), "ratio_grid");
  if (root.contains("load_grid")) cfg.load_grid = grid(root.at("load_grid"), "load_grid");
  maybe(root, "phase_voltage", cfg.phase_voltage);
  if (root.contains("ratio")) {
    double r = 0.0;
    maybe(root, "ratio", r);
    cfg.ratio = r;
  }

  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  try {
    return config_from(json_text, base_dir);
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_file(path), path.parent_path());
}

}  // namespace shetorque
