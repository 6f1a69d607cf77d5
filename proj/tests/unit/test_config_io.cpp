#include <filesystem>
#include <fstream>
#include <string>

#include "catch_amalgamated.hpp"
#include "shetorque/config_io.hpp"
#include "shetorque/csv.hpp"
#include "shetorque/errors.hpp"

using namespace shetorque;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::filesystem::path kConfigDir = SHETORQUE_CONFIG_DIR;

Errc code_of_parse(const std::string& text) {
  try {
    parse_experiment_config(text, kConfigDir);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("accepted: " << text);
  return Errc::invalid_input;
}

}  // namespace

TEST_CASE("defaults", "[config_io]") {
  const ExperimentConfig cfg = parse_experiment_config("{}");
  CHECK(cfg.condition == Condition::custom);
  CHECK(cfg.frequency_hz == 50.0);
  CHECK(cfg.v_dc == 560.0);
  CHECK(cfg.load.kind == LoadKind::no_load);
  CHECK(cfg.methods.size() == 4);
  CHECK(cfg.estimator_slips == SlipConvention::as_printed);
  CHECK(!cfg.simulate);
  CHECK(cfg.jobs == 1);
  CHECK(cfg.motor.r_s == 1.85);
}

TEST_CASE("condition presets", "[config_io]") {
  const ExperimentConfig lin45 = parse_experiment_config(R"({"condition": "linear_45"})");
  CHECK(lin45.frequency_hz == 45.0);
  CHECK(lin45.load.kind == LoadKind::linear);
  CHECK_THAT(lin45.load.coefficient, WithinRel(LoadSpec::rated_linear(3000.0, 1415.0).coefficient, 1e-15));
  CHECK_THAT(lin45.omega_s(), WithinRel(kTwoPi * 45.0, 1e-15));

  CHECK(code_of_parse(R"({"condition": "linear_45", "frequency_hz": 50})") == Errc::config);
  CHECK(code_of_parse(R"({"condition": "no_load_50", "load": {"kind": "linear"}})") == Errc::config);
  CHECK(code_of_parse(R"({"condition": "overload"})") == Errc::config);
  CHECK(condition_from_string(to_string(Condition::linear_50)) == Condition::linear_50);
}

TEST_CASE("grids", "[config_io]") {
  const ExperimentConfig a = parse_experiment_config(R"({"mi_grid": {"start": 0.3, "stop": 0.9, "step": 0.1}})");
  REQUIRE(a.mi_grid.size() == 7);
  CHECK_THAT(a.mi_grid.back(), WithinAbs(0.9, 1e-15));
  const ExperimentConfig b = parse_experiment_config(R"({"ratio_grid": {"start": 0, "stop": 2, "count": 5}})");
  CHECK(b.ratio_grid == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  const ExperimentConfig c = parse_experiment_config(R"({"load_grid": [0, 5, 10]})");
  CHECK(c.load_grid.size() == 3);

  CHECK(code_of_parse(R"({"mi_grid": [0.5, 0.4]})") == Errc::config);
  CHECK(code_of_parse(R"({"mi_grid": [1.2]})") == Errc::config);
  CHECK(code_of_parse(R"({"mi_grid": [0]})") == Errc::config);
  CHECK(code_of_parse(R"({"mi_grid": {"start": 0.1, "stop": 0.5}})") == Errc::config);
  CHECK(code_of_parse(R"({"mi_grid": {"start": 0.1, "stop": 0.5, "count": 3, "step": 0.1}})") == Errc::config);
  CHECK(code_of_parse(R"({"mi_grid": ["a"]})") == Errc::config);
  CHECK(code_of_parse(R"({"ratio_grid": [-1]})") == Errc::config);
}

TEST_CASE("malformed and unknown input is a config error", "[config_io]") {
  CHECK(code_of_parse("{") == Errc::config);
  CHECK(code_of_parse("[]") == Errc::config);
  CHECK(code_of_parse(R"({"mi": 0.5})") == Errc::config);
  CHECK(code_of_parse(R"({"methods": ["SVPWM"]})") == Errc::config);
  CHECK(code_of_parse(R"({"methods": ["CLASSIC", "classic"]})") == Errc::config);
  CHECK(code_of_parse(R"({"variants": ["SHE_PWM"]})") == Errc::config);
  CHECK(code_of_parse(R"({"jobs": 0})") == Errc::config);
  CHECK(code_of_parse(R"({"jobs": 1.5})") == Errc::config);
  CHECK(code_of_parse(R"({"simulate": 1})") == Errc::config);
  CHECK(code_of_parse(R"({"v_dc": "560"})") == Errc::config);
  CHECK(code_of_parse(R"({"frequency_hz": -50})") == Errc::config);
  CHECK(code_of_parse(R"({"simulation": {"decimation": 0}})") == Errc::config);
  CHECK(code_of_parse(R"({"simulation": {"steps": 10}})") == Errc::config);
  CHECK(code_of_parse(R"({"load": {"kind": "quadratic"}})") == Errc::config);
  CHECK(code_of_parse(R"({"load": {"kind": "linear", "coefficient": -1}})") == Errc::config);
  CHECK(code_of_parse(R"({"load": {"coefficient": 1}})") == Errc::config);
  CHECK(code_of_parse(R"({"estimator_slips": "other"})") == Errc::config);
  CHECK(code_of_parse(R"({"motor": "missing.json"})") == Errc::config);
}

TEST_CASE("explicit fields", "[config_io]") {
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "v_dc": 600, "frequency_hz": 45, "methods": ["ratio_ii", "SHE"],
    "load": {"kind": "linear", "coefficient": 0.1}, "simulate": true,
    "simulation": {"duration": 1.5, "decimation": 5, "window_cycles": 10},
    "estimator_slips": "field_direction", "classic_ratio": 0.5, "jobs": 3, "ratio": 0.25
  })");
  CHECK(cfg.v_dc == 600.0);
  CHECK(cfg.methods == std::vector<Method>{Method::ratio_ii, Method::she_pwm});
  CHECK(cfg.load.coefficient == 0.1);
  CHECK(cfg.simulation.duration == 1.5);
  CHECK(cfg.simulation.decimation == 5);
  CHECK(cfg.simulation.window_cycles == 10);
  CHECK(cfg.estimator_slips == SlipConvention::field_direction);
  CHECK(cfg.classic_ratio == 0.5);
  CHECK(cfg.jobs == 3);
  REQUIRE(cfg.ratio);
  CHECK(*cfg.ratio == 0.25);
}

TEST_CASE("motor blocks", "[config_io]") {
  const MotorParameters ref = MotorParameters::reference_3kw();
  const MotorParameters leak = parse_motor(motor_to_json(ref));
  CHECK(leak.r_s == ref.r_s);
  CHECK(leak.l_lr == ref.l_lr);
  CHECK(leak.pole_pairs == ref.pole_pairs);

  const MotorParameters self = parse_motor(
      R"({"r_s": 1.85, "r_r": 1.84, "l_s_self": 0.17, "l_r_self": 0.17, "l_m": 0.16, "pole_pairs": 2, "inertia": 0.007})");
  CHECK_THAT(self.l_ls, WithinAbs(0.01, 1e-15));
  CHECK_THAT(self.l_lr, WithinAbs(0.01, 1e-15));

  const auto bad = [](const std::string& text) {
    try {
      parse_motor(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_input;
  };
  CHECK(bad(R"({"r_s": 1, "r_r": 1, "l_ls": 0.01, "l_s_self": 0.1, "l_lr": 0.01, "l_m": 0.1, "pole_pairs": 2, "inertia": 0.1})") ==
        Errc::config);
  CHECK(bad(R"({"r_s": 1, "r_r": 1, "l_lr": 0.01, "l_m": 0.1, "pole_pairs": 2, "inertia": 0.1})") == Errc::config);
  CHECK(bad(R"({"r_s": -1, "r_r": 1, "l_ls": 0.01, "l_lr": 0.01, "l_m": 0.1, "pole_pairs": 2, "inertia": 0.1})") ==
        Errc::config);
  CHECK(bad(R"({"r_s": 1, "r_r": 1, "l_ls": 0.01, "l_lr": 0.01, "l_m": 0.1, "pole_pairs": 2.5, "inertia": 0.1})") ==
        Errc::config);
}

TEST_CASE("shipped configs load", "[config_io]") {
  for (const auto& entry : std::filesystem::directory_iterator(kConfigDir)) {
    if (entry.path().extension() != ".json") continue;
    INFO(entry.path().string());
    if (entry.path().filename() == "motor_3kw.json") {
      const MotorParameters m = load_motor(entry.path());
      CHECK(m.l_m == MotorParameters::reference_3kw().l_m);
    } else {
      CHECK_NOTHROW(load_experiment_config(entry.path()));
    }
  }
  const ExperimentConfig cfg = load_experiment_config(kConfigDir / "single_point.json");
  CHECK(cfg.motor.r_r == 1.84);
  CHECK(cfg.simulate);
}

TEST_CASE("csv formatting", "[config_io]") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_optional(std::nullopt).empty());
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK(t.str() == "a,b\n1,2\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
  CsvTable u({"a", "b"});
  u.add_row({"3", ""});
  t.append(u);
  CHECK(t.size() == 2);
  CHECK(t.str() == "a,b\n1,2\n3,\n");
}
