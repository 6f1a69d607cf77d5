#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "shetorque/errors.hpp"
#include "shetorque/load.hpp"

using namespace shetorque;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const MotorParameters kMotor = MotorParameters::reference_3kw();
const double kOmega50 = kTwoPi * 50.0;
const double kNameplateVolts = 380.0 * std::sqrt(2.0) / std::sqrt(3.0);
}  // namespace

TEST_CASE("rated linear load puts nameplate torque at nameplate speed", "[load]") {
  const LoadSpec load = LoadSpec::rated_linear(kRatedPowerW, kRatedSpeedRpm);
  const double w = kRatedSpeedRpm * kTwoPi / 60.0;
  CHECK(load.kind == LoadKind::linear);
  CHECK_THAT(load.coefficient, WithinRel(3000.0 / (w * w), 1e-14));
  CHECK_THAT(load.torque(w), WithinAbs(20.246, 1e-3));
  CHECK(LoadSpec::none().torque(100.0) == 0.0);
}

TEST_CASE("load validation", "[load]") {
  try {
    LoadSpec::linear(-0.1);
    FAIL("negative coefficient accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_input);
  }
  CHECK_NOTHROW(LoadSpec::linear(0.0));
}

TEST_CASE("equilibrium slip balances the load line", "[load]") {
  CHECK(equilibrium_slip(kMotor, kNameplateVolts, kOmega50, LoadSpec::none()) == 0.0);

  const LoadSpec load = LoadSpec::rated_linear(kRatedPowerW, kRatedSpeedRpm);
  const double s = equilibrium_slip(kMotor, kNameplateVolts, kOmega50, load);
  CHECK(s > 0.0);
  CHECK(s < breakdown_slip(kMotor, kOmega50));
  const double te = oracle::thevenin_torque(kMotor, kNameplateVolts, s, kOmega50);
  CHECK_THAT(te, WithinRel(load.torque(rotor_speed(s, kOmega50, 2)), 1e-9));
}

TEST_CASE("load beyond breakdown is reported", "[load]") {
  try {
    equilibrium_slip(kMotor, 50.0, kOmega50, LoadSpec::linear(5.0));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unstable_region);
  }
  try {
    slip_for_torque(kMotor, kNameplateVolts, kOmega50, 1000.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unstable_region);
  }
}

TEST_CASE("slip for constant torque", "[load]") {
  CHECK(slip_for_torque(kMotor, kNameplateVolts, kOmega50, 0.0) == 0.0);
  const double s = slip_for_torque(kMotor, kNameplateVolts, kOmega50, 10.0);
  CHECK_THAT(oracle::thevenin_torque(kMotor, kNameplateVolts, s, kOmega50), WithinRel(10.0, 1e-9));
}
