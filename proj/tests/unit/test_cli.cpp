#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "catch_amalgamated.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = SHETORQUE_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = std::string(SHETORQUE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "shetorque_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  const std::string text = read(p);
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("solve writes a table") {
  const fs::path out = scratch() / "solve.csv";
  fs::remove(out);
  REQUIRE(run("solve --config " + (kConfigs / "solve.json").string() + " --out " + out.string()) == 0);
  CHECK(first_line(out) == "mi,method,alpha1_deg,alpha2_deg,v1,v5,v7,residual,branch,status");
}

TEST_CASE("sweep without simulation") {
  const fs::path cfg = write_config("sweep.json", R"({"condition": "linear_50", "mi_grid": [0.6, 0.8]})");
  const fs::path out = scratch() / "sweep.csv";
  REQUIRE(run("sweep --config " + cfg.string() + " --out " + out.string() + " --jobs 2") == 0);
  CHECK(first_line(out) ==
        "condition,mi,method,slip,alpha1_deg,alpha2_deg,v5_over_v7,predicted_a6,simulated_a6,status,residual");
  const std::string text = read(out);
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}

TEST_CASE("phase sweep with a motor override") {
  const fs::path out = scratch() / "phase.csv";
  REQUIRE(run("phase-sweep --config " + (kConfigs / "phase_sweep.json").string() + " --motor " +
              (kConfigs / "motor_3kw.json").string() + " --out " + out.string()) == 0);
  CHECK(first_line(out) == "load_nm,slip,phi1_deg,status");
}

TEST_CASE("max-mi on a short grid") {
  const fs::path cfg = write_config("maxmi.json", R"({"ratio_grid": [0.5, 1.0], "variants": ["RATIO_II"]})");
  const fs::path out = scratch() / "maxmi.csv";
  REQUIRE(run("max-mi --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(first_line(out) == "variant,ratio,mi_max,alpha1_deg,alpha2_deg,status");
}

TEST_CASE("simulate writes a time series") {
  const fs::path cfg = write_config(
      "sim.json", R"({"mi_grid": [0.8], "methods": ["SHE_PWM"], "simulation": {"duration": 0.4, "decimation": 100}})");
  const fs::path out = scratch() / "sim.csv";
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(first_line(out) == "t,tau_e,omega_m,i_a,i_b,i_c,v_a,v_b,v_c");
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(run("sweep --config " + (scratch() / "does_not_exist.json").string()) == 2);
  CHECK(run("sweep --config " + write_config("bad.json", "{ not json").string()) == 2);
  CHECK(run("sweep --config " + write_config("unknown.json", R"({"mi_grid": [0.5], "colour": 1})").string()) == 2);
  CHECK(run("sweep --config " + write_config("empty.json", "{}").string()) == 2);
  CHECK(run("sweep") == 2);
  CHECK(run("frobnicate --config x.json") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("an all-infeasible grid exits with 3") {
  const fs::path cfg = write_config("infeasible.json", R"({"mi_grid": [0.99], "methods": ["SHE_PWM"]})");
  CHECK(run("sweep --config " + cfg.string()) == 3);
  CHECK(run("solve --config " + cfg.string()) == 3);
}
