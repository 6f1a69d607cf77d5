#include <benchmark/benchmark.h>

#include "shetorque/angle_solver.hpp"
#include "shetorque/drive_simulator.hpp"

using namespace shetorque;

static void BM_SolveShe(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_she_pwm(0.8));
}
BENCHMARK(BM_SolveShe);

static void BM_SolveRatio(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_ratio(0.8, 0.3, Method::ratio_ii));
}
BENCHMARK(BM_SolveRatio);

static void BM_MaxMi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(max_mi(0.7, Method::ratio_ii));
}
BENCHMARK(BM_MaxMi)->Unit(benchmark::kMillisecond);

static void BM_FourierSpectrum(benchmark::State& state) {
  const SwitchingPattern p = solve_she_pwm(0.8).pattern;
  const std::vector<int> orders = nontriplen_orders(97);
  for (auto _ : state) benchmark::DoNotOptimize(voltage_spectrum(p, orders));
}
BENCHMARK(BM_FourierSpectrum);

static void BM_Simulate20Periods(benchmark::State& state) {
  const SwitchingPattern p = classic_angles(0.8).pattern;
  const MotorParameters motor = MotorParameters::reference_3kw();
  SimulationOptions opt;
  opt.duration = 0.4;
  opt.record_from = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(motor, VoltageSource{p}, LoadSpec::linear(0.1), opt));
}
BENCHMARK(BM_Simulate20Periods)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
