// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <filesystem>

#include "secsci/io.hpp"

using namespace secsci;

namespace {

io::json fixture(const char* name) { return io::read_json(std::filesystem::path(SECSCI_FIXTURE_DIR) / name); }

void BM_ClassifySheep(benchmark::State& state) {
  auto set = io::property_set_from_json(fixture("sheep-properties.json"));
  for (auto _ : state)
    for (const auto& p : set.properties) benchmark::DoNotOptimize(classify(p.property));
}
BENCHMARK(BM_ClassifySheep);

void BM_DecomposeQa(benchmark::State& state) {
  auto set = io::property_set_from_json(fixture("qa.json"));
  const auto kind = static_cast<DecompositionKind>(state.range(0));
  for (auto _ : state)
    for (const auto& p : set.properties) benchmark::DoNotOptimize(decompose(p.property, kind));
}
BENCHMARK(BM_DecomposeQa)->DenseRange(0, 2);

// Exact self-composition against bounded enumeration as the floor count grows.
void BM_ElevatorExact(benchmark::State& state) {
  auto m = make_elevator(static_cast<int>(state.range(0)), {"A", "B"});
  for (auto _ : state) benchmark::DoNotOptimize(check_noninterference(m, "B", NonintMode::ExactDeterministic, 0));
}
BENCHMARK(BM_ElevatorExact)->DenseRange(2, 5);

void BM_ElevatorBounded(benchmark::State& state) {
  auto m = make_elevator(2, {"A", "B"});
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(check_noninterference(m, "B", NonintMode::Bounded, n));
}
BENCHMARK(BM_ElevatorBounded)->DenseRange(2, 6, 2);

void BM_ProbNoninterference(benchmark::State& state) {
  auto m = io::prob_channel_from_json(fixture("noisy-echo.json"));
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(check_prob_noninterference(m, "B", n));
}
BENCHMARK(BM_ProbNoninterference)->DenseRange(2, 4);

void BM_BayesMontyHall(benchmark::State& state) {
  auto f = io::stochastic_from_json(fixture("montyhall.json"));
  for (auto _ : state) benchmark::DoNotOptimize(bayes_invert(f.channel, *f.prior));
}
BENCHMARK(BM_BayesMontyHall);

void BM_LoweAttack(benchmark::State& state) {
  auto p = io::protocol_from_json(fixture("nspk.json"));
  auto s = io::scenario_from_json(fixture("nspk-lowe.json"), p);
  for (auto _ : state) benchmark::DoNotOptimize(search_attack(p, s));
}
BENCHMARK(BM_LoweAttack)->Unit(benchmark::kMillisecond);

void BM_FixedThreeSessions(benchmark::State& state) {
  auto p = io::protocol_from_json(fixture("nspk-fixed.json"));
  auto s = io::scenario_from_json(fixture("nspk-three.json"), p);
  for (auto _ : state) benchmark::DoNotOptimize(search_attack(p, s));
}
BENCHMARK(BM_FixedThreeSessions)->Unit(benchmark::kMillisecond);

void BM_AnonymizeVehicles(benchmark::State& state) {
  const auto dir = std::filesystem::path(SECSCI_FIXTURE_DIR);
  auto f = io::privacy_from_json(fixture("vehicles.json"), dir);
  for (auto _ : state) benchmark::DoNotOptimize(anonymize(f.table, f.k, f.quasi, f.hierarchies, f.suppression_budget));
}
BENCHMARK(BM_AnonymizeVehicles);

void BM_LaplaceSampler(benchmark::State& state) {
  LaplaceSampler rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng(1.0));
}
BENCHMARK(BM_LaplaceSampler);

}  // namespace

BENCHMARK_MAIN();
