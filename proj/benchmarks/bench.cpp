#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "mas/scenario.hpp"
#include "slick/parse.hpp"

namespace {

mas::ScenarioSpec scenario(const std::string& name) {
  return mas::load_scenario(mas::resolve_scenario_dir(name));
}

// Parsing the largest bundled policy text.
void BM_ParseAgreement(benchmark::State& state) {
  std::string src = scenario("scenario1").statements.at("consortium 1").source;
  for (auto _ : state)
    benchmark::DoNotOptimize(slick::parse_policy(src));
}
BENCHMARK(BM_ParseAgreement);

// Evaluating the extraction of a full scenario-1 payload.
void BM_EvalPayload(benchmark::State& state) {
  mas::ScenarioSpec spec = scenario("scenario1");
  std::vector<mas::Message> payload = {
      spec.statements.at("consortium 1"),
      mas::reflect_actor(slick::Fact::leaf("st-antonius")),
      spec.statements.at("surf 1"),
      spec.statements.at("amy 1"),
      spec.statements.at("st-antonius 1"),
      spec.statements.at("st-antonius 2"),
  };
  slick::Policy policy = mas::extract(payload);
  for (auto _ : state)
    benchmark::DoNotOptimize(slick::eval(policy));
}
BENCHMARK(BM_EvalPayload);

// A runaway program that hits the derivation bound.
void BM_EvalBounded(benchmark::State& state) {
  slick::Policy policy = slick::parse_policy("f X if X. x.").policy;
  std::size_t bound = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(slick::eval(policy, bound));
}
BENCHMARK(BM_EvalBounded)->Arg(1000)->Arg(30000);

// Whole scenario runs, end to end.
void BM_RunScenario(benchmark::State& state) {
  static const char* names[] = {"scenario1", "scenario2", "scenario3",
                                "scenario4", "scenario5"};
  mas::ScenarioSpec spec = scenario(names[state.range(0)]);
  for (auto _ : state)
    benchmark::DoNotOptimize(mas::run_scenario(spec));
}
BENCHMARK(BM_RunScenario)->DenseRange(0, 4);

// Replay of the longest scenario trace.
void BM_ReplayScenario(benchmark::State& state) {
  mas::RunResult r = mas::run_scenario(scenario("scenario3"));
  for (auto _ : state)
    benchmark::DoNotOptimize(mas::replay(r.trace));
}
BENCHMARK(BM_ReplayScenario);

}  // namespace

BENCHMARK_MAIN();
