#include "fixtures.hpp"

#include "ahmc/dtmc.hpp"
#include "ahmc/encoder.hpp"
#include "ahmc/oracle.hpp"

#include <benchmark/benchmark.h>

using namespace ahmc;

namespace {

void BM_InduceDtmc(benchmark::State& state) {
  const auto fixture = buildACDB();
  const auto m = static_cast<std::size_t>(state.range(0));
  const MemorylessScheduler sched = MemorylessScheduler::uniform(fixture.mdp);
  CountingStutterScheduler tau(m);
  for (StateIndex s = 0; s < fixture.mdp.numStates(); ++s)
    for (ActionIndex a : fixture.mdp.enabledActions(s)) tau.set(s, a, (s + a) % m);
  for (auto _ : state) benchmark::DoNotOptimize(induceDtmc(fixture.mdp, sched, tau));
}
BENCHMARK(BM_InduceDtmc)->Arg(1)->Arg(2)->Arg(4);

void BM_UntilProbabilities(benchmark::State& state) {
  const auto fixture = buildTL(static_cast<std::size_t>(state.range(0)));
  const InducedDtmc d =
      induceDtmc(fixture.mdp, MemorylessScheduler::uniform(fixture.mdp), CountingStutterScheduler(2));
  StateSet all(d.chain.size(), true), target(d.chain.size(), false);
  for (StateIndex s = 0; s < d.chain.size(); ++s) target[s] = d.chain.labels[s].count("j0") != 0;
  for (auto _ : state) benchmark::DoNotOptimize(untilProbabilities(d.chain, all, target));
  state.counters["states"] = static_cast<double>(d.chain.size());
}
BENCHMARK(BM_UntilProbabilities)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_EncodeCE(benchmark::State& state) {
  const auto fixture = buildCE(0, static_cast<std::size_t>(state.range(0)));
  const HyperFormula f = parseFormula(fixture.formula);
  for (auto _ : state) benchmark::DoNotOptimize(encode(fixture.mdp, f, 2));
}
BENCHMARK(BM_EncodeCE)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EncodeACDB(benchmark::State& state) {
  const auto fixture = buildACDB();
  const HyperFormula f = parseFormula(fixture.formula);
  for (auto _ : state) benchmark::DoNotOptimize(encode(fixture.mdp, f, 2).toSmtLib());
}
BENCHMARK(BM_EncodeACDB)->Unit(benchmark::kMillisecond);

void BM_ParseFormula(benchmark::State& state) {
  const std::string text = buildACDB().formula;
  for (auto _ : state) benchmark::DoNotOptimize(parseFormula(text));
}
BENCHMARK(BM_ParseFormula);

}  // namespace
BENCHMARK_MAIN();
