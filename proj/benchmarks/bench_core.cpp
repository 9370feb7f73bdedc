#include <benchmark/benchmark.h>

#include <random>

#include "riskscore/distributions.hpp"
#include "riskscore/inference.hpp"
#include "riskscore/prob_model.hpp"
#include "riskscore/risk_engine.hpp"
#include "riskscore/store_io.hpp"

namespace {

using namespace riskscore;

constexpr Minutes kOnset = 18'400 * kMinutesPerDay + kNoonOffset;

SourceReport synthetic_report(const SourceId& source, int events, int recipients, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Minutes> offset(-6 * kMinutesPerDay, kMinutesPerDay);
  std::uniform_real_distribution<double> minutes(1.0, 60.0);
  std::uniform_real_distribution<double> metres(0.5, 5.0);
  std::uniform_int_distribution<int> who(0, recipients - 1);
  SourceReport r{source, kOnset, kOnset + 2 * kMinutesPerDay, {}, 1.0};
  for (int i = 0; i < events; ++i) {
    r.events.push_back({source, "r" + std::to_string(who(rng)), kOnset + offset(rng), minutes(rng), metres(rng), {}, 1.0});
  }
  return r;
}

void BM_EventRisk(benchmark::State& state) {
  const RiskParams params;
  const SourceReport report = synthetic_report("s", 1, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(event_risk(report.events[0], report, params));
}
BENCHMARK(BM_EventRisk);

void BM_PairRisk(benchmark::State& state) {
  const RiskParams params;
  const SourceReport report = synthetic_report("s", static_cast<int>(state.range(0)), 1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pair_risk(report, "r0", params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PairRisk)->Arg(100)->Arg(10'000);

void BM_IngestReport(benchmark::State& state) {
  const RiskParams params;
  const SourceReport report = synthetic_report("s", 500, 50, 3);
  for (auto _ : state) {
    EventStore store;
    benchmark::DoNotOptimize(store.ingest_report(report, params));
  }
}
BENCHMARK(BM_IngestReport);

void BM_SampleDifference(benchmark::State& state) {
  const EpiDistributions epi;
  for (auto _ : state) benchmark::DoNotOptimize(sample_difference(epi, static_cast<std::size_t>(state.range(0)), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleDifference)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_BuildSumCdf(benchmark::State& state) {
  const EpiDistributions epi;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_sum_cdf(epi, static_cast<std::size_t>(state.range(0)), 0.05, 1));
  }
}
BENCHMARK(BM_BuildSumCdf)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_SymptomFree(benchmark::State& state) {
  const ProbParams params{0.9, 0.175, build_sum_cdf(EpiDistributions{}, 100'000, 0.05, 1)};
  RecipientExposure exposure{"r", {}};
  for (int i = 0; i < state.range(0); ++i) exposure.events.push_back({i * 360.0, 0.2});
  const double t = exposure.latest_event_time() + 5.0 * kMinutesPerDay;
  for (auto _ : state) benchmark::DoNotOptimize(symptom_free_infection_probability(exposure, t, params));
}
BENCHMARK(BM_SymptomFree)->Arg(1)->Arg(16);

void BM_PosteriorGrid(benchmark::State& state) {
  const OutcomeDataset data = simulate_outcomes(0.3, static_cast<std::size_t>(state.range(0)), {0.5, 3.0}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_grid(data, 1024));
}
BENCHMARK(BM_PosteriorGrid)->Arg(500)->Arg(5'000)->Unit(benchmark::kMillisecond);

void BM_PosteriorMcmc(benchmark::State& state) {
  const OutcomeDataset data = simulate_outcomes(0.3, 500, {0.5, 3.0}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_mcmc(data, 20'000, 4'000, 0.5, 1));
}
BENCHMARK(BM_PosteriorMcmc)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
