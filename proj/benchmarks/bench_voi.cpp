#include <benchmark/benchmark.h>

#include "voi/evppi.hpp"
#include "voi/mm.hpp"
#include "voi/models/chemo.hpp"
#include "voi/models/toy.hpp"
#include "voi/psa.hpp"

namespace {

const voi::PsaResult& toy_psa() {
  static const auto psa = voi::simulate_psa(voi::models::ToyModel(), 10'000, 1, 1);
  return psa;
}

void BM_SimulatePsaToy(benchmark::State& state) {
  const voi::models::ToyModel toy;
  for (auto _ : state) benchmark::DoNotOptimize(voi::simulate_psa(toy, static_cast<std::size_t>(state.range(0)), 1, 1));
}
BENCHMARK(BM_SimulatePsaToy)->Arg(1'000)->Arg(10'000);

void BM_SelectQuantileRows(benchmark::State& state) {
  const voi::FocalSubset focal({0}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(voi::select_quantile_rows(toy_psa(), focal, 50));
}
BENCHMARK(BM_SelectQuantileRows);

void BM_FitConditionalInb(benchmark::State& state) {
  const voi::FocalSubset focal({0}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(voi::fit_conditional_inb(toy_psa(), focal));
}
BENCHMARK(BM_FitConditionalInb)->Unit(benchmark::kMillisecond);

void BM_NestedPosteriorVariance(benchmark::State& state) {
  const voi::models::ToyModel toy;
  const voi::models::ToyGenerator gen(20);
  const double phi[] = {0.4};
  std::size_t q = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(voi::nested_posterior_variance(toy, voi::FocalSubset({0}, 3), gen, phi,
                                                            static_cast<std::size_t>(state.range(0)), 1, q++));
}
BENCHMARK(BM_NestedPosteriorVariance)->Arg(1'000)->Arg(5'000);

void BM_ChemoInb(benchmark::State& state) {
  const voi::models::ChemoModel chemo;
  auto rng = voi::derive_stream(1, voi::stream_id(voi::StreamPurpose::Test, 0));
  const auto pv = chemo.draw_prior(rng);
  for (auto _ : state) benchmark::DoNotOptimize(voi::models::chemo_inb(chemo, pv));
}
BENCHMARK(BM_ChemoInb);

void BM_EvsiMomentMatchingToy(benchmark::State& state) {
  const voi::models::ToyModel toy;
  const voi::models::ToyGenerator gen(20);
  const auto cinb = voi::fit_conditional_inb(toy_psa(), voi::FocalSubset({0}, 3));
  voi::MmConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(voi::evsi_moment_matching(toy, toy_psa(), cinb, gen, cfg));
}
BENCHMARK(BM_EvsiMomentMatchingToy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
