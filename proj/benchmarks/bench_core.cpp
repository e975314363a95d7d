#include <benchmark/benchmark.h>

#include "uu/datagen.hpp"
#include "uu/estimators.hpp"
#include "uu/optim.hpp"

namespace {

const auto kMix = uu::GaussianMixtureSpec::two_dimensional(0.3);
const auto kPriors = uu::PriorTriple::make(0.3, 0.9, 0.4);

uu::DecisionModel model_for(int kind) {
  return kind == 0 ? uu::init_model(uu::ModelKind::linear, std::vector<std::size_t>{2}, 1)
                   : uu::init_model(uu::ModelKind::mlp, std::vector<std::size_t>{2, 64, 64, 64, 1}, 1);
}

void BM_CorrectedRisk(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pair = uu::sample_u_pair(kMix, {n, n, 0.9, 0.4, 2});
  const auto m = model_for(static_cast<int>(state.range(1)));
  const auto loss = uu::LossSpec::of(uu::LossKind::sigmoid);
  for (auto _ : state)
    benchmark::DoNotOptimize(uu::empirical_risk_uu(m, pair.first, pair.second, kPriors, loss).value);
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(2 * n));
}
BENCHMARK(BM_CorrectedRisk)->ArgsProduct({{128, 4096}, {0, 1}});

void BM_RiskGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pair = uu::sample_u_pair(kMix, {n, n, 0.9, 0.4, 3});
  const auto m = model_for(static_cast<int>(state.range(1)));
  const auto coeffs = uu::correction_coefficients(kPriors);
  const auto loss = uu::LossSpec::of(uu::LossKind::sigmoid);
  for (auto _ : state)
    benchmark::DoNotOptimize(uu::risk_gradient(m, pair.first.features, pair.second.features, coeffs, loss));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(2 * n));
}
BENCHMARK(BM_RiskGradient)->ArgsProduct({{128, 4096}, {0, 1}});

void BM_TrainEpoch(benchmark::State& state) {
  const auto pair = uu::sample_u_pair(kMix, {2000, 1000, 0.9, 0.4, 4});
  const auto m = model_for(static_cast<int>(state.range(0)));
  uu::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 128;
  for (auto _ : state) benchmark::DoNotOptimize(uu::train(m, pair.first, pair.second, kPriors, cfg).history.batches);
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SampleUPair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(uu::sample_u_pair(kMix, {n, n, 0.9, 0.4, 5}).first.features.sum());
}
BENCHMARK(BM_SampleUPair)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
