// Serial reference vs OpenMP kernels, plus one full batch gradient at a
// realistic embedding width.

#include <benchmark/benchmark.h>

#include "aqtc/kernels.hpp"
#include "aqtc/model.hpp"
#include "aqtc/rng.hpp"
#include "aqtc/trainer.hpp"

namespace {

aqtc::Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  aqtc::Rng rng(seed);
  aqtc::Matrix m(r, c);
  for (auto& v : m.data) v = rng.uniform(-1.0, 1.0);
  return m;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  aqtc::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <auto Kernel>
void BM_gemv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_matrix(n, n, 1);
  const auto x = random_vector(n, 2);
  std::vector<double> y(n);
  for (auto _ : state) {
    Kernel(m, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

template <auto Kernel>
void BM_ger(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = random_matrix(n, n, 1);
  const auto g = random_vector(n, 2);
  const auto x = random_vector(n, 3);
  for (auto _ : state) {
    Kernel(g, x, m);
    benchmark::DoNotOptimize(m.data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}

void BM_batch_gradients(benchmark::State& state) {
  aqtc::ModelConfig cfg;
  cfg.dim_t = cfg.dim_v = static_cast<std::uint32_t>(state.range(0));
  cfg.hidden = 128;
  cfg.mlp_hidden = 512;
  const auto params = aqtc::ModelParams::initialize(cfg);

  std::vector<aqtc::SampleFeatures> samples(8);
  std::uint64_t seed = 10;
  for (auto& s : samples) {
    s.functions = random_matrix(6, cfg.function_dim(), seed++);
    s.tfidf_weights.assign(6, 1.0 / 6.0);
    s.question = random_vector(cfg.dim_t, seed++);
    for (int i = 0; i < 2; ++i) s.steps.push_back({random_matrix(4, cfg.answer_dim(), seed++), 0});
  }
  std::vector<aqtc::BatchInstance> batch;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    batch.push_back({s, 0});
    batch.push_back({s, 1});
  }
  aqtc::Gradients grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aqtc::batch_gradients(params, cfg, samples, batch, true, grads));
  }
}

}  // namespace

BENCHMARK(BM_gemv<aqtc::kernels::serial::gemv>)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_gemv<aqtc::kernels::omp::gemv>)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_ger<aqtc::kernels::serial::ger_acc>)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_ger<aqtc::kernels::omp::ger_acc>)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_batch_gradients)->Arg(64)->Arg(768)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
