#include <benchmark/benchmark.h>

#include "ooc/evaluation.hpp"
#include "ooc/layers.hpp"
#include "ooc/synth.hpp"
#include "ooc/tensor.hpp"

using namespace ooc;

namespace {

void bm_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  Tensor a = Tensor::uniform(n, n, -1, 1, rng);
  Tensor b = Tensor::uniform(n, n, -1, 1, rng);
  for (auto _ : state) {
    Tensor c = matmul(a, b);
    benchmark::DoNotOptimize(c.data().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n * n * n);
}
BENCHMARK(bm_matmul)->Arg(64)->Arg(128)->Arg(256);

void bm_matmul_backward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  Tensor a = Tensor::uniform(n, n, -1, 1, rng);
  Tensor b = Tensor::uniform(n, n, -1, 1, rng);
  for (auto _ : state) {
    Tensor loss = sum(matmul(a, b));
    backward(loss);
    benchmark::DoNotOptimize(a.grad().data());
    a.zero_grad();
    b.zero_grad();
  }
}
BENCHMARK(bm_matmul_backward)->Arg(64)->Arg(128);

void bm_lstm_step(benchmark::State& state) {
  const auto h = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  LstmCell cell(h, h, rng);
  Tensor x = Tensor::uniform(1, h, -1, 1, rng);
  LstmState s0 = LstmState::zero(1, h);
  for (auto _ : state) {
    LstmState s1 = lstm_step(cell, x, s0);
    benchmark::DoNotOptimize(s1.h.data().data());
  }
}
BENCHMARK(bm_lstm_step)->Arg(64)->Arg(256)->Arg(512);

void bm_lstm_unroll_backward(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t h = 128;
  Rng rng(4);
  LstmCell cell(h, h, rng);
  std::vector<Tensor> xs;
  for (std::size_t i = 0; i < steps; ++i)
    xs.push_back(Tensor::uniform(1, h, -1, 1, rng));
  for (auto _ : state) {
    Tensor loss = sum(lstm_run(cell, xs, LstmState::zero(1, h)).second.h);
    backward(loss);
    for (Tensor* p : cell.params()) p->zero_grad();
    benchmark::DoNotOptimize(loss.value());
  }
}
BENCHMARK(bm_lstm_unroll_backward)->Arg(10)->Arg(50);

void bm_attention(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t h = 128;
  Rng rng(5);
  BahdanauAttention attn(h, h, rng);
  Tensor memory = Tensor::uniform(rows, h, -1, 1, rng);
  Tensor query = Tensor::uniform(1, h, -1, 1, rng);
  for (auto _ : state) {
    auto [context, weights] = attend(attn, memory, query);
    benchmark::DoNotOptimize(context.data().data());
  }
}
BENCHMARK(bm_attention)->Arg(10)->Arg(100);

void bm_sweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  std::vector<TokenScore> scores;
  for (std::size_t i = 0; i < n; ++i) {
    TokenScore s;
    s.doc_id = "doc" + std::to_string(rng.below(50));
    s.sentence_index = static_cast<int>(rng.below(40));
    s.token_index = static_cast<int>(i);
    s.score = rng.below(1000) / 13.0;
    s.gold = rng.below(20) == 0;
    scores.push_back(s);
  }
  scores[0].gold = 1;
  for (auto _ : state) {
    SweepCurve curve = sweep(scores);
    benchmark::DoNotOptimize(curve.chosen.threshold);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n);
}
BENCHMARK(bm_sweep)->Arg(1000)->Arg(10000)->Arg(100000);

void bm_corrupt(benchmark::State& state) {
  synth::SynthConfig cfg;
  cfg.docs = static_cast<std::size_t>(state.range(0));
  cfg.replacements_per_doc = 4;
  cfg.seed = 7;
  for (auto _ : state) {
    auto corpus = synth::generate(cfg);
    benchmark::DoNotOptimize(corpus.manifest.records.size());
  }
}
BENCHMARK(bm_corrupt)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
