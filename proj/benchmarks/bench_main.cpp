#include <benchmark/benchmark.h>

#include <random>

#include "spoofprint/cluster_metrics.hpp"
#include "spoofprint/grad_check.hpp"
#include "spoofprint/lowlevel.hpp"
#include "spoofprint/mel.hpp"
#include "spoofprint/synth.hpp"
#include "spoofprint/trainer.hpp"

using namespace spoofprint;

namespace {

Waveform one_second() { return synth_utterance(default_synth_config().attackers[1], 16000, 3); }

void BM_TrackPitch(benchmark::State& state) {
  const Waveform w = one_second();
  for (auto _ : state) benchmark::DoNotOptimize(track_pitch(w, FrameConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.samples.size()));
}
BENCHMARK(BM_TrackPitch)->Unit(benchmark::kMillisecond);

void BM_ExtractSignature(benchmark::State& state) {
  const Waveform w = one_second();
  for (auto _ : state) benchmark::DoNotOptimize(extract_signature(w, std::nullopt, FrameConfig{}));
}
BENCHMARK(BM_ExtractSignature)->Unit(benchmark::kMillisecond);

void BM_LogMel(benchmark::State& state) {
  const Waveform w = one_second();
  for (auto _ : state) benchmark::DoNotOptimize(log_mel(w, MelConfig{}));
}
BENCHMARK(BM_LogMel)->Unit(benchmark::kMillisecond);

// Forward + backward of one N x M batch; arg = hidden width (32 desk, 768 full).
void BM_BatchGradient(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const int embed_dim = hidden == 768 ? 256 : 16;
  const auto p = init_params(NetworkShape{40, hidden, embed_dim}, 1);
  const Batch b = random_batch(40, 4, 3, 80, 2);
  for (auto _ : state) benchmark::DoNotOptimize(batch_gradient(p, b));
}
BENCHMARK(BM_BatchGradient)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Embed(benchmark::State& state) {
  const auto p = init_params(NetworkShape{40, 32, 16}, 1);
  const FrameMatrix f = random_batch(40, 2, 2, 80, 3).sequences[0];
  for (auto _ : state) benchmark::DoNotOptimize(embed(p, f));
}
BENCHMARK(BM_Embed)->Unit(benchmark::kMicrosecond);

// var_C on n rows of width d with 20 classes.
void BM_VarC(benchmark::State& state) {
  const auto n = state.range(0), d = state.range(1);
  std::mt19937_64 gen(4);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = dist(gen);
  std::vector<AttackerLabel> y;
  for (int64_t i = 0; i < n; ++i) y.emplace_back("A" + std::to_string(10 + i % 20));
  for (auto _ : state) benchmark::DoNotOptimize(avg_class_conditional_variance(X, y));
}
BENCHMARK(BM_VarC)->Args({2000, 16})->Args({2000, 256})->Unit(benchmark::kMillisecond);

}  // namespace
