// SPDX-License-Identifier: Apache-2.0
// Microbenchmarks for the compute kernels on realistic input sizes: one
// second of audio, 98 frame posteriorgrams, the published model geometry.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "nuva/audio.hpp"
#include "nuva/frontend.hpp"
#include "nuva/gru_model.hpp"
#include "nuva/matcher.hpp"
#include "nuva/synthetic.hpp"
#include "nuva/util.hpp"

namespace {

nuva::AudioClip one_second_tone() {
  nuva::AudioClip clip;
  clip.samples.resize(16000);
  for (size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = static_cast<int16_t>(9000.0 * std::sin(0.21 * i));
  }
  return clip;
}

nuva::PosteriorgramSequence random_sequence(size_t frames, uint64_t seed) {
  std::mt19937_64 rng(seed);
  nuva::PosteriorgramSequence seq;
  seq.resize_frames(frames);
  for (size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (int k = 0; k < nuva::kNumPhoneClasses; ++k) {
      seq.row(t)[k] = 1e-6 + nuva::uniform01(rng);
      sum += seq.row(t)[k];
    }
    for (int k = 0; k < nuva::kNumPhoneClasses; ++k) seq.row(t)[k] /= sum;
  }
  return seq;
}

void BM_extract_features(benchmark::State& state) {
  const nuva::AudioClip clip = one_second_tone();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nuva::extract_features(clip));
  }
}
BENCHMARK(BM_extract_features)->Unit(benchmark::kMillisecond);

void BM_local_cost(benchmark::State& state) {
  const nuva::PosteriorgramSequence seq = random_sequence(2, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nuva::local_cost(seq.row(0), seq.row(1)));
  }
}
BENCHMARK(BM_local_cost);

void BM_dtw(benchmark::State& state) {
  const size_t frames = static_cast<size_t>(state.range(0));
  const nuva::PosteriorgramSequence h = random_sequence(frames, 21);
  const nuva::PosteriorgramSequence a = random_sequence(frames, 22);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nuva::dtw_distance(h, a));
  }
}
BENCHMARK(BM_dtw)->Arg(32)->Arg(98)->Unit(benchmark::kMillisecond);

void BM_gru_inference(benchmark::State& state) {
  const int layers = static_cast<int>(state.range(0));
  const nuva::GruModel model = nuva::make_test_model(layers, 128, nuva::kNumFeatures,
                                                     nuva::kNumPhoneClasses, 42);
  const nuva::FeatureSequence feats = nuva::extract_features(one_second_tone());
  for (auto _ : state) {
    benchmark::DoNotOptimize(nuva::infer_posteriorgrams(feats, model));
  }
}
BENCHMARK(BM_gru_inference)->Arg(2)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_synthesize(benchmark::State& state) {
  const nuva::SyntheticSourceConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nuva::synthesize_for_word("watch", 98, cfg));
  }
}
BENCHMARK(BM_synthesize);

}  // namespace

BENCHMARK_MAIN();
