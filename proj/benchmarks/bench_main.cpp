// Copyright 2026 The binsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Microbenchmarks for the hot paths: network passes, FIR filtering, STFT and
// time warping. Sizes follow the toy profile (8 kHz clips).

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "binsynth/audio.hpp"
#include "binsynth/dsp.hpp"
#include "binsynth/net.hpp"
#include "binsynth/pose.hpp"
#include "binsynth/stft.hpp"
#include "binsynth/warp.hpp"

namespace {

using namespace binsynth;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> out(n);
  for (double& v : out) v = normal(rng);
  return out;
}

// Source circling the listener at 2 m, one pose per audio sample.
PoseTrack circling_track(double sample_rate, std::size_t n) {
  PoseTrack track;
  track.rate = sample_rate;
  track.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    track.samples[i].position = Eigen::Vector3d(2.0 * std::cos(angle), 2.0 * std::sin(angle), 0.0);
  }
  return track;
}

struct NetFixture {
  NetConfig config;
  ParamSet params;
  Signal zt;
  Eigen::MatrixXd pos;
  Eigen::MatrixXd audio;

  explicit NetFixture(int length) {
    config.validate();
    params = init_params(config, 1);
    std::mt19937_64 rng(2);
    zt = gaussian(config.in_channels, length, rng);
    pos = gaussian(config.cond_pos_channels, length, rng);
    audio = gaussian(config.cond_audio_channels, length, rng);
  }
};

void BM_NetForward(benchmark::State& state) {
  NetFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(f.zt, 50, f.pos, f.audio, f.params, f.config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NetForward)->Arg(2000)->Arg(8000);

void BM_NetForwardBackward(benchmark::State& state) {
  NetFixture f(static_cast<int>(state.range(0)));
  ForwardContext ctx;
  for (auto _ : state) {
    const Signal pred = forward(f.zt, 50, f.pos, f.audio, f.params, f.config, &ctx);
    benchmark::DoNotOptimize(backward(ctx, pred));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NetForwardBackward)->Arg(2000)->Arg(8000);

void BM_FirConvolve(benchmark::State& state) {
  const AudioClip x = AudioClip::mono(8000.0, noise(8000, 3));
  ImpulseResponse ir;
  ir.sample_rate = 8000.0;
  ir.taps = noise(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(fir_convolve(x, ir));
  state.SetItemsProcessed(state.iterations() * 8000);
}
BENCHMARK(BM_FirConvolve)->Arg(64)->Arg(512)->Arg(2048);

void BM_Stft(benchmark::State& state) {
  const std::vector<double> x = noise(8000, 5);
  StftConfig config;
  config.fft_size = static_cast<std::size_t>(state.range(0));
  config.hop = config.fft_size / 4;
  for (auto _ : state) benchmark::DoNotOptimize(stft(x, config));
  state.SetItemsProcessed(state.iterations() * 8000);
}
BENCHMARK(BM_Stft)->Arg(256)->Arg(1024)->Arg(2048);

void BM_WarpBinaural(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const AudioClip x = AudioClip::mono(8000.0, noise(n, 6));
  const PoseTrack track = circling_track(8000.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(warp_binaural(x, track));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WarpBinaural)->Arg(8000)->Arg(48000);

}  // namespace

BENCHMARK_MAIN();
