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

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "../support/fixtures.hpp"
#include "binsynth/dsp.hpp"
#include "unit_support.hpp"

using namespace binsynth;
using binsynth::testing::error_of;
using binsynth::testing::scratch_dir;

namespace {

ImpulseResponse ir_of(std::vector<double> taps, double rate = 8000.0) { return {std::move(taps), rate, "test"}; }

double l2(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double t : v) s += std::abs(t);
  return s;
}

HrtfBank delta_bank(double rate) {
  HrtfBank bank;
  bank.emplace(Direction{0.0, 0.0}, HrtfPair{ir_of({1.0}, rate), ir_of({1.0}, rate)});
  return bank;
}

}  // namespace

TEST_CASE("fir_convolve examples") {
  const AudioClip x = AudioClip::mono(8000.0, {1, 2, 3});
  CHECK(fir_convolve(x, ir_of({1})) == x);
  CHECK(fir_convolve(x, ir_of({0, 0, 1})).data()[0] == std::vector<double>{0, 0, 1});
  CHECK(fir_convolve(x, ir_of({1, 1})).data()[0] == std::vector<double>{1, 3, 5});
  CHECK(error_of([&] { fir_convolve(x, ir_of({1}, 16000.0)); }) == ErrorCode::RateMismatch);
}

TEST_CASE("fir_convolve is shift invariant within the window") {
  std::mt19937_64 rng(4);
  const auto taps = binsynth::testing::random_signal(rng, 9);
  const AudioClip x = binsynth::testing::random_mono(rng, 100);
  const std::size_t k = 7;
  std::vector<double> shifted(100, 0.0);
  for (std::size_t i = k; i < 100; ++i) shifted[i] = x.channel(0)[i - k];
  const auto y = fir_convolve(x, ir_of(taps));
  const auto ys = fir_convolve(AudioClip::mono(8000.0, shifted), ir_of(taps));
  for (std::size_t i = k; i < 100; ++i) CHECK(ys.channel(0)[i] == doctest::Approx(y.channel(0)[i - k]).epsilon(1e-14));
}

TEST_CASE("image_source_rir order 0 is one direct spike") {
  const auto room = ShoeboxRoom::uniform({6, 5, 3}, 0.4, 0);
  // Sample rate equal to the speed of sound puts the arrival at tap d.
  const auto ir = image_source_rir(room, {1, 1, 1}, {4, 1, 1}, 343.0, 343.0);
  REQUIRE(ir.taps.size() == 5);
  CHECK(ir.taps[3] == doctest::Approx(1.0 / 3.0));
  CHECK(std::accumulate(ir.taps.begin(), ir.taps.end(), 0.0) == doctest::Approx(1.0 / 3.0));

  const auto frac = image_source_rir(room, {1, 1, 1}, {3.5, 1, 1}, 343.0, 343.0);
  CHECK(frac.taps[2] == doctest::Approx(0.5 / 2.5));
  CHECK(frac.taps[3] == doctest::Approx(0.5 / 2.5));
}

TEST_CASE("image_source_rir with total absorption equals order 0") {
  const Eigen::Vector3d src(1.2, 3.1, 0.7);
  const Eigen::Vector3d lst(4.0, 2.2, 1.9);
  const auto direct = image_source_rir(ShoeboxRoom::uniform({6, 5, 3}, 0.3, 0), src, lst, 8000.0);
  for (int order : {1, 2, 4}) {
    const auto full = image_source_rir(ShoeboxRoom::uniform({6, 5, 3}, 1.0, order), src, lst, 8000.0);
    CHECK(full.taps == direct.taps);
  }
}

TEST_CASE("image_source_rir corridor has three first-order arrivals") {
  // Only the two end walls reflect; the side walls absorb everything.
  ShoeboxRoom room;
  room.dimensions = {10, 4, 4};
  room.absorption = {0.5, 0.5, 1.0, 1.0, 1.0, 1.0};
  room.max_order = 1;
  const auto ir = image_source_rir(room, {3, 2, 2}, {6, 2, 2}, 343.0, 343.0);
  // Images at x = 3 (direct), -3 (wall x=0) and 17 (wall x=10).
  REQUIRE(ir.taps.size() == 13);
  std::vector<double> expected(13, 0.0);
  expected[3] = 1.0 / 3.0;
  expected[9] = 0.5 / 9.0;
  expected[11] = 0.5 / 11.0;
  for (std::size_t i = 0; i < 13; ++i) CHECK(ir.taps[i] == doctest::Approx(expected[i]).epsilon(1e-14));

  const auto aligned = image_source_rir(room, {3, 2, 2}, {6, 2, 2}, 343.0, 343.0, RirAlignment::direct_path);
  CHECK(aligned.taps[0] == doctest::Approx(1.0 / 3.0));
  CHECK(aligned.taps[6] == doctest::Approx(0.5 / 9.0));
  CHECK(aligned.taps[8] == doctest::Approx(0.5 / 11.0));
}

TEST_CASE("image_source_rir converges to the direct path as absorption approaches 1") {
  const Eigen::Vector3d src(1.2, 3.1, 0.7);
  const Eigen::Vector3d lst(4.0, 2.2, 1.9);
  const auto direct = image_source_rir(ShoeboxRoom::uniform({6, 5, 3}, 0.5, 0), src, lst, 8000.0);
  double previous = 1e9;
  for (double a : {0.9, 0.99, 0.999, 0.9999}) {
    const auto ir = image_source_rir(ShoeboxRoom::uniform({6, 5, 3}, a, 2), src, lst, 8000.0);
    double err = 0.0;
    for (std::size_t i = 0; i < ir.taps.size(); ++i) {
      err += std::abs(ir.taps[i] - (i < direct.taps.size() ? direct.taps[i] : 0.0));
    }
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("image_source_rir rejects points outside the room") {
  const auto room = ShoeboxRoom::uniform({6, 5, 3}, 0.5, 1);
  CHECK(error_of([&] { image_source_rir(room, {7, 1, 1}, {2, 2, 2}, 8000.0); }) == ErrorCode::PointOutsideRoom);
  CHECK(error_of([&] { image_source_rir(room, {1, 1, 1}, {2, 0, 2}, 8000.0); }) == ErrorCode::PointOutsideRoom);
  CHECK(error_of([&] { image_source_rir(ShoeboxRoom::uniform({6, 5, 3}, 0.0, 1), {1, 1, 1}, {2, 2, 2}, 8000.0); }) ==
        ErrorCode::BadConfig);
}

TEST_CASE("dsp_render_binaural with degenerate filters is a scaled fractional delay") {
  const double rate = 8000.0;
  std::mt19937_64 rng(8);
  const AudioClip x = binsynth::testing::random_mono(rng, 400, rate);
  const Eigen::Vector3d src(1.3, -0.4, 0.2);
  const PoseTrack track = binsynth::testing::static_track(src, 400, rate);
  DspRenderConfig config;
  config.room = ShoeboxRoom::uniform({6, 5, 3}, 0.5, 0);
  const AudioClip y = dsp_render_binaural(x, track, delta_bank(rate), config);
  const AudioClip w = warp_binaural(x, track);
  for (int e = 0; e < 2; ++e) {
    const double d = (src - track.ear_offsets[static_cast<Ear>(e)]).norm();
    for (std::size_t i = 0; i < 400; ++i) CHECK(std::abs(y.channel(e)[i] - w.channel(e)[i] / d) < 1e-10);
  }
}

TEST_CASE("dsp_render_binaural mirrors left and right for mirrored geometry") {
  const double rate = 8000.0;
  std::mt19937_64 rng(12);
  const AudioClip x = binsynth::testing::random_mono(rng, 300, rate);
  DspRenderConfig config;
  config.room = ShoeboxRoom::uniform({6, 5, 3}, 0.6, 1);
  config.listener_position = {3.0, 2.5, 1.5};
  const HrtfBank bank = synthetic_hrtf_bank(rate);
  const auto a = dsp_render_binaural(x, binsynth::testing::static_track({1.5, 0.8, 0.1}, 300, rate), bank, config);
  const auto b = dsp_render_binaural(x, binsynth::testing::static_track({1.5, -0.8, 0.1}, 300, rate), bank, config);
  for (std::size_t i = 0; i < 300; ++i) {
    CHECK(std::abs(a.channel(0)[i] - b.channel(1)[i]) < 1e-12);
    CHECK(std::abs(a.channel(1)[i] - b.channel(0)[i]) < 1e-12);
  }
}

TEST_CASE("dsp_render_binaural output energy respects the filter bound") {
  const double rate = 8000.0;
  std::mt19937_64 rng(13);
  DspRenderConfig config;
  config.room = ShoeboxRoom::uniform({6, 5, 3}, 0.5, 2);
  const HrtfBank bank = synthetic_hrtf_bank(rate);
  for (int trial = 0; trial < 5; ++trial) {
    const AudioClip x = binsynth::testing::random_mono(rng, 500, rate);
    const Eigen::Vector3d src(1.0 + 0.2 * trial, 0.5 - 0.3 * trial, 0.1);
    const PoseTrack track = binsynth::testing::static_track(src, 500, rate);
    const auto y = dsp_render_binaural(x, track, bank, config);
    const HrtfPair& h = nearest_hrtf(bank, mean_source_direction(track));
    for (int e = 0; e < 2; ++e) {
      const Eigen::Vector3d ear = config.listener_position + track.ear_offsets[static_cast<Ear>(e)];
      const auto rir = image_source_rir(config.room, config.listener_position + src, ear, rate,
                                        kDefaultSpeedOfSound, RirAlignment::direct_path);
      const double bound = l2(x.channel(0)) * l1(rir.taps) * l1(e == 0 ? h.left.taps : h.right.taps);
      CHECK(l2(y.channel(e)) <= bound);
    }
  }
}

TEST_CASE("dsp_render_binaural needs an HRTF") {
  const AudioClip x = AudioClip::mono(8000.0, {1, 2, 3});
  CHECK(error_of([&] {
          dsp_render_binaural(x, binsynth::testing::static_track({1, 0, 0}, 3, 8000.0), HrtfBank{}, DspRenderConfig{});
        }) == ErrorCode::EmptyHrtfBank);
}

TEST_CASE("nearest_hrtf picks the smallest great-circle angle") {
  const HrtfBank bank = synthetic_hrtf_bank(8000.0);
  const auto& want = bank.at(Direction{30.0, 0.0});
  CHECK(&nearest_hrtf(bank, Direction{37.0, 4.0}) == &want);
  CHECK(&nearest_hrtf(bank, Direction{-178.0, 0.0}) == &bank.at(Direction{180.0, 0.0}));
  CHECK(&nearest_hrtf(bank, Direction{0.0, 89.0}) != nullptr);
}

TEST_CASE("synthetic HRTF bank is mirror symmetric") {
  const HrtfBank bank = synthetic_hrtf_bank(8000.0);
  for (const auto& [d, pair] : bank) {
    if (d.azimuth_deg == 180.0) continue;
    const auto& mirror = bank.at(Direction{-d.azimuth_deg, d.elevation_deg});
    CHECK(pair.left.taps == mirror.right.taps);
  }
}

TEST_CASE("HRTF bank directory round trip") {
  const auto dir = scratch_dir("hrtf_bank");
  const HrtfBank bank = synthetic_hrtf_bank(8000.0);
  save_hrtf_bank(bank, dir);
  const HrtfBank loaded = load_hrtf_bank(dir);
  REQUIRE(loaded.size() == bank.size());
  for (const auto& [d, pair] : bank) {
    const auto& l = loaded.at(d);
    REQUIRE(l.left.taps.size() == pair.left.taps.size());
    for (std::size_t i = 0; i < pair.left.taps.size(); ++i) {
      CHECK(l.left.taps[i] == static_cast<double>(static_cast<float>(pair.left.taps[i])));
      CHECK(l.right.taps[i] == static_cast<double>(static_cast<float>(pair.right.taps[i])));
    }
  }
  CHECK(error_of([&] { load_hrtf_bank(scratch_dir("hrtf_empty")); }) == ErrorCode::EmptyHrtfBank);
}
