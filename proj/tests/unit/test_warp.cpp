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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "../support/fixtures.hpp"
#include "binsynth/warp.hpp"
#include "unit_support.hpp"

using namespace binsynth;
using binsynth::testing::error_of;

namespace {

// Track whose every sample places the source at `offset` from the left ear.
PoseTrack track_at_ear_distance(const Eigen::Vector3d& offset, std::size_t n, double rate) {
  const EarOffsets ears;
  return binsynth::testing::static_track(ears.left + offset, n, rate);
}

Warpfield field(std::vector<double> rho) { return Warpfield{std::move(rho), 8000.0}; }

}  // namespace

TEST_CASE("compute_warpfield examples") {
  SUBCASE("zero distance") {
    const auto w = compute_warpfield(track_at_ear_distance({0, 0, 0}, 16, 48000.0), Ear::left, 48000.0, 343.0);
    for (std::size_t n = 0; n < 16; ++n) CHECK(w.rho[n] == static_cast<double>(n));
  }
  SUBCASE("343 m is a one-second delay") {
    const auto w = compute_warpfield(track_at_ear_distance({343, 0, 0}, 8, 48000.0), Ear::left, 48000.0, 343.0);
    for (std::size_t n = 0; n < 8; ++n) CHECK(w.rho[n] == doctest::Approx(static_cast<double>(n) - 48000.0));
  }
  SUBCASE("1 m") {
    const auto w = compute_warpfield(track_at_ear_distance({0, 0, 1}, 8, 48000.0), Ear::left, 48000.0, 343.0);
    for (std::size_t n = 0; n < 8; ++n) {
      CHECK(w.rho[n] == doctest::Approx(static_cast<double>(n) - 48000.0 / 343.0).epsilon(1e-14));
    }
    CHECK(48000.0 / 343.0 == doctest::Approx(139.941).epsilon(1e-5));
  }
}

TEST_CASE("warpfield never reads the future") {
  std::mt19937_64 rng(2);
  const auto t = binsynth::testing::moving_track(rng, 500, 8000.0);
  for (Ear e : {Ear::left, Ear::right}) {
    const auto w = compute_warpfield(t, e, 8000.0);
    for (std::size_t n = 0; n < w.rho.size(); ++n) {
      CHECK(std::isfinite(w.rho[n]));
      CHECK(w.rho[n] <= static_cast<double>(n));
    }
  }
}

TEST_CASE("apply_warp examples") {
  const AudioClip x = AudioClip::mono(8000.0, {1, 2, 3, 4, 5, 6});
  SUBCASE("identity") {
    CHECK(apply_warp(x, field({0, 1, 2, 3, 4, 5})) == x);
  }
  SUBCASE("integer shift reads silence before the start") {
    const auto y = apply_warp(x, field({-2, -1, 0, 1, 2, 3}));
    CHECK(y.data()[0] == std::vector<double>{0, 0, 1, 2, 3, 4});
  }
  SUBCASE("half-sample shift on a ramp") {
    const AudioClip ramp = AudioClip::mono(8000.0, {0, 1, 2, 3, 4, 5, 6, 7});
    std::vector<double> rho(8);
    for (std::size_t n = 0; n < 8; ++n) rho[n] = static_cast<double>(n) - 0.5;
    const auto y = apply_warp(ramp, field(rho));
    for (std::size_t n = 1; n < 8; ++n) CHECK(y.channel(0)[n] == doctest::Approx(static_cast<double>(n) - 0.5));
  }
  SUBCASE("reads past the end clamp to the last sample") {
    const auto y = apply_warp(x, field({0, 1, 2, 3, 4, 9.5}));
    CHECK(y.channel(0)[5] == 6.0);
  }
  SUBCASE("length mismatch") {
    CHECK(error_of([&] { apply_warp(x, field({0, 1})); }) == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("apply_warp is linear and amplitude bounded") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-30.0, 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 200;
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = static_cast<double>(i) + u(rng);
    const Warpfield w = field(rho);
    const AudioClip a = binsynth::testing::random_mono(rng, n);
    const AudioClip b = binsynth::testing::random_mono(rng, n);
    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = 0.7 * a.channel(0)[i] - 1.3 * b.channel(0)[i];
    const auto wa = apply_warp(a, w);
    const auto wb = apply_warp(b, w);
    const auto wm = apply_warp(AudioClip::mono(8000.0, mix), w);
    double peak_in = 0.0;
    double peak_out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(wm.channel(0)[i] == doctest::Approx(0.7 * wa.channel(0)[i] - 1.3 * wb.channel(0)[i]).epsilon(1e-12));
      peak_in = std::max(peak_in, std::abs(a.channel(0)[i]));
      peak_out = std::max(peak_out, std::abs(wa.channel(0)[i]));
    }
    CHECK(peak_out <= peak_in);
  }
}

TEST_CASE("warp_binaural geometry") {
  const double rate = 8000.0;
  const std::size_t n = 800;
  std::vector<double> clicks(n, 0.0);
  for (std::size_t i = 0; i < n; i += 200) clicks[i] = 1.0;
  const AudioClip x = AudioClip::mono(rate, clicks);

  SUBCASE("equidistant source gives identical channels") {
    const auto y = warp_binaural(x, binsynth::testing::static_track({2.0, 0.0, 0.5}, n, rate));
    CHECK(y.data()[0] == y.data()[1]);
  }
  SUBCASE("the nearer ear leads by C times the distance difference") {
    // Source on the left axis: 1 m from the left ear, 1.18 m from the right.
    const EarOffsets ears;
    const Eigen::Vector3d src = ears.left + Eigen::Vector3d(0, -1.0, 0);
    const double dd = (src - ears.right).norm() - (src - ears.left).norm();
    const auto y = warp_binaural(x, binsynth::testing::static_track(src, n, rate));
    long best_lag = 0;
    double best = -1.0;
    for (long lag = -20; lag <= 20; ++lag) {
      double acc = 0.0;
      for (long i = 0; i < static_cast<long>(n); ++i) {
        const long j = i + lag;
        if (j >= 0 && j < static_cast<long>(n)) acc += y.channel(0)[i] * y.channel(1)[j];
      }
      if (acc > best) {
        best = acc;
        best_lag = lag;
      }
    }
    CHECK(best_lag == std::lround(rate / kDefaultSpeedOfSound * dd));
    CHECK(best_lag > 0);
  }
  SUBCASE("constant distance group delay matches C*d") {
    const Eigen::Vector3d src(0.0, -0.09 - 3.0, 0.0);  // 3 m from the left ear
    const auto y = warp_binaural(x, binsynth::testing::static_track(src, n, rate));
    const auto& l = y.channel(0);
    const auto peak = std::max_element(l.begin(), l.begin() + 200) - l.begin();
    CHECK(std::abs(static_cast<double>(peak) - rate / kDefaultSpeedOfSound * 3.0) <= 1.0);
  }
  SUBCASE("empty input") {
    const auto y = warp_binaural(AudioClip(rate, 1, 0), PoseTrack{});
    CHECK(y.channels() == 2);
    CHECK(y.length() == 0);
  }
  SUBCASE("track length must match") {
    CHECK(error_of([&] { warp_binaural(x, binsynth::testing::static_track({1, 0, 0}, n - 1, rate)); }) ==
          ErrorCode::LengthMismatch);
  }
}
