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

#pragma once

// Small deterministic fixtures shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "binsynth/audio.hpp"
#include "binsynth/pose.hpp"

namespace binsynth::testing {

inline std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& s : v) s = g(rng);
  return v;
}

inline AudioClip random_mono(std::mt19937_64& rng, std::size_t n, double rate = 8000.0) {
  return AudioClip::mono(rate, random_signal(rng, n, 0.3));
}

inline AudioClip random_stereo(std::mt19937_64& rng, std::size_t n, double rate = 8000.0) {
  return AudioClip::stereo(rate, random_signal(rng, n, 0.3), random_signal(rng, n, 0.3));
}

inline PoseTrack static_track(const Eigen::Vector3d& source, std::size_t n, double rate,
                              const Eigen::Quaterniond& head = Eigen::Quaterniond::Identity()) {
  PoseTrack t;
  t.rate = rate;
  t.samples.assign(n, PoseSample{source, head});
  return t;
}

// A source circling the head at a random radius while the head yaws slowly.
inline PoseTrack moving_track(std::mt19937_64& rng, std::size_t n, double rate) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double radius = 0.5 + 2.0 * u(rng);
  const double az0 = 2.0 * M_PI * u(rng);
  const double az_rate = (u(rng) - 0.5) * 2.0;  // rad/s
  const double height = u(rng) - 0.5;
  const double yaw_rate = (u(rng) - 0.5) * 0.5;
  PoseTrack t;
  t.rate = rate;
  t.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double time = static_cast<double>(i) / rate;
    const double az = az0 + az_rate * time;
    t.samples[i].position = {radius * std::cos(az), radius * std::sin(az), height};
    t.samples[i].orientation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw_rate * time, Eigen::Vector3d::UnitZ()));
  }
  return t;
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline double max_abs_diff(const AudioClip& a, const AudioClip& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    const auto x = a.channel(c);
    const auto y = b.channel(c);
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  }
  return m;
}

}  // namespace binsynth::testing
