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

#include "binsynth/warp.hpp"

#include <cmath>
#include <string>

#include "binsynth/error.hpp"

namespace binsynth {

Warpfield compute_warpfield(const PoseTrack& track, Ear ear, double sample_rate,
                            double speed_of_sound) {
  if (!(speed_of_sound > 0.0)) fail(ErrorCode::BadConfig, "speed_of_sound must be positive");
  if (!(sample_rate > 0.0)) fail(ErrorCode::BadConfig, "sample_rate must be positive");
  const double c = sample_rate / speed_of_sound;
  Warpfield w;
  w.sample_rate = sample_rate;
  w.rho.resize(track.size());
  for (std::size_t n = 0; n < track.size(); ++n) {
    const auto& pose = track.samples[n];
    const double d = (pose.position - ear_position(pose, track.ear_offsets, ear)).norm();
    w.rho[n] = static_cast<double>(n) - c * d;
  }
  return w;
}

AudioClip apply_warp(const AudioClip& x, const Warpfield& w) {
  if (x.channels() != 1) {
    fail(ErrorCode::WrongChannelCount, "apply_warp expects mono input");
  }
  const std::size_t n_samples = x.length();
  if (w.rho.size() != n_samples) {
    fail(ErrorCode::LengthMismatch, "warpfield length " + std::to_string(w.rho.size()) +
                                        " != clip length " + std::to_string(n_samples));
  }
  const auto src = x.channel(0);
  const auto last = static_cast<double>(n_samples) - 1.0;
  auto at = [&](double idx) -> double {
    if (idx < 0.0) return 0.0;
    if (idx > last) return src[n_samples - 1];
    return src[static_cast<std::size_t>(idx)];
  };

  std::vector<double> out(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double rho = w.rho[n];
    const double lo = std::floor(rho);
    const double hi = std::ceil(rho);
    if (lo == hi) {
      out[n] = at(lo);
    } else {
      out[n] = (hi - rho) * at(lo) + (rho - lo) * at(hi);
    }
  }
  return AudioClip::mono(x.sample_rate(), std::move(out));
}

AudioClip warp_binaural(const AudioClip& x, const PoseTrack& track, double speed_of_sound) {
  if (track.size() != x.length()) {
    fail(ErrorCode::LengthMismatch, "pose track has " + std::to_string(track.size()) +
                                        " samples, clip has " + std::to_string(x.length()));
  }
  const auto left = apply_warp(x, compute_warpfield(track, Ear::left, x.sample_rate(), speed_of_sound));
  const auto right = apply_warp(x, compute_warpfield(track, Ear::right, x.sample_rate(), speed_of_sound));
  const auto l = left.channel(0);
  const auto r = right.channel(0);
  return AudioClip::stereo(x.sample_rate(), {l.begin(), l.end()}, {r.begin(), r.end()});
}

}  // namespace binsynth
