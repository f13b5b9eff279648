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

#include <vector>

#include "binsynth/audio.hpp"
#include "binsynth/pose.hpp"

namespace binsynth {

inline constexpr double kDefaultSpeedOfSound = 343.0;

/// Per-sample fractional read indices for one ear. rho[n] <= n always holds
/// because distances are non-negative.
struct Warpfield {
  std::vector<double> rho;
  double sample_rate = 1.0;
};

/// rho(n) = n - (sample_rate / speed_of_sound) * |p_src(n) - p_ear(n)|, with
/// the track already resampled to one pose per audio sample.
Warpfield compute_warpfield(const PoseTrack& track, Ear ear, double sample_rate,
                            double speed_of_sound = kDefaultSpeedOfSound);

/// Linear-interpolation read of a mono clip at the warpfield indices. Reads
/// before sample 0 return silence; reads past the end clamp to the last
/// sample.
AudioClip apply_warp(const AudioClip& x, const Warpfield& w);

/// Stereo clip whose channels are `x` warped to the left and right ears.
/// `track` must already be at the audio rate with one pose per sample.
AudioClip warp_binaural(const AudioClip& x, const PoseTrack& track,
                        double speed_of_sound = kDefaultSpeedOfSound);

}  // namespace binsynth
