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

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "binsynth/audio.hpp"
#include "binsynth/pose.hpp"
#include "binsynth/warp.hpp"

namespace binsynth {

struct ImpulseResponse {
  std::vector<double> taps;
  double sample_rate = 1.0;
  std::string label;
};

/// Direct-form FIR filtering, truncated to the input length (tap 0 has zero
/// latency).
AudioClip fir_convolve(const AudioClip& x, const ImpulseResponse& ir);

/// Axis-aligned room with one corner at the origin. Absorption is given per
/// surface in the order x=0, x=Lx, y=0, y=Ly, z=0, z=Lz.
struct ShoeboxRoom {
  Eigen::Vector3d dimensions{6.0, 5.0, 3.0};
  std::array<double, 6> absorption{0.6, 0.6, 0.6, 0.6, 0.6, 0.6};
  int max_order = 2;

  static ShoeboxRoom uniform(const Eigen::Vector3d& dims, double absorption, int max_order);
  void validate() const;
};

enum class RirAlignment {
  /// Arrival at tap C*d, the physical response.
  absolute,
  /// Delays measured relative to the direct path, which lands on tap 0. Used
  /// after geometric warping has already applied the direct-path delay.
  direct_path,
};

/// Image-source response. Each image contributes (1/d) * prod(1 - a_wall) at
/// fractional tap C*d split over two adjacent taps by linear interpolation.
ImpulseResponse image_source_rir(const ShoeboxRoom& room, const Eigen::Vector3d& src,
                                 const Eigen::Vector3d& lstn, double sample_rate,
                                 double speed_of_sound = kDefaultSpeedOfSound,
                                 RirAlignment alignment = RirAlignment::absolute);

struct Direction {
  double azimuth_deg = 0.0;    // positive toward the right ear
  double elevation_deg = 0.0;  // positive up

  auto operator<=>(const Direction&) const = default;
  Eigen::Vector3d unit_vector() const;
  static Direction from_vector(const Eigen::Vector3d& v);
};

struct HrtfPair {
  ImpulseResponse left;
  ImpulseResponse right;
};

using HrtfBank = std::map<Direction, HrtfPair>;

/// Entry whose direction has the smallest great-circle angle to `dir`.
const HrtfPair& nearest_hrtf(const HrtfBank& bank, const Direction& dir);

/// Loads `az<deg>_el<deg>_{l,r}.wav` pairs from a directory.
HrtfBank load_hrtf_bank(const std::filesystem::path& dir);
void save_hrtf_bank(const HrtfBank& bank, const std::filesystem::path& dir);

/// Parametric head-shadow bank: short FIR pairs with level differences and a
/// one-pole low-pass on the shadowed ear. Left/right mirror-symmetric about
/// the median plane. Timing cues are left to geometric warping.
HrtfBank synthetic_hrtf_bank(double sample_rate);

struct DspRenderConfig {
  ShoeboxRoom room;
  Eigen::Vector3d listener_position{3.0, 2.5, 1.5};  // head origin in room coordinates
  double speed_of_sound = kDefaultSpeedOfSound;
};

/// Mean source direction in head coordinates over the track.
Direction mean_source_direction(const PoseTrack& track);

/// Classical renderer. Per ear: geometric warp, then a direct-path-aligned RIR
/// for the clip's mean geometry, then the nearest-direction HRTF for the
/// clip's mean source direction. The track is resampled to the audio rate
/// when needed.
AudioClip dsp_render_binaural(const AudioClip& x, const PoseTrack& track, const HrtfBank& bank,
                              const DspRenderConfig& config);

}  // namespace binsynth
