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
#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace binsynth {

/// Source position relative to the listener (x front, y right, z up; meters)
/// and head orientation as a unit quaternion.
struct PoseSample {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

enum class Ear { left = 0, right = 1 };

struct EarOffsets {
  Eigen::Vector3d left{0.0, -0.09, 0.0};
  Eigen::Vector3d right{0.0, 0.09, 0.0};

  const Eigen::Vector3d& operator[](Ear ear) const { return ear == Ear::left ? left : right; }
};

/// Uniformly sampled pose sequence. The first sample is aligned with audio
/// sample 0.
struct PoseTrack {
  double rate = 120.0;
  std::vector<PoseSample> samples;
  EarOffsets ear_offsets;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Ear position in listener coordinates: the ear offset rotated by the head
/// orientation.
Eigen::Vector3d ear_position(const PoseSample& pose, const EarOffsets& ears, Ear ear);

/// Reads the canonical pose CSV: header `t,px,py,pz,qx,qy,qz,qw` followed by
/// rows at a uniform rate. Quaternions are normalized on load.
PoseTrack read_pose_csv(const std::filesystem::path& path);

/// Writes the canonical pose CSV with round-trippable number formatting.
void write_pose_csv(const PoseTrack& track, const std::filesystem::path& path);

/// Resamples to `n_samples` poses at `target_rate`: linear interpolation for
/// positions, shortest-arc slerp for orientations, last pose held past the
/// end of the input.
PoseTrack resample_pose(const PoseTrack& track, double target_rate, std::size_t n_samples);

/// Per-sample pose features (px, py, pz, qx, qy, qz, qw) as a 7 x N matrix.
Eigen::MatrixXd pose_features(const PoseTrack& track);

}  // namespace binsynth
