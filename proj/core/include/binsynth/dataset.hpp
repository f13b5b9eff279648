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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "binsynth/audio.hpp"
#include "binsynth/dsp.hpp"
#include "binsynth/pose.hpp"

namespace binsynth {

struct ManifestRow {
  std::filesystem::path mono;
  std::filesystem::path pose;
  std::filesystem::path binaural;
};

/// Rows of `mono_path,pose_path,binaural_path`. Relative paths are resolved
/// against the manifest's directory on read.
struct Manifest {
  std::vector<ManifestRow> rows;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Triple loaded from one manifest row; the pose track is left at its file
/// rate.
struct ClipRecord {
  std::string name;  // stem of the binaural file
  AudioClip mono;
  PoseTrack pose;
  AudioClip binaural;
};

ClipRecord load_clip(const ManifestRow& row, const EarOffsets& ears = {});

struct SyntheticDatasetSpec {
  std::uint64_t seed = 0;
  std::size_t n_clips = 4;
  double clip_seconds = 1.0;
  double sample_rate = 8000.0;
  double pose_rate = 120.0;
  EarOffsets ear_offsets;
};

/// Deterministic mono source: filtered noise bursts (even variants) or a
/// modulated harmonic tone complex (odd variants), peak-normalized to 0.5.
std::vector<double> synthetic_source(std::uint64_t seed, std::size_t index, std::size_t length,
                                     double sample_rate);

/// Slowly moving source around the listener plus small head yaw.
PoseTrack synthetic_trajectory(std::uint64_t seed, std::size_t index, double seconds,
                               double pose_rate, const EarOffsets& ears);

/// Writes clipNNN_{mono.wav,pose.csv,binaural.wav} per clip plus
/// `manifest.txt`, and returns the manifest path. Audio is stored as float32
/// and the binaural reference is rendered from the stored mono and the
/// re-read pose file, so the files are mutually consistent.
std::filesystem::path make_synthetic_dataset(const SyntheticDatasetSpec& spec,
                                             const HrtfBank& bank,
                                             const DspRenderConfig& render,
                                             const std::filesystem::path& out_dir);

}  // namespace binsynth
