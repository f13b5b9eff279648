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

// Run configuration shared by every command-line tool.
//
// The on-disk dialect is JSON: a tree of sections holding typed scalars and
// arrays. A file may set any subset of keys; missing keys keep the value of
// the selected profile. Unknown keys and wrongly typed values are errors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "binsynth/dataset.hpp"
#include "binsynth/diffusion.hpp"
#include "binsynth/dsp.hpp"
#include "binsynth/metrics.hpp"
#include "binsynth/net.hpp"
#include "binsynth/two_stage.hpp"
#include "binsynth/wav.hpp"

namespace binsynth {

struct AudioSection {
  double sample_rate = 8000.0;
  double speed_of_sound = kDefaultSpeedOfSound;
  EarOffsets ear_offsets;
  WavEncoding output_encoding = WavEncoding::float32;
};

struct DataSection {
  std::uint64_t seed = 0;
  std::size_t n_clips = 4;
  double clip_seconds = 1.0;
  double pose_rate = 120.0;
  ShoeboxRoom room;
  Eigen::Vector3d listener_position{3.0, 2.5, 1.5};
};

struct ScheduleSection {
  int train_steps = 200;
  double beta_start = 1e-4;
  double beta_end = 0.05;
  std::vector<double> infer_betas{1e-4, 1e-3, 1e-2, 5e-2, 2e-1, 5e-1};
};

struct NetSection {
  int residual_blocks = 1;
  int layers_per_block = 3;
  int hidden = 16;
  int step_embed_dim = 16;
  int dilation_cycle = 10;
  int conditioner_kernel = 3;
  int conditioner_layers = 2;
};

struct TrainSection {
  double lr = 2e-4;
  LrSchedule lr_schedule = LrSchedule::constant;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int steps = 3000;
  std::uint64_t seed = 0;
  AudioScaling audio_scaling = AudioScaling::source_rms;
};

struct SynthSection {
  std::uint64_t seed = 0;
};

struct PathsSection {
  std::filesystem::path hrtf_dir;  // empty selects the built-in synthetic bank
};

struct RunConfig {
  std::string profile = "toy";
  AudioSection audio;
  DataSection data;
  ScheduleSection schedule;
  NetSection net;
  TrainSection train;
  SynthSection synth;
  MetricsConfig metrics;
  PathsSection paths;

  void validate() const;

  NoiseSchedule train_schedule() const;
  NoiseSchedule infer_schedule() const;
  NetConfig net_shape() const;
  TrainOptions train_options() const;
  SyntheticDatasetSpec dataset_spec() const;
  DspRenderConfig render_config() const;
};

// Names accepted by profile().
std::vector<std::string> profile_names();

// Built-in profiles: "toy" (desk scale) and "paper" (documents the full-size
// configuration; not meant to be trained on a CPU).
RunConfig profile(const std::string& name);

// Overlays the JSON text on `base`. A top-level "profile" key replaces the
// base with that profile before the overlay is applied.
RunConfig parse_run_config(const std::string& text, const RunConfig& base);

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base);

// Full serialization; parse_run_config(to_json(c), any) reproduces c.
std::string run_config_to_json(const RunConfig& config);

// Loads the HRTF bank named by paths.hrtf_dir, or the synthetic bank at the
// configured sample rate.
HrtfBank resolve_hrtf_bank(const RunConfig& config);

}  // namespace binsynth
