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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "binsynth/audio.hpp"
#include "binsynth/checkpoint.hpp"
#include "binsynth/dataset.hpp"
#include "binsynth/diffusion.hpp"
#include "binsynth/net.hpp"
#include "binsynth/pose.hpp"
#include "binsynth/warp.hpp"

namespace binsynth {

/// common: one-channel model of the binaural channel average.
/// specific: two-channel model of (left, right) given the common output.
enum class Stage { common = 1, specific = 2 };

struct StageSpec {
  Stage stage = Stage::common;
  int channels = 1;
  int cond_audio_channels = 2;
  std::string target;

  static StageSpec of(Stage stage);
};

/// Network config for a stage: copies the shape hyperparameters of `shape`
/// and sets the stage's input/output/condition channel counts.
NetConfig stage_net_config(Stage stage, const NetConfig& shape);

struct ConditionSet {
  Eigen::MatrixXd pos;    // 7 x N
  Eigen::MatrixXd audio;  // 2 x N (common) or 4 x N (specific)
};

/// common:   audio = [mean(warp_l(x), warp_r(x)), x]
/// specific: audio = [warp_l(x), warp_r(x), x, reference_mono], where the
///           reference is the golden channel average during training and the
///           common-stage output during inference.
/// `track` must hold one pose per audio sample.
ConditionSet build_condition(Stage stage, const AudioClip& x, const PoseTrack& track,
                             const AudioClip* reference_mono = nullptr,
                             double speed_of_sound = kDefaultSpeedOfSound);

/// Clean data the stage learns: the channel average (common) or both
/// channels (specific), as channels x N.
Signal stage_target(Stage stage, const AudioClip& binaural);

Signal to_signal(const AudioClip& clip);
AudioClip to_clip(const Signal& s, double sample_rate);

// Amplitude normalization applied to every audio channel a stage sees.
// With source_rms, targets and audio conditions are divided by the RMS of
// the clip's mono source, and generated audio is multiplied back. The
// source is available at inference, so the factor never leaks the target.
enum class AudioScaling { none, source_rms };

const char* to_string(AudioScaling scaling);
AudioScaling audio_scaling_from_string(const std::string& name);

// Divisor for the clip; 1 for AudioScaling::none or a silent source.
double audio_scale(AudioScaling scaling, const AudioClip& x);

// Learning-rate schedule over the training run. Cosine decays from the
// configured rate at step 1 toward zero at the last step.
enum class LrSchedule { constant, cosine };

const char* to_string(LrSchedule schedule);
LrSchedule lr_schedule_from_string(const std::string& name);

// Learning rate for 1-based `step` of `steps`.
double scheduled_lr(LrSchedule schedule, double base_lr, int step, int steps);

struct TrainOptions {
  AdamConfig adam;
  LrSchedule lr_schedule = LrSchedule::constant;
  int steps = 3000;
  std::uint64_t seed = 0;
  double speed_of_sound = kDefaultSpeedOfSound;
  EarOffsets ear_offsets;
  AudioScaling scaling = AudioScaling::source_rms;
};

struct TrainingLog {
  std::vector<std::pair<int, double>> losses;  // (step, loss), step is 1-based
  std::vector<std::string> notes;

  /// Mean loss over the first/last `window` entries.
  double head_mean(std::size_t window) const;
  double tail_mean(std::size_t window) const;

  /// `step,loss` lines.
  void write(const std::filesystem::path& path) const;
};

struct TrainedStage {
  ParamSet params;
  NetConfig config;
  TrainingLog log;
  AudioScaling scaling = AudioScaling::source_rms;
};

/// Trains one stage on whole clips: pick a clip, draw t and eps, corrupt the
/// stage target, predict eps, take an Adam step on the element-mean squared
/// error. Deterministic given options.seed.
TrainedStage train_stage(Stage stage, const Manifest& manifest, const NetConfig& shape,
                         const NoiseSchedule& schedule, const TrainOptions& options);

/// Writes a stage checkpoint whose meta records the stage and the training
/// betas (needed to align the inference schedule).
void save_stage_checkpoint(const std::filesystem::path& path, Stage stage,
                           const TrainedStage& trained, const NoiseSchedule& schedule);

struct StageModel {
  Stage stage = Stage::common;
  NetConfig config;
  ParamSet params;
  NoiseSchedule train_schedule = NoiseSchedule::from_betas({0.5});
  AudioScaling scaling = AudioScaling::source_rms;
};

StageModel load_stage_model(const std::filesystem::path& path);

struct SynthesisOptions {
  std::uint64_t seed = 0;
  double speed_of_sound = kDefaultSpeedOfSound;
  /// Replaces the common-stage output in the specific stage's condition
  /// (e.g. with the golden channel average for an upper-bound probe).
  std::optional<AudioClip> specific_reference;
};

struct SynthesisResult {
  AudioClip binaural;
  AudioClip common;  // common-stage output y_c
};

/// Common stage, then the specific stage conditioned on its output. Each
/// stage uses its own RNG stream derived from options.seed.
SynthesisResult synthesize(const AudioClip& x, const PoseTrack& track, const StageModel& common,
                           const StageModel& specific, const NoiseSchedule& infer_schedule,
                           const SynthesisOptions& options);

/// Samples a single stage given an explicit condition.
// Samples one stage in the model's normalized domain. `condition` is in
// signal units; it is divided by `scale` before the network sees it and the
// result is multiplied by `scale`.
Signal sample_stage(const StageModel& model, const ConditionSet& condition,
                    const NoiseSchedule& infer_schedule, std::uint64_t seed, double scale = 1.0);

}  // namespace binsynth
