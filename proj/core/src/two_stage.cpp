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

#include "binsynth/two_stage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"

#include "binsynth/error.hpp"

namespace binsynth {

using json = nlohmann::json;

StageSpec StageSpec::of(Stage stage) {
  if (stage == Stage::common) return {Stage::common, 1, 2, "channel average of the binaural reference"};
  return {Stage::specific, 2, 4, "left and right channels of the binaural reference"};
}

NetConfig stage_net_config(Stage stage, const NetConfig& shape) {
  const StageSpec spec = StageSpec::of(stage);
  NetConfig c = shape;
  c.in_channels = spec.channels;
  c.out_channels = spec.channels;
  c.cond_audio_channels = spec.cond_audio_channels;
  c.cond_pos_channels = 7;
  return c;
}

Signal to_signal(const AudioClip& clip) {
  Signal s(static_cast<Eigen::Index>(clip.channels()), static_cast<Eigen::Index>(clip.length()));
  for (std::size_t c = 0; c < clip.channels(); ++c) {
    const auto ch = clip.channel(c);
    for (std::size_t n = 0; n < ch.size(); ++n) {
      s(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(n)) = ch[n];
    }
  }
  return s;
}

AudioClip to_clip(const Signal& s, double sample_rate) {
  std::vector<std::vector<double>> ch(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index c = 0; c < s.rows(); ++c) {
    ch[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(s.cols()));
    for (Eigen::Index n = 0; n < s.cols(); ++n) {
      ch[static_cast<std::size_t>(c)][static_cast<std::size_t>(n)] = s(c, n);
    }
  }
  return AudioClip(sample_rate, std::move(ch));
}

ConditionSet build_condition(Stage stage, const AudioClip& x, const PoseTrack& track,
                             const AudioClip* reference_mono, double speed_of_sound) {
  if (x.channels() != 1) fail(ErrorCode::WrongChannelCount, "condition source must be mono");
  const std::size_t n = x.length();
  if (track.size() != n) {
    fail(ErrorCode::LengthMismatch, "pose track has " + std::to_string(track.size()) +
                                        " samples, clip has " + std::to_string(n));
  }
  if (stage == Stage::specific) {
    if (reference_mono == nullptr) {
      fail(ErrorCode::MissingStage2Conditioner,
           "the specific stage needs the mono reference (golden average or common-stage output)");
    }
    if (reference_mono->channels() != 1) {
      fail(ErrorCode::WrongChannelCount, "mono reference must have one channel");
    }
    if (reference_mono->length() != n) {
      fail(ErrorCode::LengthMismatch, "mono reference length differs from the clip");
    }
  }

  const AudioClip warped = warp_binaural(x, track, speed_of_sound);
  const auto l = warped.channel(0);
  const auto r = warped.channel(1);
  const auto src = x.channel(0);
  const auto cols = static_cast<Eigen::Index>(n);

  ConditionSet c;
  c.pos = pose_features(track);
  if (stage == Stage::common) {
    c.audio.resize(2, cols);
    for (Eigen::Index i = 0; i < cols; ++i) {
      const auto u = static_cast<std::size_t>(i);
      c.audio(0, i) = 0.5 * (l[u] + r[u]);
      c.audio(1, i) = src[u];
    }
  } else {
    const auto ref = reference_mono->channel(0);
    c.audio.resize(4, cols);
    for (Eigen::Index i = 0; i < cols; ++i) {
      const auto u = static_cast<std::size_t>(i);
      c.audio(0, i) = l[u];
      c.audio(1, i) = r[u];
      c.audio(2, i) = src[u];
      c.audio(3, i) = ref[u];
    }
  }
  return c;
}

const char* to_string(AudioScaling scaling) {
  return scaling == AudioScaling::none ? "none" : "source_rms";
}

AudioScaling audio_scaling_from_string(const std::string& name) {
  if (name == "none") return AudioScaling::none;
  if (name == "source_rms") return AudioScaling::source_rms;
  fail(ErrorCode::BadConfig, "audio scaling must be \"none\" or \"source_rms\", got \"" + name + "\"");
}

const char* to_string(LrSchedule schedule) {
  return schedule == LrSchedule::constant ? "constant" : "cosine";
}

LrSchedule lr_schedule_from_string(const std::string& name) {
  if (name == "constant") return LrSchedule::constant;
  if (name == "cosine") return LrSchedule::cosine;
  fail(ErrorCode::BadConfig, "learning-rate schedule must be \"constant\" or \"cosine\", got \"" + name + "\"");
}

double scheduled_lr(LrSchedule schedule, double base_lr, int step, int steps) {
  if (schedule == LrSchedule::constant || steps <= 1) return base_lr;
  const double progress = static_cast<double>(step - 1) / static_cast<double>(steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

double audio_scale(AudioScaling scaling, const AudioClip& x) {
  if (scaling == AudioScaling::none || x.length() == 0) return 1.0;
  double energy = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (double v : x.channel(c)) energy += v * v;
    count += x.length();
  }
  const double rms = std::sqrt(energy / static_cast<double>(count));
  return rms > 1e-8 ? rms : 1.0;
}

Signal stage_target(Stage stage, const AudioClip& binaural) {
  if (binaural.channels() != 2) fail(ErrorCode::WrongChannelCount, "stage target needs a binaural clip");
  return stage == Stage::common ? to_signal(channel_average(binaural)) : to_signal(binaural);
}

double TrainingLog::head_mean(std::size_t window) const {
  const std::size_t n = std::min(window, losses.size());
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += losses[i].second;
  return acc / static_cast<double>(n);
}

double TrainingLog::tail_mean(std::size_t window) const {
  const std::size_t n = std::min(window, losses.size());
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = losses.size() - n; i < losses.size(); ++i) acc += losses[i].second;
  return acc / static_cast<double>(n);
}

void TrainingLog::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << "step,loss\n";
  char buf[64];
  for (const auto& [step, loss] : losses) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", step, loss);
    out << buf;
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

struct TrainingExample {
  ConditionSet condition;
  Signal target;
};

}  // namespace

TrainedStage train_stage(Stage stage, const Manifest& manifest, const NetConfig& shape,
                         const NoiseSchedule& schedule, const TrainOptions& options) {
  if (manifest.rows.empty()) fail(ErrorCode::EmptyDataset, "training manifest has no rows");
  if (options.steps < 0) fail(ErrorCode::BadConfig, "train.steps must be >= 0");

  TrainedStage out;
  out.scaling = options.scaling;
  out.config = stage_net_config(stage, shape);
  out.config.train_steps = schedule.steps();
  out.config.validate();

  std::vector<TrainingExample> examples;
  double rate = 0.0;
  for (const auto& row : manifest.rows) {
    const ClipRecord rec = load_clip(row, options.ear_offsets);
    if (rate == 0.0) rate = rec.mono.sample_rate();
    if (rec.mono.sample_rate() != rate) {
      fail(ErrorCode::RateMismatch, rec.name + " has a different sample rate from the first clip");
    }
    const PoseTrack track = resample_pose(rec.pose, rate, rec.mono.length());
    TrainingExample ex;
    if (stage == Stage::common) {
      ex.condition = build_condition(stage, rec.mono, track, nullptr, options.speed_of_sound);
    } else {
      const AudioClip ybar = channel_average(rec.binaural);
      ex.condition = build_condition(stage, rec.mono, track, &ybar, options.speed_of_sound);
    }
    ex.target = stage_target(stage, rec.binaural);
    const double scale = audio_scale(options.scaling, rec.mono);
    ex.condition.audio /= scale;
    ex.target /= scale;
    examples.push_back(std::move(ex));
  }
  if (stage == Stage::specific) {
    out.log.notes.push_back(
        "specific stage trains on the golden channel average; inference conditions on the "
        "common-stage output instead");
  }

  std::mt19937_64 rng(options.seed);
  out.params = init_params(out.config, rng());
  AdamState adam = AdamState::for_params(out.params);
  std::uniform_int_distribution<std::size_t> pick_clip(0, examples.size() - 1);
  std::uniform_int_distribution<int> pick_step(1, schedule.steps());

  ForwardContext ctx;
  AdamConfig adam_config = options.adam;
  for (int step = 1; step <= options.steps; ++step) {
    const TrainingExample& ex = examples[pick_clip(rng)];
    const int t = pick_step(rng);
    const Signal eps = gaussian(ex.target.rows(), ex.target.cols(), rng);
    const Signal zt = forward_sample(ex.target, t, eps, schedule);
    const Signal pred =
        forward(zt, t, ex.condition.pos, ex.condition.audio, out.params, out.config, &ctx);
    const double loss = training_loss(eps, pred);
    if (!std::isfinite(loss)) {
      fail(ErrorCode::InvariantViolation, "training loss became non-finite at step " + std::to_string(step));
    }
    out.log.losses.emplace_back(step, loss);
    const GradientSet grads = backward(ctx, training_loss_grad(eps, pred));
    adam_config.lr = scheduled_lr(options.lr_schedule, options.adam.lr, step, options.steps);
    adam_step(out.params, grads, adam, adam_config);
  }
  return out;
}

void save_stage_checkpoint(const std::filesystem::path& path, Stage stage,
                           const TrainedStage& trained, const NoiseSchedule& schedule) {
  const json meta{{"stage", static_cast<int>(stage)},
                  {"train_betas", schedule.betas()},
                  {"audio_scaling", to_string(trained.scaling)},
                  {"trained_steps", trained.log.losses.size()}};
  save_checkpoint(path, trained.params, trained.config, meta.dump());
}

StageModel load_stage_model(const std::filesystem::path& path) {
  Checkpoint ck = load_checkpoint(path);
  StageModel m;
  json meta;
  try {
    meta = json::parse(ck.meta_json);
    const int stage = meta.at("stage").get<int>();
    if (stage != 1 && stage != 2) throw std::runtime_error("stage must be 1 or 2");
    m.stage = static_cast<Stage>(stage);
    m.train_schedule = NoiseSchedule::from_betas(meta.at("train_betas").get<std::vector<double>>());
    m.scaling = audio_scaling_from_string(meta.at("audio_scaling").get<std::string>());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::CorruptArray, "<meta>: " + std::string(e.what()));
  }
  m.config = ck.config;
  m.params = std::move(ck.params);
  if (m.config.train_steps != m.train_schedule.steps()) {
    fail(ErrorCode::CorruptArray, "<meta>: training schedule length differs from net.train_steps");
  }
  return m;
}

namespace {

void check_stage(const StageModel& model, Stage expected, const char* role) {
  const StageSpec spec = StageSpec::of(expected);
  if (model.stage != expected || model.config.in_channels != spec.channels ||
      model.config.out_channels != spec.channels ||
      model.config.cond_audio_channels != spec.cond_audio_channels) {
    fail(ErrorCode::StageConfigMismatch,
         std::string(role) + " checkpoint is a stage-" + std::to_string(static_cast<int>(model.stage)) +
             " model with " + std::to_string(model.config.in_channels) + " channel(s); expected stage " +
             std::to_string(static_cast<int>(expected)));
  }
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint64_t out[1];
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out[0];
}

}  // namespace

Signal sample_stage(const StageModel& model, const ConditionSet& condition,
                    const NoiseSchedule& infer_schedule, std::uint64_t seed, double scale) {
  if (!(scale > 0.0)) fail(ErrorCode::BadRange, "audio scale must be positive");
  const std::vector<int> aligned = align_schedules(model.train_schedule, infer_schedule);
  const Eigen::MatrixXd audio = condition.audio / scale;
  const Denoiser denoiser = [&](const Signal& z, int s) {
    return forward(z, aligned[static_cast<std::size_t>(s - 1)], condition.pos, audio, model.params,
                   model.config);
  };
  std::mt19937_64 rng(seed);
  return scale * sample(denoiser, infer_schedule, model.config.out_channels, audio.cols(), rng);
}

SynthesisResult synthesize(const AudioClip& x, const PoseTrack& track, const StageModel& common,
                           const StageModel& specific, const NoiseSchedule& infer_schedule,
                           const SynthesisOptions& options) {
  check_stage(common, Stage::common, "first");
  check_stage(specific, Stage::specific, "second");
  if (x.channels() != 1) fail(ErrorCode::WrongChannelCount, "synthesis input must be mono");
  const PoseTrack at_rate = (track.rate == x.sample_rate() && track.size() == x.length())
                                ? track
                                : resample_pose(track, x.sample_rate(), x.length());

  SynthesisResult result;
  const ConditionSet c1 = build_condition(Stage::common, x, at_rate, nullptr, options.speed_of_sound);
  result.common = to_clip(sample_stage(common, c1, infer_schedule, stream_seed(options.seed, 1),
                                       audio_scale(common.scaling, x)),
                          x.sample_rate());

  const AudioClip& reference = options.specific_reference ? *options.specific_reference : result.common;
  const ConditionSet c2 =
      build_condition(Stage::specific, x, at_rate, &reference, options.speed_of_sound);
  result.binaural = to_clip(sample_stage(specific, c2, infer_schedule, stream_seed(options.seed, 2),
                                         audio_scale(specific.scaling, x)),
                            x.sample_rate());
  return result;
}

}  // namespace binsynth
