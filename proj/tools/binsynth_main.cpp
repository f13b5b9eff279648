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

// binsynth command-line tool.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 internal invariant violation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "CLI11.hpp"

#include "binsynth/audio.hpp"
#include "binsynth/config.hpp"
#include "binsynth/dataset.hpp"
#include "binsynth/dsp.hpp"
#include "binsynth/error.hpp"
#include "binsynth/metrics.hpp"
#include "binsynth/pose.hpp"
#include "binsynth/two_stage.hpp"
#include "binsynth/wav.hpp"

namespace fs = std::filesystem;
using namespace binsynth;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct GlobalOptions {
  std::string config_path;
  std::string profile_name = "toy";
  bool quiet = false;
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig base = profile(g.profile_name);
  if (g.config_path.empty()) return base;
  return load_run_config(g.config_path, base);
}

void say(const GlobalOptions& g, const std::string& line) {
  if (!g.quiet) std::cout << line << '\n';
}

PoseTrack read_track(const fs::path& path, const RunConfig& cfg) {
  PoseTrack track = read_pose_csv(path);
  track.ear_offsets = cfg.audio.ear_offsets;
  return track;
}

AudioClip read_mono(const fs::path& path) {
  const AudioClip x = read_wav(path);
  if (x.channels() != 1) {
    fail(ErrorCode::WrongChannelCount,
         path.string() + " has " + std::to_string(x.channels()) + " channels, expected mono");
  }
  return x;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadConfig:
      return kUsage;
    case ErrorCode::InvariantViolation:
    case ErrorCode::StaleContext:
      return kInternal;
    default:
      return kData;
  }
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Training allocates many short-lived multi-megabyte matrices; keeping them
  // on the heap instead of fresh mmap regions avoids page-fault churn.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  CLI::App app{"binsynth: binaural synthesis from mono audio and pose tracks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "binsynth 0.1.0");

  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "JSON run configuration overlaid on the profile")
      ->check(CLI::ExistingFile);
  app.add_option("-p,--profile", g.profile_name, "built-in profile (toy or paper)")
      ->capture_default_str();
  app.add_flag("-q,--quiet", g.quiet, "suppress progress output");

  // make-data
  auto* make_data = app.add_subcommand("make-data", "generate a DSP-rendered synthetic dataset");
  std::string data_out;
  std::optional<std::uint64_t> data_seed;
  make_data->add_option("-o,--out", data_out, "output directory")->required();
  make_data->add_option("--seed", data_seed, "override data.seed");

  // train
  auto* train = app.add_subcommand("train", "train the common (1) or specific (2) stage");
  int stage_flag = 1;
  std::string train_manifest, train_out, train_log;
  std::optional<std::uint64_t> train_seed;
  std::optional<int> train_steps;
  train->add_option("-s,--stage", stage_flag, "stage to train")->required()->check(CLI::IsMember({1, 2}));
  train->add_option("-m,--manifest", train_manifest, "dataset manifest")->required();
  train->add_option("-o,--out", train_out, "output checkpoint")->required();
  train->add_option("--log", train_log, "loss log path (default: <out>.loss.csv)");
  train->add_option("--seed", train_seed, "override train.seed");
  train->add_option("--steps", train_steps, "override train.steps")->check(CLI::NonNegativeNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "two-stage diffusion synthesis");
  std::string synth_mono, synth_pose, synth_ck1, synth_ck2, synth_out, synth_common, synth_ref;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--mono", synth_mono, "mono source WAV")->required();
  synth->add_option("--pose", synth_pose, "pose CSV")->required();
  synth->add_option("--ckpt1", synth_ck1, "common-stage checkpoint")->required();
  synth->add_option("--ckpt2", synth_ck2, "specific-stage checkpoint")->required();
  synth->add_option("-o,--out", synth_out, "output binaural WAV")->required();
  synth->add_option("--common-out", synth_common, "also write the common-stage mono output");
  synth->add_option("--reference-mono", synth_ref,
                    "condition the specific stage on this mono WAV instead of the common-stage output");
  synth->add_option("--seed", synth_seed, "override synth.seed");

  // dsp-render
  auto* dsp = app.add_subcommand("dsp-render", "render binaural audio with the DSP baseline");
  std::string dsp_mono, dsp_pose, dsp_out;
  dsp->add_option("--mono", dsp_mono, "mono source WAV")->required();
  dsp->add_option("--pose", dsp_pose, "pose CSV")->required();
  dsp->add_option("-o,--out", dsp_out, "output binaural WAV")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against a manifest");
  std::string eval_pred, eval_manifest, eval_out;
  eval->add_option("--pred-dir", eval_pred, "directory with one prediction per binaural file")->required();
  eval->add_option("-m,--manifest", eval_manifest, "dataset manifest")->required();
  eval->add_option("-o,--out", eval_out, "report path")->required();

  // print-config
  auto* print_config = app.add_subcommand("print-config", "print the resolved configuration as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const RunConfig cfg = resolve_config(g);

    if (*make_data) {
      SyntheticDatasetSpec spec = cfg.dataset_spec();
      if (data_seed) spec.seed = *data_seed;
      const fs::path manifest =
          make_synthetic_dataset(spec, resolve_hrtf_bank(cfg), cfg.render_config(), data_out);
      say(g, "wrote " + manifest.string() + " (" + std::to_string(spec.n_clips) + " clips)");
    } else if (*train) {
      const Stage stage = stage_flag == 1 ? Stage::common : Stage::specific;
      TrainOptions opts = cfg.train_options();
      if (train_seed) opts.seed = *train_seed;
      if (train_steps) opts.steps = *train_steps;
      const Manifest manifest = read_manifest(train_manifest);
      const NoiseSchedule schedule = cfg.train_schedule();
      const TrainedStage trained = train_stage(stage, manifest, cfg.net_shape(), schedule, opts);
      save_stage_checkpoint(train_out, stage, trained, schedule);
      const fs::path log_path = train_log.empty() ? fs::path(train_out + ".loss.csv") : fs::path(train_log);
      trained.log.write(log_path);
      for (const auto& note : trained.log.notes) say(g, "note: " + note);
      char buf[160];
      std::snprintf(buf, sizeof(buf), "stage %d: %d steps, mean loss first 100 %.6g, last 100 %.6g",
                    stage_flag, opts.steps, trained.log.head_mean(100), trained.log.tail_mean(100));
      say(g, buf);
    } else if (*synth) {
      const AudioClip x = read_mono(synth_mono);
      const PoseTrack track = read_track(synth_pose, cfg);
      const StageModel common = load_stage_model(synth_ck1);
      const StageModel specific = load_stage_model(synth_ck2);
      SynthesisOptions opts;
      opts.seed = synth_seed ? *synth_seed : cfg.synth.seed;
      opts.speed_of_sound = cfg.audio.speed_of_sound;
      if (!synth_ref.empty()) opts.specific_reference = read_mono(synth_ref);
      const SynthesisResult r = synthesize(x, track, common, specific, cfg.infer_schedule(), opts);
      write_wav(r.binaural, synth_out, cfg.audio.output_encoding);
      if (!synth_common.empty()) write_wav(r.common, synth_common, cfg.audio.output_encoding);
      say(g, "wrote " + synth_out);
    } else if (*dsp) {
      const AudioClip x = read_mono(dsp_mono);
      const PoseTrack track = read_track(dsp_pose, cfg);
      write_wav(dsp_render_binaural(x, track, resolve_hrtf_bank(cfg), cfg.render_config()), dsp_out,
                cfg.audio.output_encoding);
      say(g, "wrote " + dsp_out);
    } else if (*eval) {
      const MetricReport report = evaluate_manifest(eval_pred, read_manifest(eval_manifest), cfg.metrics);
      write_report(report, eval_out);
      char buf[200];
      std::snprintf(buf, sizeof(buf), "AGGREGATE wave_l2 %.6g amplitude_l2 %.6g phase_l2 %.6g mrstft %.6g",
                    report.aggregate.wave_l2, report.aggregate.amplitude_l2, report.aggregate.phase_l2,
                    report.aggregate.mrstft);
      say(g, buf);
    } else if (*print_config) {
      std::cout << run_config_to_json(cfg);
    }
    return kOk;
  } catch (const Error& e) {
    std::cerr << "binsynth: error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "binsynth: internal error: " << e.what() << '\n';
    return kInternal;
  }
}
