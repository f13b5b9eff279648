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

#include "binsynth/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "binsynth/error.hpp"

namespace binsynth {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  fail(ErrorCode::BadConfig, key + ": " + what);
}

// Rejects keys outside `allowed` so that typos never pass silently.
void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.count(key) == 0) {
      bad(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(key, "must be finite");
  return d;
}

long long get_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<long long>();
}

int get_int(const json& v, const std::string& key) {
  const long long x = get_integer(v, key);
  if (x < -2147483647LL || x > 2147483647LL) bad(key, "out of range");
  return static_cast<int>(x);
}

std::uint64_t get_seed(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const long long x = get_integer(v, key);
  if (x < 0) bad(key, "must be >= 0");
  return static_cast<std::uint64_t>(x);
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_number(v[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Eigen::Vector3d get_vec3(const json& v, const std::string& key) {
  const auto xs = get_numbers(v, key);
  if (xs.size() != 3) bad(key, "expected 3 numbers");
  return {xs[0], xs[1], xs[2]};
}

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

const char* encoding_name(WavEncoding e) { return e == WavEncoding::pcm16 ? "pcm16" : "float32"; }

json stft_to_json(const StftConfig& c) {
  return json{{"fft_size", c.fft_size}, {"hop", c.hop}, {"center", c.center}};
}

StftConfig stft_from_json(const json& v, const std::string& key, StftConfig c) {
  check_keys(v, key, {"fft_size", "hop", "center"});
  if (v.contains("fft_size")) {
    const long long n = get_integer(v["fft_size"], key + ".fft_size");
    if (n <= 0) bad(key + ".fft_size", "must be > 0");
    c.fft_size = static_cast<std::size_t>(n);
  }
  if (v.contains("hop")) {
    const long long n = get_integer(v["hop"], key + ".hop");
    if (n <= 0) bad(key + ".hop", "must be > 0");
    c.hop = static_cast<std::size_t>(n);
  }
  if (v.contains("center")) c.center = get_bool(v["center"], key + ".center");
  return c;
}

void apply_audio(const json& s, AudioSection& a) {
  check_keys(s, "audio", {"sample_rate", "speed_of_sound", "ear_offsets", "output_encoding"});
  if (s.contains("sample_rate")) a.sample_rate = get_number(s["sample_rate"], "audio.sample_rate");
  if (s.contains("speed_of_sound")) {
    a.speed_of_sound = get_number(s["speed_of_sound"], "audio.speed_of_sound");
  }
  if (s.contains("ear_offsets")) {
    const json& e = s["ear_offsets"];
    check_keys(e, "audio.ear_offsets", {"left", "right"});
    if (e.contains("left")) a.ear_offsets.left = get_vec3(e["left"], "audio.ear_offsets.left");
    if (e.contains("right")) a.ear_offsets.right = get_vec3(e["right"], "audio.ear_offsets.right");
  }
  if (s.contains("output_encoding")) {
    const std::string enc = get_string(s["output_encoding"], "audio.output_encoding");
    if (enc == "pcm16") {
      a.output_encoding = WavEncoding::pcm16;
    } else if (enc == "float32") {
      a.output_encoding = WavEncoding::float32;
    } else {
      bad("audio.output_encoding", "expected \"pcm16\" or \"float32\", got \"" + enc + "\"");
    }
  }
}

void apply_data(const json& s, DataSection& d) {
  check_keys(s, "data", {"seed", "n_clips", "clip_seconds", "pose_rate", "room", "listener_position"});
  if (s.contains("seed")) d.seed = get_seed(s["seed"], "data.seed");
  if (s.contains("n_clips")) {
    const long long n = get_integer(s["n_clips"], "data.n_clips");
    if (n < 0) bad("data.n_clips", "must be >= 0");
    d.n_clips = static_cast<std::size_t>(n);
  }
  if (s.contains("clip_seconds")) d.clip_seconds = get_number(s["clip_seconds"], "data.clip_seconds");
  if (s.contains("pose_rate")) d.pose_rate = get_number(s["pose_rate"], "data.pose_rate");
  if (s.contains("listener_position")) {
    d.listener_position = get_vec3(s["listener_position"], "data.listener_position");
  }
  if (s.contains("room")) {
    const json& r = s["room"];
    check_keys(r, "data.room", {"dimensions", "absorption", "max_order"});
    if (r.contains("dimensions")) d.room.dimensions = get_vec3(r["dimensions"], "data.room.dimensions");
    if (r.contains("absorption")) {
      const json& a = r["absorption"];
      if (a.is_number()) {
        d.room.absorption.fill(get_number(a, "data.room.absorption"));
      } else {
        const auto xs = get_numbers(a, "data.room.absorption");
        if (xs.size() != 6) bad("data.room.absorption", "expected a number or 6 numbers");
        std::copy(xs.begin(), xs.end(), d.room.absorption.begin());
      }
    }
    if (r.contains("max_order")) d.room.max_order = get_int(r["max_order"], "data.room.max_order");
  }
}

void apply_schedule(const json& s, ScheduleSection& c) {
  check_keys(s, "schedule", {"train_steps", "beta_start", "beta_end", "infer_betas"});
  if (s.contains("train_steps")) c.train_steps = get_int(s["train_steps"], "schedule.train_steps");
  if (s.contains("beta_start")) c.beta_start = get_number(s["beta_start"], "schedule.beta_start");
  if (s.contains("beta_end")) c.beta_end = get_number(s["beta_end"], "schedule.beta_end");
  if (s.contains("infer_betas")) c.infer_betas = get_numbers(s["infer_betas"], "schedule.infer_betas");
}

void apply_net(const json& s, NetSection& n) {
  check_keys(s, "net", {"residual_blocks", "layers_per_block", "hidden", "step_embed_dim",
                        "dilation_cycle", "conditioner_kernel", "conditioner_layers"});
  const auto set = [&](const char* key, int& field) {
    if (s.contains(key)) field = get_int(s[key], std::string("net.") + key);
  };
  set("residual_blocks", n.residual_blocks);
  set("layers_per_block", n.layers_per_block);
  set("hidden", n.hidden);
  set("step_embed_dim", n.step_embed_dim);
  set("dilation_cycle", n.dilation_cycle);
  set("conditioner_kernel", n.conditioner_kernel);
  set("conditioner_layers", n.conditioner_layers);
}

void apply_train(const json& s, TrainSection& t) {
  check_keys(s, "train", {"lr", "lr_schedule", "beta1", "beta2", "eps", "steps", "seed",
                          "audio_scaling"});
  if (s.contains("lr")) t.lr = get_number(s["lr"], "train.lr");
  if (s.contains("lr_schedule")) {
    try {
      t.lr_schedule = lr_schedule_from_string(get_string(s["lr_schedule"], "train.lr_schedule"));
    } catch (const Error& e) {
      bad("train.lr_schedule", e.detail());
    }
  }
  if (s.contains("beta1")) t.beta1 = get_number(s["beta1"], "train.beta1");
  if (s.contains("beta2")) t.beta2 = get_number(s["beta2"], "train.beta2");
  if (s.contains("eps")) t.eps = get_number(s["eps"], "train.eps");
  if (s.contains("steps")) t.steps = get_int(s["steps"], "train.steps");
  if (s.contains("seed")) t.seed = get_seed(s["seed"], "train.seed");
  if (s.contains("audio_scaling")) {
    try {
      t.audio_scaling = audio_scaling_from_string(get_string(s["audio_scaling"], "train.audio_scaling"));
    } catch (const Error& e) {
      bad("train.audio_scaling", e.detail());
    }
  }
}

void apply_metrics(const json& s, MetricsConfig& m) {
  check_keys(s, "metrics", {"stft", "resolutions"});
  if (s.contains("stft")) m.stft = stft_from_json(s["stft"], "metrics.stft", m.stft);
  if (s.contains("resolutions")) {
    const json& r = s["resolutions"];
    if (!r.is_array()) bad("metrics.resolutions", "expected an array of objects");
    m.resolutions.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      m.resolutions.push_back(
          stft_from_json(r[i], "metrics.resolutions[" + std::to_string(i) + "]", StftConfig{}));
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!(audio.sample_rate > 0.0)) bad("audio.sample_rate", "must be > 0");
  if (!(audio.speed_of_sound > 0.0)) bad("audio.speed_of_sound", "must be > 0");
  if (!(data.clip_seconds > 0.0)) bad("data.clip_seconds", "must be > 0");
  if (!(data.pose_rate > 0.0)) bad("data.pose_rate", "must be > 0");
  try {
    data.room.validate();
  } catch (const Error& e) {
    bad("data.room", e.detail());
  }
  for (int i = 0; i < 3; ++i) {
    if (!(data.listener_position[i] > 0.0 && data.listener_position[i] < data.room.dimensions[i])) {
      bad("data.listener_position", "must lie strictly inside the room");
    }
  }
  if (schedule.train_steps < 1) bad("schedule.train_steps", "must be >= 1");
  if (!(schedule.beta_start > 0.0 && schedule.beta_start < 1.0)) bad("schedule.beta_start", "must be in (0, 1)");
  if (!(schedule.beta_end > 0.0 && schedule.beta_end < 1.0)) bad("schedule.beta_end", "must be in (0, 1)");
  if (schedule.infer_betas.empty()) bad("schedule.infer_betas", "must not be empty");
  for (double b : schedule.infer_betas) {
    if (!(b > 0.0 && b < 1.0)) bad("schedule.infer_betas", "every value must be in (0, 1)");
  }
  try {
    net_shape().validate();
  } catch (const Error& e) {
    bad("net", e.detail());
  }
  if (!(train.lr > 0.0)) bad("train.lr", "must be > 0");
  if (!(train.beta1 >= 0.0 && train.beta1 < 1.0)) bad("train.beta1", "must be in [0, 1)");
  if (!(train.beta2 >= 0.0 && train.beta2 < 1.0)) bad("train.beta2", "must be in [0, 1)");
  if (!(train.eps > 0.0)) bad("train.eps", "must be > 0");
  if (train.steps < 0) bad("train.steps", "must be >= 0");
  if (metrics.resolutions.empty()) bad("metrics.resolutions", "must not be empty");
  try {
    metrics.stft.validate();
    for (const auto& r : metrics.resolutions) r.validate();
  } catch (const Error& e) {
    bad("metrics", e.detail());
  }
}

NoiseSchedule RunConfig::train_schedule() const {
  return NoiseSchedule::make(ScheduleKind::linear, schedule.train_steps, schedule.beta_start,
                             schedule.beta_end);
}

NoiseSchedule RunConfig::infer_schedule() const { return NoiseSchedule::from_betas(schedule.infer_betas); }

NetConfig RunConfig::net_shape() const {
  NetConfig c;
  c.residual_blocks = net.residual_blocks;
  c.layers_per_block = net.layers_per_block;
  c.hidden = net.hidden;
  c.step_embed_dim = net.step_embed_dim;
  c.dilation_cycle = net.dilation_cycle;
  c.conditioner_kernel = net.conditioner_kernel;
  c.conditioner_layers = net.conditioner_layers;
  c.train_steps = schedule.train_steps;
  return c;
}

TrainOptions RunConfig::train_options() const {
  TrainOptions o;
  o.adam = AdamConfig{train.lr, train.beta1, train.beta2, train.eps};
  o.lr_schedule = train.lr_schedule;
  o.steps = train.steps;
  o.seed = train.seed;
  o.speed_of_sound = audio.speed_of_sound;
  o.ear_offsets = audio.ear_offsets;
  o.scaling = train.audio_scaling;
  return o;
}

SyntheticDatasetSpec RunConfig::dataset_spec() const {
  SyntheticDatasetSpec s;
  s.seed = data.seed;
  s.n_clips = data.n_clips;
  s.clip_seconds = data.clip_seconds;
  s.sample_rate = audio.sample_rate;
  s.pose_rate = data.pose_rate;
  s.ear_offsets = audio.ear_offsets;
  return s;
}

DspRenderConfig RunConfig::render_config() const {
  DspRenderConfig r;
  r.room = data.room;
  r.listener_position = data.listener_position;
  r.speed_of_sound = audio.speed_of_sound;
  return r;
}

std::vector<std::string> profile_names() { return {"toy", "paper"}; }

RunConfig profile(const std::string& name) {
  RunConfig c;
  c.profile = name;
  if (name == "toy") {
    // Only a few thousand updates are affordable at this scale, so the toy
    // profile trains with a larger decaying rate. Its inference grid ends
    // closer to pure noise because the short run leaves the network unable
    // to denoise from the partially corrupted starting point of the default
    // grid.
    c.train.lr = 1e-2;
    c.train.lr_schedule = LrSchedule::cosine;
    c.schedule.infer_betas = {1e-3, 1e-2, 5e-2, 2e-1, 5e-1, 9e-1};
    return c;
  }
  if (name == "paper") {
    c.audio.sample_rate = 48000.0;
    c.net.residual_blocks = 3;
    c.net.layers_per_block = 10;
    c.net.hidden = 128;
    c.net.step_embed_dim = 128;
    c.train.steps = 1000000;
    return c;
  }
  fail(ErrorCode::BadConfig, "profile: unknown profile \"" + name + "\" (expected toy or paper)");
}

RunConfig parse_run_config(const std::string& text, const RunConfig& base) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::BadConfig, std::string("parse error: ") + e.what());
  }
  check_keys(doc, "", {"profile", "audio", "data", "schedule", "net", "train", "synth", "metrics", "paths"});
  RunConfig c = base;
  if (doc.contains("profile")) c = profile(get_string(doc["profile"], "profile"));
  if (doc.contains("audio")) apply_audio(doc["audio"], c.audio);
  if (doc.contains("data")) apply_data(doc["data"], c.data);
  if (doc.contains("schedule")) apply_schedule(doc["schedule"], c.schedule);
  if (doc.contains("net")) apply_net(doc["net"], c.net);
  if (doc.contains("train")) apply_train(doc["train"], c.train);
  if (doc.contains("synth")) {
    check_keys(doc["synth"], "synth", {"seed"});
    if (doc["synth"].contains("seed")) c.synth.seed = get_seed(doc["synth"]["seed"], "synth.seed");
  }
  if (doc.contains("metrics")) apply_metrics(doc["metrics"], c.metrics);
  if (doc.contains("paths")) {
    check_keys(doc["paths"], "paths", {"hrtf_dir"});
    if (doc["paths"].contains("hrtf_dir")) {
      c.paths.hrtf_dir = get_string(doc["paths"]["hrtf_dir"], "paths.hrtf_dir");
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_run_config(ss.str(), base);
  // Relative HRTF directories are taken relative to the config file.
  if (!c.paths.hrtf_dir.empty() && c.paths.hrtf_dir.is_relative()) {
    c.paths.hrtf_dir = path.parent_path() / c.paths.hrtf_dir;
  }
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  json resolutions = json::array();
  for (const auto& r : c.metrics.resolutions) resolutions.push_back(stft_to_json(r));
  json absorption = json::array();
  for (double a : c.data.room.absorption) absorption.push_back(a);
  const json doc{
      {"profile", c.profile},
      {"audio",
       {{"sample_rate", c.audio.sample_rate},
        {"speed_of_sound", c.audio.speed_of_sound},
        {"ear_offsets", {{"left", vec3(c.audio.ear_offsets.left)}, {"right", vec3(c.audio.ear_offsets.right)}}},
        {"output_encoding", encoding_name(c.audio.output_encoding)}}},
      {"data",
       {{"seed", c.data.seed},
        {"n_clips", c.data.n_clips},
        {"clip_seconds", c.data.clip_seconds},
        {"pose_rate", c.data.pose_rate},
        {"room",
         {{"dimensions", vec3(c.data.room.dimensions)},
          {"absorption", absorption},
          {"max_order", c.data.room.max_order}}},
        {"listener_position", vec3(c.data.listener_position)}}},
      {"schedule",
       {{"train_steps", c.schedule.train_steps},
        {"beta_start", c.schedule.beta_start},
        {"beta_end", c.schedule.beta_end},
        {"infer_betas", c.schedule.infer_betas}}},
      {"net",
       {{"residual_blocks", c.net.residual_blocks},
        {"layers_per_block", c.net.layers_per_block},
        {"hidden", c.net.hidden},
        {"step_embed_dim", c.net.step_embed_dim},
        {"dilation_cycle", c.net.dilation_cycle},
        {"conditioner_kernel", c.net.conditioner_kernel},
        {"conditioner_layers", c.net.conditioner_layers}}},
      {"train",
       {{"lr", c.train.lr},
        {"lr_schedule", to_string(c.train.lr_schedule)},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"eps", c.train.eps},
        {"steps", c.train.steps},
        {"seed", c.train.seed},
        {"audio_scaling", to_string(c.train.audio_scaling)}}},
      {"synth", {{"seed", c.synth.seed}}},
      {"metrics", {{"stft", stft_to_json(c.metrics.stft)}, {"resolutions", resolutions}}},
      {"paths", {{"hrtf_dir", c.paths.hrtf_dir.string()}}},
  };
  return doc.dump(2) + "\n";
}

HrtfBank resolve_hrtf_bank(const RunConfig& config) {
  if (config.paths.hrtf_dir.empty()) return synthetic_hrtf_bank(config.audio.sample_rate);
  return load_hrtf_bank(config.paths.hrtf_dir);
}

}  // namespace binsynth
