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

#include "binsynth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "binsynth/error.hpp"
#include "binsynth/wav.hpp"

namespace binsynth {

namespace fs = std::filesystem;

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& s) {
    const fs::path p(s);
    return p.is_absolute() ? p : base / p;
  };
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 3) {
      fail(ErrorCode::BadRow, "manifest line " + std::to_string(line_no) + " needs 3 fields");
    }
    m.rows.push_back({resolve(fields[0]), resolve(fields[1]), resolve(fields[2])});
  }
  return m;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  for (const auto& r : manifest.rows) {
    out << r.mono.generic_string() << ',' << r.pose.generic_string() << ','
        << r.binaural.generic_string() << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

ClipRecord load_clip(const ManifestRow& row, const EarOffsets& ears) {
  ClipRecord rec;
  rec.name = row.binaural.stem().string();
  rec.mono = read_wav(row.mono);
  rec.pose = read_pose_csv(row.pose);
  rec.pose.ear_offsets = ears;
  rec.binaural = read_wav(row.binaural);
  if (rec.mono.channels() != 1) fail(ErrorCode::WrongChannelCount, row.mono.string() + " must be mono");
  if (rec.binaural.channels() != 2) {
    fail(ErrorCode::WrongChannelCount, row.binaural.string() + " must be binaural");
  }
  if (rec.mono.length() != rec.binaural.length()) {
    fail(ErrorCode::LengthMismatch, rec.name + ": mono and binaural lengths differ");
  }
  if (rec.mono.sample_rate() != rec.binaural.sample_rate()) {
    fail(ErrorCode::RateMismatch, rec.name + ": mono and binaural sample rates differ");
  }
  return rec;
}

namespace {

std::mt19937_64 clip_rng(std::uint64_t seed, std::size_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void peak_normalize(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0) {
    for (double& v : x) v *= peak / m;
  }
}

// Noise through a two-pole resonator, gated by Hann-shaped bursts.
std::vector<double> noise_bursts(std::mt19937_64& rng, std::size_t length, double sample_rate) {
  std::normal_distribution<double> white(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double fc = 250.0 + 0.2 * sample_rate * uni(rng);
  const double radius = 0.95;
  const double w = 2.0 * std::numbers::pi * fc / sample_rate;
  const double a1 = 2.0 * radius * std::cos(w);
  const double a2 = -radius * radius;

  std::vector<double> env(length, 0.0);
  std::size_t pos = static_cast<std::size_t>(0.02 * sample_rate * uni(rng));
  while (pos < length) {
    const auto len = static_cast<std::size_t>((0.06 + 0.18 * uni(rng)) * sample_rate);
    for (std::size_t i = 0; i < len && pos + i < length; ++i) {
      const double s = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
      env[pos + i] = s * s;
    }
    pos += len + static_cast<std::size_t>((0.01 + 0.08 * uni(rng)) * sample_rate);
  }

  std::vector<double> out(length);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t n = 0; n < length; ++n) {
    const double y = white(rng) + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    out[n] = y * env[n];
  }
  return out;
}

// Harmonic complex with 1/k amplitudes, slow pitch glide and syllable-rate AM.
std::vector<double> tone_complex(std::mt19937_64& rng, std::size_t length, double sample_rate) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double f0 = 110.0 + 150.0 * uni(rng);
  const double glide = 0.15 * (uni(rng) - 0.5);
  const double am_rate = 3.0 + 3.0 * uni(rng);
  const double am_phase = 2.0 * std::numbers::pi * uni(rng);
  const int harmonics = std::max(1, static_cast<int>(0.4 * sample_rate / f0));
  std::vector<double> phases(static_cast<std::size_t>(harmonics));
  for (double& p : phases) p = 2.0 * std::numbers::pi * uni(rng);

  std::vector<double> out(length, 0.0);
  double phase = 0.0;
  for (std::size_t n = 0; n < length; ++n) {
    const double t = static_cast<double>(n) / sample_rate;
    const double f = f0 * (1.0 + glide * t);
    phase += 2.0 * std::numbers::pi * f / sample_rate;
    double s = 0.0;
    for (int k = 1; k <= harmonics; ++k) {
      if (k * f >= 0.45 * sample_rate) break;
      s += std::sin(k * phase + phases[static_cast<std::size_t>(k - 1)]) / k;
    }
    const double am = 0.55 + 0.45 * std::sin(2.0 * std::numbers::pi * am_rate * t + am_phase);
    out[n] = s * am;
  }
  return out;
}

}  // namespace

std::vector<double> synthetic_source(std::uint64_t seed, std::size_t index, std::size_t length,
                                     double sample_rate) {
  auto rng = clip_rng(seed, index, 1);
  std::vector<double> x =
      index % 2 == 0 ? noise_bursts(rng, length, sample_rate) : tone_complex(rng, length, sample_rate);
  peak_normalize(x, 0.5);
  return x;
}

PoseTrack synthetic_trajectory(std::uint64_t seed, std::size_t index, double seconds,
                               double pose_rate, const EarOffsets& ears) {
  auto rng = clip_rng(seed, index, 2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double radius = 0.8 + 1.2 * uni(rng);
  const double az0 = 2.0 * std::numbers::pi * uni(rng);
  const double az_rate = (uni(rng) - 0.5) * std::numbers::pi;  // up to 90 deg/s
  const double height = 0.6 * (uni(rng) - 0.5);
  const double yaw_amp = 0.17 * uni(rng);
  const double yaw_rate = 0.5 + uni(rng);

  PoseTrack track;
  track.rate = pose_rate;
  track.ear_offsets = ears;
  const auto count = static_cast<std::size_t>(std::ceil(seconds * pose_rate)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / pose_rate;
    const double az = az0 + az_rate * t;
    PoseSample s;
    s.position = {radius * std::cos(az), radius * std::sin(az), height};
    const double yaw = yaw_amp * std::sin(2.0 * std::numbers::pi * yaw_rate * t);
    s.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
    track.samples.push_back(s);
  }
  return track;
}

fs::path make_synthetic_dataset(const SyntheticDatasetSpec& spec, const HrtfBank& bank,
                                const DspRenderConfig& render, const fs::path& out_dir) {
  if (!(spec.sample_rate > 0.0 && spec.sample_rate <= 48000.0)) {
    fail(ErrorCode::BadConfig, "dataset sample_rate must be in (0, 48000]");
  }
  if (!(spec.clip_seconds > 0.0)) fail(ErrorCode::BadConfig, "clip_seconds must be positive");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    fail(ErrorCode::IoError, "cannot create output directory " + out_dir.string() +
                                 (ec ? ": " + ec.message() : ""));
  }

  const auto length = static_cast<std::size_t>(std::llround(spec.clip_seconds * spec.sample_rate));
  Manifest relative;
  for (std::size_t i = 0; i < spec.n_clips; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "clip%03zu", i);
    const std::string s(stem);
    const ManifestRow rel{s + "_mono.wav", s + "_pose.csv", s + "_binaural.wav"};
    const ManifestRow abs{out_dir / rel.mono, out_dir / rel.pose, out_dir / rel.binaural};

    write_wav(AudioClip::mono(spec.sample_rate,
                              synthetic_source(spec.seed, i, length, spec.sample_rate)),
              abs.mono, WavEncoding::float32);
    write_pose_csv(synthetic_trajectory(spec.seed, i, spec.clip_seconds, spec.pose_rate,
                                        spec.ear_offsets),
                   abs.pose);

    const AudioClip mono = read_wav(abs.mono);
    PoseTrack pose = read_pose_csv(abs.pose);
    pose.ear_offsets = spec.ear_offsets;
    write_wav(dsp_render_binaural(mono, pose, bank, render), abs.binaural, WavEncoding::float32);
    relative.rows.push_back(rel);
  }
  const fs::path manifest_path = out_dir / "manifest.txt";
  write_manifest(relative, manifest_path);
  return manifest_path;
}

}  // namespace binsynth
