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

#include "binsynth/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <regex>
#include <string>

#include "binsynth/error.hpp"
#include "binsynth/wav.hpp"

namespace binsynth {

AudioClip fir_convolve(const AudioClip& x, const ImpulseResponse& ir) {
  if (x.channels() != 1) fail(ErrorCode::WrongChannelCount, "fir_convolve expects mono input");
  if (x.sample_rate() != ir.sample_rate) {
    fail(ErrorCode::RateMismatch, "clip at " + std::to_string(x.sample_rate()) + " Hz, filter '" +
                                      ir.label + "' at " + std::to_string(ir.sample_rate) + " Hz");
  }
  if (ir.taps.empty()) fail(ErrorCode::BadConfig, "filter '" + ir.label + "' has no taps");
  const auto in = x.channel(0);
  const std::size_t n = in.size();
  const std::size_t k = ir.taps.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t kmax = std::min(k, i + 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < kmax; ++j) acc += ir.taps[j] * in[i - j];
    out[i] = acc;
  }
  return AudioClip::mono(x.sample_rate(), std::move(out));
}

ShoeboxRoom ShoeboxRoom::uniform(const Eigen::Vector3d& dims, double absorption, int max_order) {
  ShoeboxRoom r;
  r.dimensions = dims;
  r.absorption.fill(absorption);
  r.max_order = max_order;
  return r;
}

void ShoeboxRoom::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(dimensions[i] > 0.0)) fail(ErrorCode::BadConfig, "room dimensions must be positive");
  }
  for (double a : absorption) {
    if (!(a > 0.0 && a <= 1.0)) fail(ErrorCode::BadConfig, "room absorption must be in (0, 1]");
  }
  if (max_order < 0) fail(ErrorCode::BadConfig, "room max_order must be >= 0");
}

namespace {

void check_inside(const ShoeboxRoom& room, const Eigen::Vector3d& p, const char* what) {
  for (int i = 0; i < 3; ++i) {
    if (!(p[i] > 0.0 && p[i] < room.dimensions[i])) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s (%.4g, %.4g, %.4g) is not strictly inside the room", what,
                    p.x(), p.y(), p.z());
      fail(ErrorCode::PointOutsideRoom, buf);
    }
  }
}

}  // namespace

ImpulseResponse image_source_rir(const ShoeboxRoom& room, const Eigen::Vector3d& src,
                                 const Eigen::Vector3d& lstn, double sample_rate,
                                 double speed_of_sound, RirAlignment alignment) {
  room.validate();
  check_inside(room, src, "source");
  check_inside(room, lstn, "listener");
  if (!(speed_of_sound > 0.0) || !(sample_rate > 0.0)) {
    fail(ErrorCode::BadConfig, "sample_rate and speed_of_sound must be positive");
  }
  const double direct = (src - lstn).norm();
  if (!(direct > 0.0)) fail(ErrorCode::BadRange, "source and listener coincide");
  const double c = sample_rate / speed_of_sound;
  const double origin = alignment == RirAlignment::direct_path ? direct : 0.0;

  struct Arrival {
    double tap;
    double amplitude;
  };
  std::vector<Arrival> arrivals;
  const int k = room.max_order;
  for (int qx = 0; qx <= 1; ++qx)
    for (int qy = 0; qy <= 1; ++qy)
      for (int qz = 0; qz <= 1; ++qz)
        for (int nx = -k; nx <= k; ++nx)
          for (int ny = -k; ny <= k; ++ny)
            for (int nz = -k; nz <= k; ++nz) {
              const int q[3] = {qx, qy, qz};
              const int m[3] = {nx, ny, nz};
              int order = 0;
              double gain = 1.0;
              Eigen::Vector3d image;
              for (int a = 0; a < 3; ++a) {
                // Reflections off the wall at 0 and the wall at L along axis a.
                const int r0 = std::abs(m[a] - q[a]);
                const int r1 = std::abs(m[a]);
                order += r0 + r1;
                gain *= std::pow(1.0 - room.absorption[2 * a], r0) *
                        std::pow(1.0 - room.absorption[2 * a + 1], r1);
                image[a] = (1 - 2 * q[a]) * src[a] + 2.0 * m[a] * room.dimensions[a];
              }
              if (order > k || gain == 0.0) continue;
              const double d = (image - lstn).norm();
              arrivals.push_back({c * (d - origin), gain / d});
            }

  double max_tap = 0.0;
  for (const auto& a : arrivals) max_tap = std::max(max_tap, a.tap);
  ImpulseResponse ir;
  ir.sample_rate = sample_rate;
  ir.label = alignment == RirAlignment::direct_path ? "rir_aligned" : "rir";
  ir.taps.assign(static_cast<std::size_t>(std::floor(max_tap)) + 2, 0.0);
  for (const auto& a : arrivals) {
    const double base = std::floor(a.tap);
    const double frac = a.tap - base;
    const auto i = static_cast<std::size_t>(base);
    ir.taps[i] += a.amplitude * (1.0 - frac);
    ir.taps[i + 1] += a.amplitude * frac;
  }
  return ir;
}

Eigen::Vector3d Direction::unit_vector() const {
  const double az = azimuth_deg * std::numbers::pi / 180.0;
  const double el = elevation_deg * std::numbers::pi / 180.0;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

Direction Direction::from_vector(const Eigen::Vector3d& v) {
  if (v.norm() == 0.0) return {};
  const double az = std::atan2(v.y(), v.x()) * 180.0 / std::numbers::pi;
  const double el = std::atan2(v.z(), std::hypot(v.x(), v.y())) * 180.0 / std::numbers::pi;
  return {az, el};
}

const HrtfPair& nearest_hrtf(const HrtfBank& bank, const Direction& dir) {
  if (bank.empty()) fail(ErrorCode::EmptyHrtfBank, "no HRTF directions available");
  const Eigen::Vector3d u = dir.unit_vector();
  const HrtfPair* best = nullptr;
  double best_cos = -2.0;
  for (const auto& [d, pair] : bank) {
    const double c = d.unit_vector().dot(u);
    if (c > best_cos) {
      best_cos = c;
      best = &pair;
    }
  }
  return *best;
}

HrtfBank load_hrtf_bank(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) fail(ErrorCode::IoError, "HRTF directory not found: " + dir.string());
  static const std::regex pattern(R"(az(-?[0-9]+(?:\.[0-9]+)?)_el(-?[0-9]+(?:\.[0-9]+)?)_([lr])\.wav)");
  std::map<Direction, std::array<bool, 2>> seen;
  HrtfBank bank;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::smatch m;
    const std::string name = path.filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    const Direction d{std::stod(m[1].str()), std::stod(m[2].str())};
    const AudioClip clip = read_wav(path);
    if (clip.channels() != 1) fail(ErrorCode::WrongChannelCount, name + " must be mono");
    if (clip.length() == 0) fail(ErrorCode::BadConfig, name + " has no taps");
    const auto taps = clip.channel(0);
    ImpulseResponse ir{{taps.begin(), taps.end()}, clip.sample_rate(), name};
    const bool left = m[3].str() == "l";
    (left ? bank[d].left : bank[d].right) = std::move(ir);
    seen[d][left ? 0 : 1] = true;
  }
  for (const auto& [d, flags] : seen) {
    if (!flags[0] || !flags[1]) {
      fail(ErrorCode::BadConfig, "HRTF direction az" + std::to_string(d.azimuth_deg) + "_el" +
                                     std::to_string(d.elevation_deg) + " lacks a left/right pair");
    }
  }
  if (bank.empty()) fail(ErrorCode::EmptyHrtfBank, "no az*_el*_{l,r}.wav files in " + dir.string());
  return bank;
}

namespace {

std::string format_degrees(double deg) {
  char buf[32];
  if (deg == std::round(deg)) {
    std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(deg));
  } else {
    std::snprintf(buf, sizeof(buf), "%.3f", deg);
  }
  return buf;
}

}  // namespace

void save_hrtf_bank(const HrtfBank& bank, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [d, pair] : bank) {
    const std::string stem =
        "az" + format_degrees(d.azimuth_deg) + "_el" + format_degrees(d.elevation_deg);
    write_wav(AudioClip::mono(pair.left.sample_rate, pair.left.taps), dir / (stem + "_l.wav"),
              WavEncoding::float32);
    write_wav(AudioClip::mono(pair.right.sample_rate, pair.right.taps), dir / (stem + "_r.wav"),
              WavEncoding::float32);
  }
}

namespace {

// Side: -1 for the left ear, +1 for the right ear.
ImpulseResponse head_shadow_ir(const Direction& d, double side, double sample_rate) {
  constexpr std::size_t kTaps = 12;
  const Eigen::Vector3d u = d.unit_vector();
  const double facing = side * u.y();  // 1 when the source is on this ear's side
  const double gain = 1.0 + 0.3 * facing;
  const double pole = 0.1 + 0.5 * std::max(0.0, -facing) + (u.x() < 0.0 ? 0.15 : 0.0);
  ImpulseResponse ir;
  ir.sample_rate = sample_rate;
  ir.taps.resize(kTaps);
  double p = 1.0;
  for (std::size_t n = 0; n < kTaps; ++n) {
    ir.taps[n] = gain * (1.0 - pole) * p;
    p *= pole;
  }
  return ir;
}

}  // namespace

HrtfBank synthetic_hrtf_bank(double sample_rate) {
  HrtfBank bank;
  for (int el : {-30, 0, 30}) {
    for (int az = -150; az <= 180; az += 30) {
      const Direction d{static_cast<double>(az), static_cast<double>(el)};
      HrtfPair pair{head_shadow_ir(d, -1.0, sample_rate), head_shadow_ir(d, 1.0, sample_rate)};
      pair.left.label = "synthetic_l";
      pair.right.label = "synthetic_r";
      bank.emplace(d, std::move(pair));
    }
  }
  return bank;
}

Direction mean_source_direction(const PoseTrack& track) {
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (const auto& s : track.samples) acc += s.orientation.conjugate() * s.position;
  return Direction::from_vector(acc);
}

AudioClip dsp_render_binaural(const AudioClip& x, const PoseTrack& track, const HrtfBank& bank,
                              const DspRenderConfig& config) {
  if (bank.empty()) fail(ErrorCode::EmptyHrtfBank, "dsp_render_binaural needs at least one HRTF");
  if (x.channels() != 1) fail(ErrorCode::WrongChannelCount, "dsp_render_binaural expects mono input");
  const std::size_t n = x.length();
  if (n == 0) return AudioClip(x.sample_rate(), 2, 0);

  const PoseTrack at_rate = (track.rate == x.sample_rate() && track.size() == n)
                                ? track
                                : resample_pose(track, x.sample_rate(), n);
  const AudioClip warped = warp_binaural(x, at_rate, config.speed_of_sound);

  Eigen::Vector3d mean_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_ear[2] = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  for (const auto& s : at_rate.samples) {
    mean_src += s.position;
    mean_ear[0] += ear_position(s, at_rate.ear_offsets, Ear::left);
    mean_ear[1] += ear_position(s, at_rate.ear_offsets, Ear::right);
  }
  const double inv = 1.0 / static_cast<double>(n);
  const Eigen::Vector3d src_room = config.listener_position + mean_src * inv;

  const HrtfPair& hrtf = nearest_hrtf(bank, mean_source_direction(at_rate));
  std::vector<std::vector<double>> channels;
  for (int e = 0; e < 2; ++e) {
    const Eigen::Vector3d ear_room = config.listener_position + mean_ear[e] * inv;
    const ImpulseResponse rir =
        image_source_rir(config.room, src_room, ear_room, x.sample_rate(), config.speed_of_sound,
                         RirAlignment::direct_path);
    const AudioClip reverberant = fir_convolve(select_channel(warped, e), rir);
    const AudioClip out = fir_convolve(reverberant, e == 0 ? hrtf.left : hrtf.right);
    const auto s = out.channel(0);
    channels.emplace_back(s.begin(), s.end());
  }
  return AudioClip(x.sample_rate(), std::move(channels));
}

}  // namespace binsynth
