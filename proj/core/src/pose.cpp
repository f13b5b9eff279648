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

#include "binsynth/pose.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "binsynth/error.hpp"

namespace binsynth {

namespace {

constexpr const char* kPoseHeader = "t,px,py,pz,qx,qy,qz,qw";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_row(const std::string& line, std::array<double, 8>& out) {
  std::stringstream ss(line);
  std::string field;
  std::size_t i = 0;
  while (std::getline(ss, field, ',')) {
    if (i >= out.size()) return false;
    try {
      std::size_t used = 0;
      const std::string f = trim(field);
      out[i] = std::stod(f, &used);
      if (used != f.size() || !std::isfinite(out[i])) return false;
    } catch (const std::exception&) {
      return false;
    }
    ++i;
  }
  return i == out.size();
}

}  // namespace

Eigen::Vector3d ear_position(const PoseSample& pose, const EarOffsets& ears, Ear ear) {
  return pose.orientation * ears[ear];
}

PoseTrack read_pose_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || trim(line) != kPoseHeader) {
    fail(ErrorCode::BadRow, "line 1: expected header '" + std::string(kPoseHeader) + "'");
  }

  std::vector<double> times;
  PoseTrack track;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::array<double, 8> v{};
    if (!parse_row(line, v)) fail(ErrorCode::BadRow, "line " + std::to_string(line_no));
    // Stored as (x, y, z, w); Eigen's constructor takes w first.
    Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    const double norm = q.norm();
    if (!(norm > 0.0)) fail(ErrorCode::ZeroNormQuaternion, "line " + std::to_string(line_no));
    // Rows that are already unit length are kept verbatim so that a
    // write/read cycle is lossless.
    if (std::abs(norm - 1.0) > 1e-12) q.coeffs() /= norm;
    times.push_back(v[0]);
    track.samples.push_back({Eigen::Vector3d(v[1], v[2], v[3]), q});
  }

  if (times.size() < 2) {
    fail(ErrorCode::NonUniformRate, "at least two rows are needed to infer the rate");
  }
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) fail(ErrorCode::NonUniformRate, "timestamps must increase");
  for (std::size_t i = 2; i < times.size(); ++i) {
    const double d = times[i] - times[i - 1];
    if (std::abs(d - dt) > 1e-6 * dt) {
      fail(ErrorCode::NonUniformRate, "row interval at line " + std::to_string(i + 2) +
                                          " differs from the first interval");
    }
  }
  // Rounded to micro-hertz so that the nominal rate of a written track is
  // recovered exactly despite decimal timestamps.
  track.rate = std::round(1e6 / dt) / 1e6;
  return track;
}

void write_pose_csv(const PoseTrack& track, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << kPoseHeader << '\n';
  char buf[512];
  for (std::size_t i = 0; i < track.samples.size(); ++i) {
    const auto& s = track.samples[i];
    const auto& q = s.orientation;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<double>(i) / track.rate, s.position.x(), s.position.y(),
                  s.position.z(), q.x(), q.y(), q.z(), q.w());
    out << buf;
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

PoseTrack resample_pose(const PoseTrack& track, double target_rate, std::size_t n_samples) {
  if (track.empty()) fail(ErrorCode::EmptyTrack, "resample_pose on an empty track");
  if (!(target_rate > 0.0)) fail(ErrorCode::BadConfig, "target_rate must be positive");

  PoseTrack out;
  out.rate = target_rate;
  out.ear_offsets = track.ear_offsets;
  out.samples.resize(n_samples);
  const std::size_t last = track.size() - 1;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double u = static_cast<double>(i) * track.rate / target_rate;
    const double base = std::floor(u);
    const auto i0 = static_cast<std::size_t>(base);
    if (i0 >= last) {
      out.samples[i] = track.samples[last];
      continue;
    }
    const double frac = u - base;
    const auto& a = track.samples[i0];
    const auto& b = track.samples[i0 + 1];
    if (frac == 0.0) {
      out.samples[i] = a;
      continue;
    }
    out.samples[i].position = (1.0 - frac) * a.position + frac * b.position;
    // Eigen's slerp takes the shorter arc (flips sign when the dot is negative).
    out.samples[i].orientation = a.orientation.slerp(frac, b.orientation).normalized();
  }
  return out;
}

Eigen::MatrixXd pose_features(const PoseTrack& track) {
  Eigen::MatrixXd f(7, static_cast<Eigen::Index>(track.size()));
  for (std::size_t i = 0; i < track.size(); ++i) {
    const auto& s = track.samples[i];
    const auto col = static_cast<Eigen::Index>(i);
    f.col(col) << s.position.x(), s.position.y(), s.position.z(), s.orientation.x(),
        s.orientation.y(), s.orientation.z(), s.orientation.w();
  }
  return f;
}

}  // namespace binsynth
