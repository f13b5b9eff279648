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

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"

#include "../support/fixtures.hpp"
#include "binsynth/pose.hpp"
#include "unit_support.hpp"

using namespace binsynth;
using binsynth::testing::error_of;
using binsynth::testing::message_of;
using binsynth::testing::scratch_dir;

namespace {

std::filesystem::path write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

constexpr const char* kHeader = "t,px,py,pz,qx,qy,qz,qw\n";

}  // namespace

TEST_CASE("read_pose_csv infers the rate from the first two timestamps") {
  const auto dir = scratch_dir("pose_rate");
  const auto p = write_text(dir / "a.csv", std::string(kHeader) +
                                               "0,1,2,3,0,0,0,1\n"
                                               "0.008333333333333333,1,2,3,0,0,0,1\n");
  const PoseTrack t = read_pose_csv(p);
  CHECK(t.rate == doctest::Approx(120.0).epsilon(1e-12));
  REQUIRE(t.size() == 2);
  CHECK(t.samples[0].position == Eigen::Vector3d(1, 2, 3));
}

TEST_CASE("read_pose_csv normalizes quaternions") {
  const auto dir = scratch_dir("pose_norm");
  const auto p = write_text(dir / "a.csv", std::string(kHeader) + "0,0,0,0,0,0,0,2\n0.5,0,0,0,0,3,0,4\n");
  const PoseTrack t = read_pose_csv(p);
  CHECK(t.samples[0].orientation.coeffs() == Eigen::Vector4d(0, 0, 0, 1));
  CHECK(t.samples[1].orientation.y() == doctest::Approx(0.6));
  CHECK(t.samples[1].orientation.w() == doctest::Approx(0.8));
  CHECK(t.rate == 2.0);
}

TEST_CASE("read_pose_csv contract errors name the line") {
  const auto dir = scratch_dir("pose_errors");
  const auto nonuniform =
      write_text(dir / "n.csv", std::string(kHeader) + "0,0,0,0,0,0,0,1\n0.01,0,0,0,0,0,0,1\n0.03,0,0,0,0,0,0,1\n");
  CHECK(error_of([&] { read_pose_csv(nonuniform); }) == ErrorCode::NonUniformRate);

  const auto single = write_text(dir / "s.csv", std::string(kHeader) + "0,0,0,0,0,0,0,1\n");
  CHECK(error_of([&] { read_pose_csv(single); }) == ErrorCode::NonUniformRate);

  const auto bad = write_text(dir / "b.csv", std::string(kHeader) + "0,0,0,0,0,0,0,1\n0.1,0,x,0,0,0,0,1\n");
  CHECK(error_of([&] { read_pose_csv(bad); }) == ErrorCode::BadRow);
  CHECK(message_of([&] { read_pose_csv(bad); }).find("line 3") != std::string::npos);

  const auto short_row = write_text(dir / "r.csv", std::string(kHeader) + "0,0,0,0,0,0,1\n");
  CHECK(error_of([&] { read_pose_csv(short_row); }) == ErrorCode::BadRow);

  const auto zero = write_text(dir / "z.csv", std::string(kHeader) + "0,0,0,0,0,0,0,1\n0.1,0,0,0,0,0,0,0\n");
  CHECK(error_of([&] { read_pose_csv(zero); }) == ErrorCode::ZeroNormQuaternion);
  CHECK(message_of([&] { read_pose_csv(zero); }).find("line 3") != std::string::npos);

  const auto header = write_text(dir / "h.csv", "time,x,y,z\n0,0,0,0\n");
  CHECK(error_of([&] { read_pose_csv(header); }) == ErrorCode::BadRow);

  CHECK(error_of([&] { read_pose_csv(dir / "missing.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("pose CSV round trip is exact") {
  const auto dir = scratch_dir("pose_roundtrip");
  std::mt19937_64 rng(3);
  const PoseTrack t = binsynth::testing::moving_track(rng, 50, 120.0);
  write_pose_csv(t, dir / "t.csv");
  const PoseTrack r = read_pose_csv(dir / "t.csv");
  CHECK(r.rate == t.rate);
  REQUIRE(r.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(r.samples[i].position == t.samples[i].position);
    CHECK(r.samples[i].orientation.coeffs() == t.samples[i].orientation.coeffs());
  }
}

TEST_CASE("resample_pose examples") {
  SUBCASE("constant track") {
    const PoseTrack t = binsynth::testing::static_track({1.0, -2.0, 0.5}, 4, 120.0,
                                                        Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitZ())));
    const PoseTrack r = resample_pose(t, 8000.0, 300);
    CHECK(r.rate == 8000.0);
    REQUIRE(r.size() == 300);
    for (const auto& s : r.samples) {
      CHECK((s.position - t.samples[0].position).norm() == 0.0);
      CHECK(std::abs(s.orientation.dot(t.samples[0].orientation)) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("linear midpoint and slerp closed form") {
    PoseTrack t;
    t.rate = 1.0;
    t.samples = {PoseSample{{0, 0, 0}, Eigen::Quaterniond::Identity()},
                 PoseSample{{1, 0, 0}, Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()))}};
    const PoseTrack r = resample_pose(t, 2.0, 4);
    REQUIRE(r.size() == 4);
    CHECK((r.samples[1].position - Eigen::Vector3d(0.5, 0, 0)).norm() < 1e-15);
    const auto q = r.samples[1].orientation;
    CHECK(q.x() == doctest::Approx(0.0));
    CHECK(q.y() == doctest::Approx(0.0));
    CHECK(q.z() == doctest::Approx(std::sin(M_PI / 8)).epsilon(1e-14));
    CHECK(q.w() == doctest::Approx(std::cos(M_PI / 8)).epsilon(1e-14));
    // Beyond the last pose the last pose is held.
    CHECK(r.samples[3].position == Eigen::Vector3d(1, 0, 0));
  }
  SUBCASE("slerp takes the shorter arc") {
    PoseTrack t;
    t.rate = 1.0;
    const Eigen::Quaterniond b(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()));
    t.samples = {PoseSample{{0, 0, 0}, Eigen::Quaterniond::Identity()},
                 PoseSample{{0, 0, 0}, Eigen::Quaterniond(-b.coeffs())}};
    const auto q = resample_pose(t, 2.0, 2).samples[1].orientation;
    CHECK(std::abs(q.z()) == doctest::Approx(std::sin(M_PI / 8)).epsilon(1e-14));
    CHECK(std::abs(q.w()) == doctest::Approx(std::cos(M_PI / 8)).epsilon(1e-14));
  }
}

TEST_CASE("resample_pose at the source rate is the identity") {
  std::mt19937_64 rng(11);
  const PoseTrack t = binsynth::testing::moving_track(rng, 40, 120.0);
  const PoseTrack r = resample_pose(t, 120.0, t.size());
  REQUIRE(r.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(r.samples[i].position == t.samples[i].position);
    CHECK(std::abs(r.samples[i].orientation.dot(t.samples[i].orientation)) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("resample_pose rejects an empty track") {
  CHECK(error_of([] { resample_pose(PoseTrack{}, 8000.0, 10); }) == ErrorCode::EmptyTrack);
}

TEST_CASE("ear positions rotate with the head about the listener origin") {
  const EarOffsets ears;
  PoseSample s{{1, 2, 3}, Eigen::Quaterniond::Identity()};
  CHECK((ear_position(s, ears, Ear::right) - Eigen::Vector3d(0, 0.09, 0)).norm() < 1e-15);
  s.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()));
  // Yawing by +90 degrees about z carries +y to -x.
  CHECK((ear_position(s, ears, Ear::right) - Eigen::Vector3d(-0.09, 0, 0)).norm() < 1e-15);
}
