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

#include "binsynth/audio.hpp"

#include <cmath>
#include <string>

#include "binsynth/error.hpp"

namespace binsynth {

namespace {

void check_rate(double sample_rate) {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    fail(ErrorCode::BadConfig, "sample_rate must be positive, got " + std::to_string(sample_rate));
  }
}

}  // namespace

AudioClip::AudioClip(double sample_rate, std::size_t channels, std::size_t length)
    : sample_rate_(sample_rate), data_(channels, std::vector<double>(length, 0.0)) {
  check_rate(sample_rate);
}

AudioClip::AudioClip(double sample_rate, std::vector<std::vector<double>> channels)
    : sample_rate_(sample_rate), data_(std::move(channels)) {
  check_rate(sample_rate);
  for (const auto& ch : data_) {
    if (ch.size() != data_.front().size()) {
      fail(ErrorCode::LengthMismatch, "channels of an AudioClip must have equal length");
    }
  }
}

AudioClip AudioClip::mono(double sample_rate, std::vector<double> samples) {
  std::vector<std::vector<double>> ch;
  ch.push_back(std::move(samples));
  return AudioClip(sample_rate, std::move(ch));
}

AudioClip AudioClip::stereo(double sample_rate, std::vector<double> left,
                            std::vector<double> right) {
  std::vector<std::vector<double>> ch;
  ch.push_back(std::move(left));
  ch.push_back(std::move(right));
  return AudioClip(sample_rate, std::move(ch));
}

AudioClip channel_average(const AudioClip& clip) {
  if (clip.channels() != 2) {
    fail(ErrorCode::WrongChannelCount,
         "channel_average needs 2 channels, got " + std::to_string(clip.channels()));
  }
  const auto l = clip.channel(0);
  const auto r = clip.channel(1);
  std::vector<double> out(clip.length());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = 0.5 * (l[n] + r[n]);
  return AudioClip::mono(clip.sample_rate(), std::move(out));
}

AudioClip duplicate_mono(const AudioClip& clip) {
  if (clip.channels() != 1) {
    fail(ErrorCode::WrongChannelCount,
         "duplicate_mono needs 1 channel, got " + std::to_string(clip.channels()));
  }
  const auto m = clip.channel(0);
  std::vector<double> a(m.begin(), m.end());
  return AudioClip::stereo(clip.sample_rate(), a, a);
}

AudioClip select_channel(const AudioClip& clip, std::size_t channel) {
  if (channel >= clip.channels()) {
    fail(ErrorCode::WrongChannelCount, "channel index " + std::to_string(channel) +
                                           " out of range for " +
                                           std::to_string(clip.channels()) + "-channel clip");
  }
  const auto c = clip.channel(channel);
  return AudioClip::mono(clip.sample_rate(), std::vector<double>(c.begin(), c.end()));
}

}  // namespace binsynth
