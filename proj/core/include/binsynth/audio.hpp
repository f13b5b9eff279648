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

#include <cstddef>
#include <span>
#include <vector>

namespace binsynth {

/// Multi-channel waveform held in double precision. Samples are nominally in
/// [-1, 1] but never clamped here; quantization happens only in write_wav.
class AudioClip {
 public:
  AudioClip() = default;
  AudioClip(double sample_rate, std::size_t channels, std::size_t length);
  AudioClip(double sample_rate, std::vector<std::vector<double>> channels);

  static AudioClip mono(double sample_rate, std::vector<double> samples);
  static AudioClip stereo(double sample_rate, std::vector<double> left,
                          std::vector<double> right);

  double sample_rate() const { return sample_rate_; }
  std::size_t channels() const { return data_.size(); }
  std::size_t length() const { return data_.empty() ? 0 : data_.front().size(); }

  std::span<const double> channel(std::size_t c) const { return data_.at(c); }
  std::span<double> channel(std::size_t c) { return data_.at(c); }
  const std::vector<std::vector<double>>& data() const { return data_; }

  bool operator==(const AudioClip&) const = default;

 private:
  double sample_rate_ = 1.0;
  std::vector<std::vector<double>> data_;
};

/// Sample-wise mean of the two channels of a binaural clip.
AudioClip channel_average(const AudioClip& clip);

/// (m, m) from a mono clip; the form used to score mono outputs against
/// binaural references.
AudioClip duplicate_mono(const AudioClip& clip);

/// Extracts one channel as a mono clip.
AudioClip select_channel(const AudioClip& clip, std::size_t channel);

}  // namespace binsynth
