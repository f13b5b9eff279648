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

#include <filesystem>
#include <string>
#include <vector>

#include "binsynth/audio.hpp"
#include "binsynth/dataset.hpp"
#include "binsynth/stft.hpp"

namespace binsynth {

/// Bins where both magnitudes fall below this carry no phase error.
inline constexpr double kSilentBinMagnitude = 1e-8;
inline constexpr double kLogMagFloor = 1e-7;

struct MetricsConfig {
  StftConfig stft{1024, 256, Window::hann, true};
  std::vector<StftConfig> resolutions{{512, 128, Window::hann, true},
                                      {1024, 256, Window::hann, true},
                                      {2048, 512, Window::hann, true}};
};

/// Mean squared sample difference over all channels.
double wave_l2(const AudioClip& pred, const AudioClip& ref);

/// Phase difference wrapped into (-pi, pi].
double wrap_phase(double radians);

/// Mean over channels, frames and bins of (|P| - |R|)^2.
double amplitude_l2(const AudioClip& pred, const AudioClip& ref, const StftConfig& config);

/// Mean over channels, frames and bins of the squared wrapped phase
/// difference; silent bins contribute zero.
double phase_l2(const AudioClip& pred, const AudioClip& ref, const StftConfig& config);

struct MrstftTerms {
  double spectral_convergence = 0.0;
  double log_magnitude = 0.0;
  double linear_magnitude = 0.0;

  double total() const { return spectral_convergence + log_magnitude + linear_magnitude; }
};

/// Each term averaged over resolutions and channels.
MrstftTerms mrstft_terms(const AudioClip& pred, const AudioClip& ref,
                         const std::vector<StftConfig>& resolutions);

/// Sum of spectral convergence, log-magnitude and linear-magnitude distances.
double mrstft(const AudioClip& pred, const AudioClip& ref, const std::vector<StftConfig>& resolutions);

struct ClipMetrics {
  std::string clip;
  double wave_l2 = 0.0;
  double amplitude_l2 = 0.0;
  double phase_l2 = 0.0;
  double mrstft = 0.0;
};

struct MetricReport {
  std::vector<ClipMetrics> clips;
  ClipMetrics aggregate{"AGGREGATE"};
};

/// All metrics for one prediction; mono predictions are duplicated to both
/// ears first.
ClipMetrics evaluate_clip(const std::string& name, const AudioClip& pred, const AudioClip& ref,
                          const MetricsConfig& config);

/// Unweighted mean of per-clip rows.
ClipMetrics aggregate(const std::vector<ClipMetrics>& clips);

/// Scores `pred_dir/<binaural file name>` against each manifest row.
MetricReport evaluate_manifest(const std::filesystem::path& pred_dir, const Manifest& manifest,
                               const MetricsConfig& config);

/// `clip,wave_l2,amplitude_l2,phase_l2,mrstft` header, one row per clip, then
/// the AGGREGATE row.
void write_report(const MetricReport& report, const std::filesystem::path& path);

}  // namespace binsynth
