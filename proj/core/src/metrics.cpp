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

#include "binsynth/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "binsynth/error.hpp"
#include "binsynth/wav.hpp"

namespace binsynth {

namespace {

void check_same_shape(const AudioClip& pred, const AudioClip& ref) {
  if (pred.channels() != ref.channels() || pred.length() != ref.length()) {
    fail(ErrorCode::ShapeMismatch, "prediction is " + std::to_string(pred.channels()) + "x" +
                                       std::to_string(pred.length()) + ", reference is " +
                                       std::to_string(ref.channels()) + "x" +
                                       std::to_string(ref.length()));
  }
}

// Calls fn(P, R) for every (channel, frame, bin); returns the element count.
template <typename Fn>
std::size_t for_each_bin(const AudioClip& pred, const AudioClip& ref, const StftConfig& config,
                         Fn&& fn) {
  check_same_shape(pred, ref);
  std::size_t count = 0;
  for (std::size_t c = 0; c < ref.channels(); ++c) {
    const Spectrogram p = stft(pred.channel(c), config);
    const Spectrogram r = stft(ref.channel(c), config);
    for (std::size_t i = 0; i < r.values.size(); ++i) fn(p.values[i], r.values[i]);
    count += r.values.size();
  }
  return count;
}

}  // namespace

double wave_l2(const AudioClip& pred, const AudioClip& ref) {
  check_same_shape(pred, ref);
  const std::size_t total = ref.channels() * ref.length();
  if (total == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t c = 0; c < ref.channels(); ++c) {
    const auto p = pred.channel(c);
    const auto r = ref.channel(c);
    for (std::size_t n = 0; n < r.size(); ++n) {
      const double d = p[n] - r[n];
      acc += d * d;
    }
  }
  return acc / static_cast<double>(total);
}

double wrap_phase(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(radians, two_pi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

double amplitude_l2(const AudioClip& pred, const AudioClip& ref, const StftConfig& config) {
  double acc = 0.0;
  const std::size_t n = for_each_bin(pred, ref, config, [&](auto p, auto r) {
    const double d = std::abs(p) - std::abs(r);
    acc += d * d;
  });
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

double phase_l2(const AudioClip& pred, const AudioClip& ref, const StftConfig& config) {
  double acc = 0.0;
  const std::size_t n = for_each_bin(pred, ref, config, [&](auto p, auto r) {
    if (std::abs(p) < kSilentBinMagnitude && std::abs(r) < kSilentBinMagnitude) return;
    const double d = wrap_phase(std::arg(p) - std::arg(r));
    acc += d * d;
  });
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

MrstftTerms mrstft_terms(const AudioClip& pred, const AudioClip& ref,
                         const std::vector<StftConfig>& resolutions) {
  check_same_shape(pred, ref);
  if (resolutions.empty()) fail(ErrorCode::BadConfig, "mrstft needs at least one resolution");
  MrstftTerms terms;
  if (ref.channels() == 0) return terms;
  for (const auto& res : resolutions) {
    for (std::size_t c = 0; c < ref.channels(); ++c) {
      const Spectrogram p = stft(pred.channel(c), res);
      const Spectrogram r = stft(ref.channel(c), res);
      double diff_sq = 0.0, ref_sq = 0.0, log_acc = 0.0, lin_acc = 0.0;
      for (std::size_t i = 0; i < r.values.size(); ++i) {
        const double pm = std::abs(p.values[i]);
        const double rm = std::abs(r.values[i]);
        diff_sq += (rm - pm) * (rm - pm);
        ref_sq += rm * rm;
        log_acc += std::abs(std::log(rm + kLogMagFloor) - std::log(pm + kLogMagFloor));
        lin_acc += std::abs(rm - pm);
      }
      if (ref_sq == 0.0) {
        fail(ErrorCode::SilentReference, "reference channel " + std::to_string(c) +
                                             " has an all-zero spectrogram");
      }
      const auto count = static_cast<double>(r.values.size());
      terms.spectral_convergence += std::sqrt(diff_sq) / std::sqrt(ref_sq);
      terms.log_magnitude += log_acc / count;
      terms.linear_magnitude += lin_acc / count;
    }
  }
  const double norm = static_cast<double>(resolutions.size() * ref.channels());
  terms.spectral_convergence /= norm;
  terms.log_magnitude /= norm;
  terms.linear_magnitude /= norm;
  return terms;
}

double mrstft(const AudioClip& pred, const AudioClip& ref, const std::vector<StftConfig>& resolutions) {
  return mrstft_terms(pred, ref, resolutions).total();
}

ClipMetrics evaluate_clip(const std::string& name, const AudioClip& pred, const AudioClip& ref,
                          const MetricsConfig& config) {
  const AudioClip p = pred.channels() == 1 && ref.channels() == 2 ? duplicate_mono(pred) : pred;
  ClipMetrics m;
  m.clip = name;
  m.wave_l2 = wave_l2(p, ref);
  m.amplitude_l2 = amplitude_l2(p, ref, config.stft);
  m.phase_l2 = phase_l2(p, ref, config.stft);
  m.mrstft = mrstft(p, ref, config.resolutions);
  return m;
}

ClipMetrics aggregate(const std::vector<ClipMetrics>& clips) {
  ClipMetrics a;
  a.clip = "AGGREGATE";
  if (clips.empty()) return a;
  for (const auto& c : clips) {
    a.wave_l2 += c.wave_l2;
    a.amplitude_l2 += c.amplitude_l2;
    a.phase_l2 += c.phase_l2;
    a.mrstft += c.mrstft;
  }
  const auto n = static_cast<double>(clips.size());
  a.wave_l2 /= n;
  a.amplitude_l2 /= n;
  a.phase_l2 /= n;
  a.mrstft /= n;
  return a;
}

MetricReport evaluate_manifest(const std::filesystem::path& pred_dir, const Manifest& manifest,
                               const MetricsConfig& config) {
  MetricReport report;
  for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
    const auto& row = manifest.rows[i];
    const auto pred_path = pred_dir / row.binaural.filename();
    if (!std::filesystem::exists(pred_path)) {
      fail(ErrorCode::MissingPrediction,
           "row " + std::to_string(i + 1) + ": " + pred_path.string() + " not found");
    }
    const AudioClip ref = read_wav(row.binaural);
    const AudioClip pred = read_wav(pred_path);
    report.clips.push_back(evaluate_clip(row.binaural.stem().string(), pred, ref, config));
  }
  report.aggregate = aggregate(report.clips);
  return report;
}

void write_report(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << "clip,wave_l2,amplitude_l2,phase_l2,mrstft\n";
  char buf[256];
  auto row = [&](const ClipMetrics& m) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g,%.10g\n", m.clip.c_str(), m.wave_l2,
                  m.amplitude_l2, m.phase_l2, m.mrstft);
    out << buf;
  };
  for (const auto& c : report.clips) row(c);
  row(report.aggregate);
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace binsynth
