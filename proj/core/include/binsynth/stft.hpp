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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace binsynth {

enum class Window { hann, rectangular };

struct StftConfig {
  std::size_t fft_size = 1024;
  std::size_t hop = 256;
  Window window = Window::hann;
  bool center = true;  // reflect-pad fft_size/2 on both sides

  void validate() const;
};

/// One-sided spectra, frame-major: bin k of frame f is at f * bins + k.
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<std::complex<double>> values;

  std::complex<double> at(std::size_t frame, std::size_t bin) const {
    return values[frame * bins + bin];
  }
};

/// Periodic window of length n.
std::vector<double> make_window(Window window, std::size_t n);

/// Number of frames for a signal of `length` samples: ceil(length / hop) with
/// centering, otherwise 1 + (length - fft_size) / hop (one zero-padded frame
/// when the signal is shorter than fft_size).
std::size_t stft_frame_count(std::size_t length, const StftConfig& config);

/// Windowed, hop-strided real DFT frames.
Spectrogram stft(std::span<const double> x, const StftConfig& config);

}  // namespace binsynth
