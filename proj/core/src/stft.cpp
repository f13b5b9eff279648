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

#include "binsynth/stft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "binsynth/error.hpp"

namespace binsynth {

namespace {

// Real-to-complex plan with its own aligned buffers.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  double* input() { return in_; }
  void execute() { fftw_execute(plan_); }
  std::complex<double> output(std::size_t k) const { return {out_[k][0], out_[k][1]}; }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

FftPlan& plan_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<FftPlan>> plans;
  auto& slot = plans[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

std::size_t reflect(std::ptrdiff_t m, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  m = ((m % period) + period) % period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

void StftConfig::validate() const {
  if (fft_size < 2) fail(ErrorCode::BadConfig, "fft_size must be >= 2");
  if (hop == 0 || hop > fft_size) {
    fail(ErrorCode::BadConfig, "hop " + std::to_string(hop) + " must be in (0, fft_size]");
  }
}

std::vector<double> make_window(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::hann) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return w;
}

std::size_t stft_frame_count(std::size_t length, const StftConfig& config) {
  if (config.center) return (length + config.hop - 1) / config.hop;
  if (length <= config.fft_size) return 1;
  return 1 + (length - config.fft_size) / config.hop;
}

Spectrogram stft(std::span<const double> x, const StftConfig& config) {
  config.validate();
  if (x.empty()) fail(ErrorCode::BadConfig, "stft of an empty signal");
  const std::size_t f = config.fft_size;
  const std::size_t n = x.size();
  const auto window = make_window(config.window, f);

  Spectrogram s;
  s.frames = stft_frame_count(n, config);
  s.bins = f / 2 + 1;
  s.values.resize(s.frames * s.bins);

  std::lock_guard<std::mutex> lock(plan_mutex());
  FftPlan& plan = plan_for(f);
  double* buf = plan.input();
  const auto half = static_cast<std::ptrdiff_t>(f / 2);
  for (std::size_t fr = 0; fr < s.frames; ++fr) {
    const auto start = static_cast<std::ptrdiff_t>(fr * config.hop);
    for (std::size_t i = 0; i < f; ++i) {
      double v = 0.0;
      if (config.center) {
        v = x[reflect(start + static_cast<std::ptrdiff_t>(i) - half, n)];
      } else {
        const auto idx = static_cast<std::size_t>(start) + i;
        v = idx < n ? x[idx] : 0.0;
      }
      buf[i] = v * window[i];
    }
    plan.execute();
    for (std::size_t k = 0; k < s.bins; ++k) s.values[fr * s.bins + k] = plan.output(k);
  }
  return s;
}

}  // namespace binsynth
