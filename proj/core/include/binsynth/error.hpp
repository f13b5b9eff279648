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

#include <stdexcept>
#include <string>
#include <string_view>

namespace binsynth {

enum class ErrorCode {
  // audio_io
  MalformedHeader,
  UnsupportedEncoding,
  TruncatedData,
  IoError,
  NonUniformRate,
  BadRow,
  ZeroNormQuaternion,
  EmptyTrack,
  WrongChannelCount,
  // geom_warp / dsp_render
  LengthMismatch,
  RateMismatch,
  PointOutsideRoom,
  EmptyHrtfBank,
  // diffusion_core / denoiser_net
  BadRange,
  ShapeMismatch,
  StepOutOfRange,
  StaleContext,
  BadMagic,
  VersionMismatch,
  CorruptArray,
  // two_stage
  MissingStage2Conditioner,
  EmptyDataset,
  StageConfigMismatch,
  // eval_metrics
  BadConfig,
  SilentReference,
  MissingPrediction,
  // anything that indicates a bug rather than bad input
  InvariantViolation,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `what()` is "<CodeName>: <detail>"
/// so command-line diagnostics name the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

}  // namespace binsynth
