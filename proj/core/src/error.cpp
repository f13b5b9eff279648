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

#include "binsynth/error.hpp"

namespace binsynth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NonUniformRate: return "NonUniformRate";
    case ErrorCode::BadRow: return "BadRow";
    case ErrorCode::ZeroNormQuaternion: return "ZeroNormQuaternion";
    case ErrorCode::EmptyTrack: return "EmptyTrack";
    case ErrorCode::WrongChannelCount: return "WrongChannelCount";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::PointOutsideRoom: return "PointOutsideRoom";
    case ErrorCode::EmptyHrtfBank: return "EmptyHrtfBank";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::StaleContext: return "StaleContext";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptArray: return "CorruptArray";
    case ErrorCode::MissingStage2Conditioner: return "MissingStage2Conditioner";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::StageConfigMismatch: return "StageConfigMismatch";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::SilentReference: return "SilentReference";
    case ErrorCode::MissingPrediction: return "MissingPrediction";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace binsynth
