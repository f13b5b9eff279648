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

#include "binsynth/audio.hpp"

namespace binsynth {

enum class WavEncoding { pcm16, float32 };

/// Reads RIFF/WAVE with PCM 16/24-bit or IEEE float 32-bit samples, 1 or 2
/// channels. Integer PCM is scaled by 2^-(bits-1).
AudioClip read_wav(const std::filesystem::path& path);

/// Writes little-endian RIFF/WAVE. pcm16 rounds half away from zero after
/// clamping to [-1, 1 - 2^-15]; float32 is a plain narrowing cast.
void write_wav(const AudioClip& clip, const std::filesystem::path& path, WavEncoding encoding);

}  // namespace binsynth
