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

#include "binsynth/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "binsynth/error.hpp"

namespace binsynth {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

Format parse_fmt(const unsigned char* p, std::uint32_t size) {
  if (size < 16) fail(ErrorCode::MalformedHeader, "fmt chunk size " + std::to_string(size) + " < 16");
  Format f;
  f.tag = le_u16(p);
  f.channels = le_u16(p + 2);
  f.sample_rate = le_u32(p + 4);
  f.block_align = le_u16(p + 12);
  f.bits = le_u16(p + 14);
  if (f.tag == kFormatExtensible) {
    if (size < 40) fail(ErrorCode::MalformedHeader, "extensible fmt chunk too short");
    // SubFormat GUID begins with the plain format tag.
    f.tag = le_u16(p + 24);
  }
  return f;
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());

  if (bytes.size() < 12) fail(ErrorCode::MalformedHeader, "RIFF header: file shorter than 12 bytes");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0) fail(ErrorCode::MalformedHeader, "RIFF id");
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) fail(ErrorCode::MalformedHeader, "WAVE id");

  std::size_t pos = 12;
  Format fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (body + size > bytes.size()) fail(ErrorCode::TruncatedData, "fmt chunk extends past end of file");
      fmt = parse_fmt(bytes.data() + body, size);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + size > bytes.size()) {
        fail(ErrorCode::TruncatedData, "data chunk declares " + std::to_string(size) +
                                           " bytes, only " + std::to_string(bytes.size() - body) +
                                           " present");
      }
      data = bytes.data() + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) fail(ErrorCode::MalformedHeader, "fmt chunk missing");
  if (data == nullptr) fail(ErrorCode::MalformedHeader, "data chunk missing");

  if (fmt.channels != 1 && fmt.channels != 2) {
    fail(ErrorCode::UnsupportedEncoding, "channels = " + std::to_string(fmt.channels));
  }
  if (fmt.sample_rate == 0) fail(ErrorCode::MalformedHeader, "sample_rate = 0");
  const bool pcm = fmt.tag == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24);
  const bool flt = fmt.tag == kFormatFloat && fmt.bits == 32;
  if (!pcm && !flt) {
    fail(ErrorCode::UnsupportedEncoding, "format tag " + std::to_string(fmt.tag) +
                                             " with bits_per_sample " + std::to_string(fmt.bits));
  }
  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame = bytes_per_sample * fmt.channels;
  if (fmt.block_align != frame) {
    fail(ErrorCode::MalformedHeader, "block_align = " + std::to_string(fmt.block_align));
  }
  if (data_size % frame != 0) {
    fail(ErrorCode::TruncatedData, "data size " + std::to_string(data_size) +
                                       " is not a multiple of block_align");
  }
  const std::size_t frames = data_size / frame;

  AudioClip clip(static_cast<double>(fmt.sample_rate), fmt.channels, frames);
  for (std::size_t c = 0; c < fmt.channels; ++c) {
    auto out = clip.channel(c);
    for (std::size_t n = 0; n < frames; ++n) {
      const unsigned char* s = data + n * frame + c * bytes_per_sample;
      if (flt) {
        out[n] = static_cast<double>(std::bit_cast<float>(le_u32(s)));
      } else if (fmt.bits == 16) {
        out[n] = static_cast<double>(static_cast<std::int16_t>(le_u16(s))) / 32768.0;
      } else {
        std::int32_t v = static_cast<std::int32_t>(s[0] | (s[1] << 8) | (s[2] << 16));
        if (v & 0x800000) v -= 0x1000000;
        out[n] = static_cast<double>(v) / 8388608.0;
      }
    }
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path, WavEncoding encoding) {
  const double rate = clip.sample_rate();
  if (rate != std::round(rate) || rate > 4294967295.0) {
    fail(ErrorCode::BadConfig, "WAV requires an integral sample rate, got " + std::to_string(rate));
  }
  const std::uint16_t channels = static_cast<std::uint16_t>(clip.channels());
  if (channels < 1 || channels > 2) {
    fail(ErrorCode::UnsupportedEncoding, "channels = " + std::to_string(clip.channels()));
  }
  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  const std::uint16_t tag = encoding == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint64_t data_size = static_cast<std::uint64_t>(clip.length()) * block_align;
  if (data_size > 0xFFFFFFFFull - 36) fail(ErrorCode::IoError, "clip too long for RIFF");

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, static_cast<std::uint32_t>(36 + data_size));
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(rate));
  put_u32(out, static_cast<std::uint32_t>(rate) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, static_cast<std::uint32_t>(data_size));

  for (std::size_t n = 0; n < clip.length(); ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = clip.channel(c)[n];
      if (encoding == WavEncoding::float32) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
      } else {
        const double clamped = std::isnan(x) ? 0.0 : std::clamp(x, -1.0, 1.0 - 1.0 / 32768.0);
        // std::round is half-away-from-zero.
        const auto q = static_cast<std::int16_t>(std::round(clamped * 32768.0));
        put_u16(out, static_cast<std::uint16_t>(q));
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace binsynth
