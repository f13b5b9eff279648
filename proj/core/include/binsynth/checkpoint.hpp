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

#include "binsynth/net.hpp"

namespace binsynth {

/// Checkpoint container, all integers little-endian:
///
///   char[8]  magic "BSYNCKPT"
///   u32      format version (1)
///   u64      config text length, then the config text (JSON)
///   u32      array count
///   per array:
///     u32 name length, name bytes
///     u32 rank, rank x u64 dims
///     prod(dims) x f64 values
///
/// The config text is a JSON object {"net": {...}, "meta": {...}}; "meta" is
/// free-form and owned by the caller.
inline constexpr char kCheckpointMagic[8] = {'B', 'S', 'Y', 'N', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetConfig config;
  ParamSet params;
  std::string meta_json = "{}";
};

std::string net_config_to_json(const NetConfig& config);
NetConfig net_config_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params,
                     const NetConfig& config, const std::string& meta_json = "{}");

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Loads and requires the stored config to equal `expected`; a mismatch
/// raises VersionMismatch naming the first differing field.
Checkpoint load_checkpoint(const std::filesystem::path& path, const NetConfig& expected);

/// Name of the first field where the two configs differ, or empty.
std::string first_config_difference(const NetConfig& a, const NetConfig& b);

}  // namespace binsynth
