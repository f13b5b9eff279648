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
#include <functional>
#include <string>
#include <vector>

namespace binsynth::acceptance {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  // Records a named check; a failed check fails the whole criterion.
  void check(bool ok, const std::string& what);
  void note(const std::string& what) { notes.push_back(what); }
};

struct Context {
  std::filesystem::path work_dir;  // scratch space, one subdirectory per criterion
  std::filesystem::path cli;       // path to the binsynth executable
  int train_steps = 3000;          // criterion 6 budget per stage
  bool verbose = false;            // progress output for long criteria
};

Outcome diffusion_math(const Context& ctx);
Outcome gradient_suite(const Context& ctx);
Outcome warp_suite(const Context& ctx);
Outcome metric_oracles(const Context& ctx);
Outcome least_squares_mono(const Context& ctx);
Outcome end_to_end_ordering(const Context& ctx);
Outcome cli_determinism(const Context& ctx);
Outcome dsp_sanity(const Context& ctx);

std::string fmt(const char* format, ...);

}  // namespace binsynth::acceptance
