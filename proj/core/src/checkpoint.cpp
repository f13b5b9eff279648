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

#include "binsynth/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "json.hpp"

#include "binsynth/error.hpp"

namespace binsynth {

using json = nlohmann::json;

namespace {

json config_fields(const NetConfig& c) {
  return json{{"residual_blocks", c.residual_blocks},
              {"layers_per_block", c.layers_per_block},
              {"hidden", c.hidden},
              {"in_channels", c.in_channels},
              {"out_channels", c.out_channels},
              {"cond_audio_channels", c.cond_audio_channels},
              {"cond_pos_channels", c.cond_pos_channels},
              {"step_embed_dim", c.step_embed_dim},
              {"dilation_cycle", c.dilation_cycle},
              {"train_steps", c.train_steps},
              {"dilated_kernel", c.dilated_kernel},
              {"conditioner_kernel", c.conditioner_kernel},
              {"conditioner_layers", c.conditioner_layers},
              {"padding", c.padding == Padding::zero ? "zero" : "circular"},
              {"linear_conditioner", c.linear_conditioner}};
}

NetConfig config_from(const json& j) {
  NetConfig c;
  try {
    c.residual_blocks = j.at("residual_blocks").get<int>();
    c.layers_per_block = j.at("layers_per_block").get<int>();
    c.hidden = j.at("hidden").get<int>();
    c.in_channels = j.at("in_channels").get<int>();
    c.out_channels = j.at("out_channels").get<int>();
    c.cond_audio_channels = j.at("cond_audio_channels").get<int>();
    c.cond_pos_channels = j.at("cond_pos_channels").get<int>();
    c.step_embed_dim = j.at("step_embed_dim").get<int>();
    c.dilation_cycle = j.at("dilation_cycle").get<int>();
    c.train_steps = j.at("train_steps").get<int>();
    c.dilated_kernel = j.at("dilated_kernel").get<int>();
    c.conditioner_kernel = j.at("conditioner_kernel").get<int>();
    c.conditioner_layers = j.at("conditioner_layers").get<int>();
    const auto padding = j.at("padding").get<std::string>();
    if (padding != "zero" && padding != "circular") throw std::runtime_error("padding");
    c.padding = padding == "zero" ? Padding::zero : Padding::circular;
    c.linear_conditioner = j.at("linear_conditioner").get<bool>();
  } catch (const std::exception& e) {
    fail(ErrorCode::CorruptArray, std::string("<config>: ") + e.what());
  }
  return c;
}

class Reader {
 public:
  explicit Reader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <typename T>
  T read(const std::string& context) {
    if (!has(sizeof(T))) fail(ErrorCode::CorruptArray, context + ": unexpected end of file");
    T v{};
    unsigned char tmp[sizeof(T)];
    std::memcpy(tmp, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(tmp[i], tmp[sizeof(T) - 1 - i]);
    }
    std::memcpy(&v, tmp, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string read_string(std::size_t n, const std::string& context) {
    if (!has(n)) fail(ErrorCode::CorruptArray, context + ": unexpected end of file");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
void put(std::vector<unsigned char>& out, T v) {
  unsigned char tmp[sizeof(T)];
  std::memcpy(tmp, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(tmp[i], tmp[sizeof(T) - 1 - i]);
  }
  out.insert(out.end(), tmp, tmp + sizeof(T));
}

}  // namespace

std::string net_config_to_json(const NetConfig& config) { return config_fields(config).dump(); }

NetConfig net_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::CorruptArray, std::string("<config>: ") + e.what());
  }
  return config_from(j);
}

std::string first_config_difference(const NetConfig& a, const NetConfig& b) {
  const json ja = config_fields(a);
  const json jb = config_fields(b);
  for (const auto& [key, value] : ja.items()) {
    if (jb.at(key) != value) return key;
  }
  return {};
}

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params,
                     const NetConfig& config, const std::string& meta_json) {
  json meta;
  try {
    meta = json::parse(meta_json);
  } catch (const json::exception& e) {
    fail(ErrorCode::BadConfig, std::string("checkpoint meta is not JSON: ") + e.what());
  }
  const std::string text = json{{"net", config_fields(config)}, {"meta", meta}}.dump();

  std::vector<unsigned char> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.count()));
  for (const auto& t : params.tensors()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint64_t>(out, d);
    for (double v : t.values) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) fail(ErrorCode::IoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot open checkpoint " + path.string());
  Reader r(std::vector<unsigned char>((std::istreambuf_iterator<char>(f)),
                                      std::istreambuf_iterator<char>()));

  if (!r.has(sizeof(kCheckpointMagic)) ||
      r.read_string(sizeof(kCheckpointMagic), "<magic>") !=
          std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    fail(ErrorCode::BadMagic, path.string() + " is not a binsynth checkpoint");
  }
  const auto version = r.read<std::uint32_t>("<version>");
  if (version != kCheckpointVersion) {
    fail(ErrorCode::VersionMismatch, "checkpoint format version " + std::to_string(version) +
                                         ", expected " + std::to_string(kCheckpointVersion));
  }
  const auto text_len = r.read<std::uint64_t>("<config>");
  if (text_len > r.remaining()) fail(ErrorCode::CorruptArray, "<config>: unexpected end of file");
  const std::string text = r.read_string(static_cast<std::size_t>(text_len), "<config>");

  Checkpoint ck;
  json doc;
  try {
    doc = json::parse(text);
    ck.config = config_from(doc.at("net"));
    ck.meta_json = doc.contains("meta") ? doc.at("meta").dump() : "{}";
  } catch (const json::exception& e) {
    fail(ErrorCode::CorruptArray, std::string("<config>: ") + e.what());
  }
  try {
    ck.config.validate();
  } catch (const Error& e) {
    fail(ErrorCode::CorruptArray, "<config>: " + e.detail());
  }

  const auto count = r.read<std::uint32_t>("<array count>");
  const auto expected = param_shapes(ck.config);
  if (count != expected.size()) {
    fail(ErrorCode::CorruptArray, "<array count>: " + std::to_string(count) + " arrays, config implies " +
                                      std::to_string(expected.size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string& want = expected[i].name;
    const auto name_len = r.read<std::uint32_t>(want);
    if (name_len > r.remaining()) fail(ErrorCode::CorruptArray, want + ": unexpected end of file");
    const std::string name = r.read_string(name_len, want);
    if (name != want) fail(ErrorCode::CorruptArray, want + ": found array named '" + name + "'");
    const auto rank = r.read<std::uint32_t>(name);
    std::vector<std::size_t> shape;
    for (std::uint32_t k = 0; k < rank && k < 8; ++k) {
      shape.push_back(static_cast<std::size_t>(r.read<std::uint64_t>(name)));
    }
    if (shape != expected[i].shape) fail(ErrorCode::CorruptArray, name + ": shape does not match config");
    Tensor& t = ck.params.add(name, shape);
    if (t.values.size() * 8 > r.remaining()) {
      fail(ErrorCode::CorruptArray, name + ": unexpected end of file");
    }
    for (double& v : t.values) v = std::bit_cast<double>(r.read<std::uint64_t>(name));
  }
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const NetConfig& expected) {
  Checkpoint ck = load_checkpoint(path);
  const std::string diff = first_config_difference(ck.config, expected);
  if (!diff.empty()) {
    fail(ErrorCode::VersionMismatch, "checkpoint config field '" + diff +
                                         "' differs from the expected network config");
  }
  return ck;
}

}  // namespace binsynth
