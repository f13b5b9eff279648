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

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "binsynth/diffusion.hpp"

namespace binsynth {

enum class Padding {
  zero,      // bidirectional, zero outside the clip
  circular,  // test mode: wraps around, makes the net shift-equivariant
};

/// Shape-defining hyperparameters of the noise-prediction network.
struct NetConfig {
  int residual_blocks = 1;      // M
  int layers_per_block = 3;     // m
  int hidden = 16;
  int in_channels = 1;          // = out_channels; 1 for the common stage, 2 for the specific stage
  int out_channels = 1;
  int cond_audio_channels = 2;  // 2 = [mean warp, mono]; 4 = [warp l, warp r, mono, mono ref]
  int cond_pos_channels = 7;    // position + quaternion
  int step_embed_dim = 16;
  int dilation_cycle = 10;
  int train_steps = 200;        // valid step range of the embedding is [1, train_steps]
  int dilated_kernel = 3;
  int conditioner_kernel = 3;
  int conditioner_layers = 2;   // conv layers per conditioner branch
  Padding padding = Padding::zero;
  bool linear_conditioner = false;  // test mode: identity activations in the conditioner

  void validate() const;
  int total_layers() const { return residual_blocks * layers_per_block; }
  /// Dilation of layer j within its block.
  int dilation(int layer_in_block) const { return 1 << (layer_in_block % dilation_cycle); }

  bool operator==(const NetConfig&) const = default;
};

/// Named array with a row-major logical shape. Convolution weights are
/// (out, in, kernel) and stored tap-major with each tap a column-major
/// out x in block; fully-connected weights are column-major (out, in).
/// Values live in SIMD-aligned storage so that Eigen views of them always
/// take the same vectorized path, which keeps results bit-reproducible.
struct Tensor {
  using Storage = std::vector<double, Eigen::aligned_allocator<double>>;

  std::string name;
  std::vector<std::size_t> shape;
  Storage values;

  std::size_t size() const { return values.size(); }
};

/// Ordered set of named tensors. Used both for parameters and for gradients
/// and optimizer moments, which must be congruent with the parameters.
class ParamSet {
 public:
  Tensor& add(const std::string& name, std::vector<std::size_t> shape);

  const Tensor& operator[](const std::string& name) const;
  /// Mutable access bumps the generation counter seen by forward contexts.
  Tensor& mutable_tensor(const std::string& name);
  Tensor& mutable_tensor(std::size_t i);

  std::size_t count() const { return tensors_.size(); }
  const Tensor& tensor(std::size_t i) const { return tensors_.at(i); }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  std::size_t total_size() const;

  /// Same names, order and shapes.
  bool congruent(const ParamSet& other) const;
  ParamSet zeros_like() const;

  std::uint64_t generation() const { return generation_; }
  void touch() { ++generation_; }

  bool operator==(const ParamSet& other) const;

 private:
  std::vector<Tensor> tensors_;
  std::map<std::string, std::size_t> index_;
  std::uint64_t generation_ = 0;
};

using GradientSet = ParamSet;

struct TensorShape {
  std::string name;
  std::vector<std::size_t> shape;
};

/// Every parameter array in canonical order; a pure function of the config.
std::vector<TensorShape> param_shapes(const NetConfig& config);

/// Uniform(+-sqrt(1/fan_in)) weights, zero biases, zero output projection.
ParamSet init_params(const NetConfig& config, std::uint64_t seed);

/// Sinusoidal encoding of step t: sin(t f_i) then cos(t f_i), with
/// f_i = 10^(4 i / (D/2 - 1)).
Eigen::VectorXd step_encoding(int t, const NetConfig& config);

/// Encoding followed by two fully-connected layers with SiLU.
Eigen::VectorXd step_embedding(int t, const ParamSet& params, const NetConfig& config);

/// Position branch and audio branch conv stacks, concatenated and fused by a
/// 1x1 convolution. Returns hidden x N.
Eigen::MatrixXd conditioner(const Eigen::MatrixXd& pos, const Eigen::MatrixXd& cond_audio,
                            const ParamSet& params, const NetConfig& config);

/// Everything backward() needs from one forward evaluation.
struct ForwardContext {
  struct ConvStack {
    std::vector<Eigen::MatrixXd> inputs;  // input of each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  };
  struct Layer {
    Eigen::MatrixXd h_in;   // residual stream entering the layer
    Eigen::MatrixXd y;      // h_in + block step projection (dilated conv input)
    Eigen::ArrayXXd tanh_a;
    Eigen::ArrayXXd sigm_b;
    Eigen::MatrixXd gated;
  };

  bool valid = false;
  const ParamSet* params = nullptr;
  std::uint64_t generation = 0;
  NetConfig config;
  int t = 0;

  Eigen::MatrixXd z;
  ConvStack pos_branch;
  ConvStack audio_branch;
  Eigen::MatrixXd fused_in;
  Eigen::MatrixXd cond;

  Eigen::VectorXd encoding;
  Eigen::VectorXd fc1_pre;
  Eigen::VectorXd fc1_act;
  Eigen::VectorXd fc2_pre;
  Eigen::VectorXd embedding;

  Eigen::MatrixXd input_pre;
  std::vector<Layer> layers;
  Eigen::MatrixXd skip_sum;  // already scaled by 1/sqrt(L)
  Eigen::MatrixXd head_pre;
  Eigen::MatrixXd head_act;
};

/// Noise prediction for z_t (in_channels x N) at step t. When `ctx` is given
/// it is filled for a later backward().
Signal forward(const Signal& zt, int t, const Eigen::MatrixXd& pos,
               const Eigen::MatrixXd& cond_audio, const ParamSet& params,
               const NetConfig& config, ForwardContext* ctx = nullptr);

/// Reverse-mode gradients of a scalar loss given d(loss)/d(eps_pred).
GradientSet backward(const ForwardContext& ctx, const Signal& d_eps_pred);

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  ParamSet m;
  ParamSet v;
  long step = 0;

  static AdamState for_params(const ParamSet& params);
};

/// One bias-corrected Adam update; increments state.step first.
void adam_step(ParamSet& params, const GradientSet& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace binsynth
