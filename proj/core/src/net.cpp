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

#include "binsynth/net.hpp"

#include <cmath>
#include <random>
#include <string>

#include "binsynth/error.hpp"

namespace binsynth {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Arr = Eigen::ArrayXXd;

void NetConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) fail(ErrorCode::BadConfig, std::string("net.") + name + " must be >= 1");
  };
  positive(residual_blocks, "residual_blocks");
  positive(layers_per_block, "layers_per_block");
  positive(hidden, "hidden");
  positive(in_channels, "in_channels");
  positive(out_channels, "out_channels");
  positive(cond_audio_channels, "cond_audio_channels");
  positive(cond_pos_channels, "cond_pos_channels");
  positive(dilation_cycle, "dilation_cycle");
  positive(train_steps, "train_steps");
  positive(conditioner_layers, "conditioner_layers");
  if (step_embed_dim < 4 || step_embed_dim % 2 != 0) {
    fail(ErrorCode::BadConfig, "net.step_embed_dim must be even and >= 4");
  }
  if (dilated_kernel < 1 || dilated_kernel % 2 == 0 || conditioner_kernel < 1 ||
      conditioner_kernel % 2 == 0) {
    fail(ErrorCode::BadConfig, "kernel sizes must be odd (symmetric padding)");
  }
  if (dilation_cycle > 30) fail(ErrorCode::BadConfig, "net.dilation_cycle must be <= 30");
}

// ---------------------------------------------------------------------------
// ParamSet

Tensor& ParamSet::add(const std::string& name, std::vector<std::size_t> shape) {
  if (contains(name)) fail(ErrorCode::InvariantViolation, "duplicate tensor " + name);
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  index_[name] = tensors_.size();
  tensors_.push_back({name, std::move(shape), Tensor::Storage(n, 0.0)});
  ++generation_;
  return tensors_.back();
}

const Tensor& ParamSet::operator[](const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::ShapeMismatch, "no tensor named " + name);
  return tensors_[it->second];
}

Tensor& ParamSet::mutable_tensor(const std::string& name) {
  const auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::ShapeMismatch, "no tensor named " + name);
  ++generation_;
  return tensors_[it->second];
}

Tensor& ParamSet::mutable_tensor(std::size_t i) {
  ++generation_;
  return tensors_.at(i);
}

std::size_t ParamSet::total_size() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

bool ParamSet::congruent(const ParamSet& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name != other.tensors_[i].name ||
        tensors_[i].shape != other.tensors_[i].shape) {
      return false;
    }
  }
  return true;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& t : tensors_) out.add(t.name, t.shape);
  return out;
}

bool ParamSet::operator==(const ParamSet& other) const {
  if (!congruent(other)) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].values != other.tensors_[i].values) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Shapes and initialization

namespace {

using Shape = std::vector<std::size_t>;

std::string layer_prefix(int block, int layer) {
  return "block" + std::to_string(block) + ".layer" + std::to_string(layer);
}

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

}  // namespace

std::vector<TensorShape> param_shapes(const NetConfig& c) {
  c.validate();
  const std::size_t h = sz(c.hidden);
  const std::size_t d = sz(c.step_embed_dim);
  std::vector<TensorShape> s;
  auto conv = [&](const std::string& name, std::size_t out, std::size_t in, std::size_t k) {
    s.push_back({name + ".weight", Shape{out, in, k}});
    s.push_back({name + ".bias", Shape{out}});
  };
  auto fc = [&](const std::string& name, std::size_t out, std::size_t in) {
    s.push_back({name + ".weight", Shape{out, in}});
    s.push_back({name + ".bias", Shape{out}});
  };

  for (int i = 0; i < c.conditioner_layers; ++i) {
    conv("cond.pos." + std::to_string(i), h, i == 0 ? sz(c.cond_pos_channels) : h,
         sz(c.conditioner_kernel));
  }
  for (int i = 0; i < c.conditioner_layers; ++i) {
    conv("cond.audio." + std::to_string(i), h, i == 0 ? sz(c.cond_audio_channels) : h,
         sz(c.conditioner_kernel));
  }
  conv("cond.fuse", h, 2 * h, 1);
  fc("step.fc1", d, d);
  fc("step.fc2", d, d);
  conv("input", h, sz(c.in_channels), 1);
  for (int b = 0; b < c.residual_blocks; ++b) {
    fc("block" + std::to_string(b) + ".step", h, d);
    for (int j = 0; j < c.layers_per_block; ++j) {
      const std::string p = layer_prefix(b, j);
      conv(p + ".dilated", 2 * h, h, sz(c.dilated_kernel));
      conv(p + ".cond", 2 * h, h, 1);
      conv(p + ".out", 2 * h, h, 1);
    }
  }
  conv("skip", h, h, 1);
  conv("output", sz(c.out_channels), h, 1);
  return s;
}

ParamSet init_params(const NetConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamSet params;
  for (const auto& [name, shape] : param_shapes(config)) {
    Tensor& t = params.add(name, shape);
    const bool is_weight = name.size() > 7 && name.compare(name.size() - 7, 7, ".weight") == 0;
    if (!is_weight || name == "output.weight") continue;
    std::size_t fan_in = shape[1];
    if (shape.size() == 3) fan_in *= shape[2];
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : t.values) v = dist(rng);
  }
  return params;
}

// ---------------------------------------------------------------------------
// Building blocks

namespace {

Eigen::Map<const Mat> tap(const Tensor& w, int k) {
  const auto out = static_cast<Eigen::Index>(w.shape[0]);
  const auto in = static_cast<Eigen::Index>(w.shape[1]);
  return Eigen::Map<const Mat>(w.values.data() + k * out * in, out, in);
}

Eigen::Map<Mat> tap(Tensor& w, int k) {
  const auto out = static_cast<Eigen::Index>(w.shape[0]);
  const auto in = static_cast<Eigen::Index>(w.shape[1]);
  return Eigen::Map<Mat>(w.values.data() + k * out * in, out, in);
}

Eigen::Map<const Mat> fc_weight(const Tensor& w) { return tap(w, 0); }

Eigen::Map<const Vec> as_vec(const Tensor& t) {
  return Eigen::Map<const Vec>(t.values.data(), static_cast<Eigen::Index>(t.values.size()));
}

Eigen::Map<Vec> as_vec(Tensor& t) {
  return Eigen::Map<Vec>(t.values.data(), static_cast<Eigen::Index>(t.values.size()));
}

// Calls fn(out_begin, in_begin, len) for the column ranges where output
// column n reads input column n + offset.
template <typename Fn>
void for_each_segment(Eigen::Index n, Eigen::Index offset, Padding padding, Fn&& fn) {
  if (n == 0) return;
  if (padding == Padding::zero) {
    const Eigen::Index begin = std::max<Eigen::Index>(0, -offset);
    const Eigen::Index end = std::min<Eigen::Index>(n, n - offset);
    if (end > begin) fn(begin, begin + offset, end - begin);
    return;
  }
  const Eigen::Index shift = ((offset % n) + n) % n;
  if (n - shift > 0) fn(0, shift, n - shift);
  if (shift > 0) fn(n - shift, 0, shift);
}

Mat conv_forward(const Tensor& w, const Tensor& b, const Mat& in, int dilation, Padding padding) {
  const int k = static_cast<int>(w.shape[2]);
  const int center = (k - 1) / 2;
  Mat out = Mat::Zero(static_cast<Eigen::Index>(w.shape[0]), in.cols());
  for (int j = 0; j < k; ++j) {
    const auto offset = static_cast<Eigen::Index>((j - center) * dilation);
    const auto wk = tap(w, j);
    for_each_segment(in.cols(), offset, padding, [&](Eigen::Index o, Eigen::Index i, Eigen::Index len) {
      out.middleCols(o, len).noalias() += wk * in.middleCols(i, len);
    });
  }
  out.colwise() += as_vec(b);
  return out;
}

void conv_backward(const Tensor& w, const Mat& in, const Mat& d_out, int dilation, Padding padding,
                   Tensor& dw, Tensor& db, Mat* d_in) {
  const int k = static_cast<int>(w.shape[2]);
  const int center = (k - 1) / 2;
  if (d_in != nullptr) *d_in = Mat::Zero(in.rows(), in.cols());
  for (int j = 0; j < k; ++j) {
    const auto offset = static_cast<Eigen::Index>((j - center) * dilation);
    const auto wk = tap(w, j);
    auto dwk = tap(dw, j);
    for_each_segment(in.cols(), offset, padding, [&](Eigen::Index o, Eigen::Index i, Eigen::Index len) {
      dwk.noalias() += d_out.middleCols(o, len) * in.middleCols(i, len).transpose();
      if (d_in != nullptr) d_in->middleCols(i, len).noalias() += wk.transpose() * d_out.middleCols(o, len);
    });
  }
  as_vec(db) += d_out.rowwise().sum();
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 / (1.0 + (-x).exp());
}

Arr silu(const Arr& x) { return x * sigmoid(x); }

Arr silu_grad(const Arr& x) {
  const Arr s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

void check_input(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                                       std::to_string(m.cols()) + ", expected " +
                                       std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void check_params(const ParamSet& params, const NetConfig& config) {
  const auto shapes = param_shapes(config);
  if (params.count() != shapes.size()) {
    fail(ErrorCode::ShapeMismatch, "parameter set does not match the network config");
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const Tensor& t = params.tensor(i);
    if (t.name != shapes[i].name || t.shape != shapes[i].shape) {
      fail(ErrorCode::ShapeMismatch, "parameter " + shapes[i].name + " has unexpected name or shape");
    }
  }
}

void check_step(int t, const NetConfig& config) {
  if (t < 1 || t > config.train_steps) {
    fail(ErrorCode::StepOutOfRange, "diffusion step " + std::to_string(t) + " outside [1, " +
                                        std::to_string(config.train_steps) + "]");
  }
}

void run_branch(const std::string& prefix, const Mat& input, const ParamSet& params,
                const NetConfig& config, ForwardContext::ConvStack& stack, Mat& out) {
  stack.inputs.clear();
  stack.pre.clear();
  Mat x = input;
  for (int i = 0; i < config.conditioner_layers; ++i) {
    const std::string name = prefix + std::to_string(i);
    stack.inputs.push_back(x);
    Mat pre = conv_forward(params[name + ".weight"], params[name + ".bias"], x, 1, config.padding);
    x = config.linear_conditioner ? pre : Mat(silu(pre.array()));
    stack.pre.push_back(std::move(pre));
  }
  out = std::move(x);
}

void branch_backward(const std::string& prefix, const ForwardContext::ConvStack& stack,
                     const ParamSet& params, const NetConfig& config, Mat d_out, GradientSet& g) {
  for (int i = config.conditioner_layers - 1; i >= 0; --i) {
    const std::string name = prefix + std::to_string(i);
    const auto ui = static_cast<std::size_t>(i);
    Mat d_pre = config.linear_conditioner
                    ? d_out
                    : Mat(d_out.array() * silu_grad(stack.pre[ui].array()));
    Mat d_in;
    conv_backward(params[name + ".weight"], stack.inputs[ui], d_pre, 1, config.padding,
                  g.mutable_tensor(name + ".weight"), g.mutable_tensor(name + ".bias"),
                  i > 0 ? &d_in : nullptr);
    d_out = std::move(d_in);
  }
}

Mat run_conditioner(const Mat& pos, const Mat& cond_audio, const ParamSet& params,
                    const NetConfig& config, ForwardContext& ctx) {
  const Eigen::Index n = cond_audio.cols();
  check_input(pos, config.cond_pos_channels, n, "position features");
  check_input(cond_audio, config.cond_audio_channels, n, "conditional audio");
  Mat pos_out, audio_out;
  run_branch("cond.pos.", pos, params, config, ctx.pos_branch, pos_out);
  run_branch("cond.audio.", cond_audio, params, config, ctx.audio_branch, audio_out);
  ctx.fused_in.resize(2 * config.hidden, n);
  ctx.fused_in.topRows(config.hidden) = pos_out;
  ctx.fused_in.bottomRows(config.hidden) = audio_out;
  return conv_forward(params["cond.fuse.weight"], params["cond.fuse.bias"], ctx.fused_in, 1,
                      config.padding);
}

void run_embedding(int t, const ParamSet& params, const NetConfig& config, ForwardContext& ctx) {
  ctx.encoding = step_encoding(t, config);
  ctx.fc1_pre = fc_weight(params["step.fc1.weight"]) * ctx.encoding + as_vec(params["step.fc1.bias"]);
  ctx.fc1_act = silu(ctx.fc1_pre.array()).matrix();
  ctx.fc2_pre = fc_weight(params["step.fc2.weight"]) * ctx.fc1_act + as_vec(params["step.fc2.bias"]);
  ctx.embedding = silu(ctx.fc2_pre.array()).matrix();
}

}  // namespace

Eigen::VectorXd step_encoding(int t, const NetConfig& config) {
  config.validate();
  check_step(t, config);
  const int half = config.step_embed_dim / 2;
  Vec enc(config.step_embed_dim);
  for (int i = 0; i < half; ++i) {
    const double freq = std::pow(10.0, 4.0 * i / static_cast<double>(half - 1));
    enc[i] = std::sin(t * freq);
    enc[half + i] = std::cos(t * freq);
  }
  return enc;
}

Eigen::VectorXd step_embedding(int t, const ParamSet& params, const NetConfig& config) {
  check_params(params, config);
  ForwardContext ctx;
  run_embedding(t, params, config, ctx);
  return ctx.embedding;
}

Eigen::MatrixXd conditioner(const Eigen::MatrixXd& pos, const Eigen::MatrixXd& cond_audio,
                            const ParamSet& params, const NetConfig& config) {
  check_params(params, config);
  ForwardContext ctx;
  return run_conditioner(pos, cond_audio, params, config, ctx);
}

Signal forward(const Signal& zt, int t, const Eigen::MatrixXd& pos,
               const Eigen::MatrixXd& cond_audio, const ParamSet& params,
               const NetConfig& config, ForwardContext* ctx_out) {
  check_params(params, config);
  check_step(t, config);
  const Eigen::Index n = zt.cols();
  check_input(zt, config.in_channels, n, "z_t");
  check_input(cond_audio, config.cond_audio_channels, n, "conditional audio");

  ForwardContext local;
  ForwardContext& ctx = ctx_out != nullptr ? *ctx_out : local;
  ctx = ForwardContext{};
  ctx.config = config;
  ctx.t = t;
  ctx.z = zt;

  ctx.cond = run_conditioner(pos, cond_audio, params, config, ctx);
  run_embedding(t, params, config, ctx);

  const Eigen::Index h = config.hidden;
  ctx.input_pre = conv_forward(params["input.weight"], params["input.bias"], zt, 1, config.padding);
  Mat stream = silu(ctx.input_pre.array()).matrix();
  Mat skip = Mat::Zero(h, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  for (int b = 0; b < config.residual_blocks; ++b) {
    const std::string bp = "block" + std::to_string(b);
    const Vec step_proj =
        fc_weight(params[bp + ".step.weight"]) * ctx.embedding + as_vec(params[bp + ".step.bias"]);
    for (int j = 0; j < config.layers_per_block; ++j) {
      const std::string p = layer_prefix(b, j);
      ForwardContext::Layer layer;
      layer.h_in = stream;
      layer.y = stream.colwise() + step_proj;
      Mat a = conv_forward(params[p + ".dilated.weight"], params[p + ".dilated.bias"], layer.y,
                           config.dilation(j), config.padding);
      a += conv_forward(params[p + ".cond.weight"], params[p + ".cond.bias"], ctx.cond, 1,
                        config.padding);
      layer.tanh_a = a.topRows(h).array().tanh();
      layer.sigm_b = sigmoid(a.bottomRows(h).array());
      layer.gated = (layer.tanh_a * layer.sigm_b).matrix();
      const Mat out = conv_forward(params[p + ".out.weight"], params[p + ".out.bias"], layer.gated,
                                   1, config.padding);
      stream = (stream + out.topRows(h)) * inv_sqrt2;
      skip += out.bottomRows(h);
      ctx.layers.push_back(std::move(layer));
    }
  }

  ctx.skip_sum = skip / std::sqrt(static_cast<double>(config.total_layers()));
  ctx.head_pre = conv_forward(params["skip.weight"], params["skip.bias"], ctx.skip_sum, 1, config.padding);
  ctx.head_act = silu(ctx.head_pre.array()).matrix();
  Signal eps = conv_forward(params["output.weight"], params["output.bias"], ctx.head_act, 1,
                            config.padding);

  ctx.params = &params;
  ctx.generation = params.generation();
  ctx.valid = true;
  return eps;
}

GradientSet backward(const ForwardContext& ctx, const Signal& d_eps) {
  if (!ctx.valid || ctx.params == nullptr) {
    fail(ErrorCode::StaleContext, "backward() needs a context filled by forward()");
  }
  if (ctx.params->generation() != ctx.generation) {
    fail(ErrorCode::StaleContext, "parameters changed since the forward evaluation");
  }
  const ParamSet& params = *ctx.params;
  const NetConfig& config = ctx.config;
  const Eigen::Index h = config.hidden;
  const Eigen::Index n = ctx.z.cols();
  check_input(d_eps, config.out_channels, n, "loss gradient");

  GradientSet g = params.zeros_like();

  // Output head.
  Mat d_head_act;
  conv_backward(params["output.weight"], ctx.head_act, d_eps, 1, config.padding,
                g.mutable_tensor("output.weight"), g.mutable_tensor("output.bias"), &d_head_act);
  const Mat d_head_pre = (d_head_act.array() * silu_grad(ctx.head_pre.array())).matrix();
  Mat d_skip_sum;
  conv_backward(params["skip.weight"], ctx.skip_sum, d_head_pre, 1, config.padding,
                g.mutable_tensor("skip.weight"), g.mutable_tensor("skip.bias"), &d_skip_sum);
  const Mat d_skip = d_skip_sum / std::sqrt(static_cast<double>(config.total_layers()));

  // Residual layers, last to first.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Mat d_stream = Mat::Zero(h, n);
  Mat d_cond = Mat::Zero(h, n);
  Vec d_embedding = Vec::Zero(config.step_embed_dim);
  for (int b = config.residual_blocks - 1; b >= 0; --b) {
    const std::string bp = "block" + std::to_string(b);
    Vec d_step_proj = Vec::Zero(h);
    for (int j = config.layers_per_block - 1; j >= 0; --j) {
      const std::string p = layer_prefix(b, j);
      const auto& layer = ctx.layers[static_cast<std::size_t>(b * config.layers_per_block + j)];

      Mat d_out(2 * h, n);
      d_out.topRows(h) = d_stream * inv_sqrt2;
      d_out.bottomRows(h) = d_skip;
      Mat d_gated;
      conv_backward(params[p + ".out.weight"], layer.gated, d_out, 1, config.padding,
                    g.mutable_tensor(p + ".out.weight"), g.mutable_tensor(p + ".out.bias"), &d_gated);

      Mat d_a(2 * h, n);
      const Arr dg = d_gated.array();
      d_a.topRows(h) = (dg * layer.sigm_b * (1.0 - layer.tanh_a.square())).matrix();
      d_a.bottomRows(h) = (dg * layer.tanh_a * layer.sigm_b * (1.0 - layer.sigm_b)).matrix();

      Mat d_cond_part;
      conv_backward(params[p + ".cond.weight"], ctx.cond, d_a, 1, config.padding,
                    g.mutable_tensor(p + ".cond.weight"), g.mutable_tensor(p + ".cond.bias"),
                    &d_cond_part);
      d_cond += d_cond_part;

      Mat d_y;
      conv_backward(params[p + ".dilated.weight"], layer.y, d_a, config.dilation(j), config.padding,
                    g.mutable_tensor(p + ".dilated.weight"), g.mutable_tensor(p + ".dilated.bias"),
                    &d_y);
      d_step_proj += d_y.rowwise().sum();
      d_stream = d_stream * inv_sqrt2 + d_y;
    }
    auto dw = tap(g.mutable_tensor(bp + ".step.weight"), 0);
    dw.noalias() += d_step_proj * ctx.embedding.transpose();
    as_vec(g.mutable_tensor(bp + ".step.bias")) += d_step_proj;
    d_embedding.noalias() += fc_weight(params[bp + ".step.weight"]).transpose() * d_step_proj;
  }

  // Input projection; z_t itself needs no gradient.
  const Mat d_input_pre = (d_stream.array() * silu_grad(ctx.input_pre.array())).matrix();
  conv_backward(params["input.weight"], ctx.z, d_input_pre, 1, config.padding,
                g.mutable_tensor("input.weight"), g.mutable_tensor("input.bias"), nullptr);

  // Step embedding MLP.
  const Vec d_fc2_pre = (d_embedding.array() * silu_grad(ctx.fc2_pre.array())).matrix();
  tap(g.mutable_tensor("step.fc2.weight"), 0).noalias() += d_fc2_pre * ctx.fc1_act.transpose();
  as_vec(g.mutable_tensor("step.fc2.bias")) += d_fc2_pre;
  const Vec d_fc1_act = fc_weight(params["step.fc2.weight"]).transpose() * d_fc2_pre;
  const Vec d_fc1_pre = (d_fc1_act.array() * silu_grad(ctx.fc1_pre.array())).matrix();
  tap(g.mutable_tensor("step.fc1.weight"), 0).noalias() += d_fc1_pre * ctx.encoding.transpose();
  as_vec(g.mutable_tensor("step.fc1.bias")) += d_fc1_pre;

  // Conditioner.
  Mat d_fused;
  conv_backward(params["cond.fuse.weight"], ctx.fused_in, d_cond, 1, config.padding,
                g.mutable_tensor("cond.fuse.weight"), g.mutable_tensor("cond.fuse.bias"), &d_fused);
  branch_backward("cond.pos.", ctx.pos_branch, params, config, d_fused.topRows(h), g);
  branch_backward("cond.audio.", ctx.audio_branch, params, config, d_fused.bottomRows(h), g);
  return g;
}

// ---------------------------------------------------------------------------
// Adam

AdamState AdamState::for_params(const ParamSet& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(ParamSet& params, const GradientSet& grads, AdamState& state,
               const AdamConfig& config) {
  if (!params.congruent(grads) || !params.congruent(state.m) || !params.congruent(state.v)) {
    fail(ErrorCode::ShapeMismatch, "adam_step: parameters, gradients and moments differ in shape");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.count(); ++i) {
    auto p = as_vec(params.mutable_tensor(i));
    const auto gr = as_vec(grads.tensor(i));
    auto m = as_vec(state.m.mutable_tensor(i));
    auto v = as_vec(state.v.mutable_tensor(i));
    m = config.beta1 * m + (1.0 - config.beta1) * gr;
    v = config.beta2 * v + (1.0 - config.beta2) * gr.cwiseAbs2();
    p.array() -= config.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config.eps);
  }
}

}  // namespace binsynth
