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

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "binsynth/net.hpp"
#include "unit_support.hpp"

using namespace binsynth;
using binsynth::testing::error_of;

namespace {

NetConfig toy(int blocks = 1, int layers = 3, int hidden = 16) {
  NetConfig c;
  c.residual_blocks = blocks;
  c.layers_per_block = layers;
  c.hidden = hidden;
  c.step_embed_dim = hidden;
  return c;
}

// Parameter count derived by hand from the layer list: conv (out, in, k) has
// out*in*k weights plus out biases; fully-connected (out, in) has out*in + out.
std::size_t closed_form_count(const NetConfig& c) {
  const std::size_t h = c.hidden, d = c.step_embed_dim, k = c.conditioner_kernel;
  auto conv = [](std::size_t out, std::size_t in, std::size_t kk) { return out * in * kk + out; };
  std::size_t n = 0;
  for (int i = 0; i < c.conditioner_layers; ++i) {
    n += conv(h, i == 0 ? c.cond_pos_channels : h, k);
    n += conv(h, i == 0 ? c.cond_audio_channels : h, k);
  }
  n += conv(h, 2 * h, 1);
  n += 2 * conv(d, d, 1);
  n += conv(h, c.in_channels, 1);
  n += static_cast<std::size_t>(c.residual_blocks) * conv(h, d, 1);
  n += static_cast<std::size_t>(c.total_layers()) *
       (conv(2 * h, h, c.dilated_kernel) + 2 * conv(2 * h, h, 1));
  n += conv(h, h, 1) + conv(c.out_channels, h, 1);
  return n;
}

void randomize(ParamSet& p, std::mt19937_64& rng, double scale = 0.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (std::size_t i = 0; i < p.count(); ++i) {
    for (auto& v : p.mutable_tensor(i).values) v = u(rng);
  }
}

Eigen::MatrixXd shift_columns(const Eigen::MatrixXd& m, Eigen::Index k) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.col((j + k) % m.cols()) = m.col(j);
  return out;
}

struct Inputs {
  Signal z;
  Eigen::MatrixXd pos;
  Eigen::MatrixXd audio;
};

Inputs random_inputs(const NetConfig& c, Eigen::Index n, std::mt19937_64& rng) {
  return {gaussian(c.in_channels, n, rng), gaussian(c.cond_pos_channels, n, rng),
          gaussian(c.cond_audio_channels, n, rng)};
}

}  // namespace

TEST_CASE("parameter shapes are a pure function of the config") {
  const NetConfig c = toy();
  const auto shapes = param_shapes(c);
  std::size_t total = 0;
  for (const auto& s : shapes) {
    total += std::accumulate(s.shape.begin(), s.shape.end(), std::size_t{1}, std::multiplies<>());
  }
  CHECK(total == closed_form_count(c));
  CHECK(total == 11665);
  CHECK(init_params(c, 0).total_size() == 11665);

  // Golden entries at the ends and in the middle of the list.
  CHECK(shapes.front().name == "cond.pos.0.weight");
  CHECK(shapes.front().shape == std::vector<std::size_t>{16, 7, 3});
  CHECK(shapes.back().name == "output.bias");
  CHECK(shapes.back().shape == std::vector<std::size_t>{1});

  for (const NetConfig& other : {toy(2, 4, 8), toy(3, 10, 32)}) {
    std::size_t n = 0;
    for (const auto& s : param_shapes(other)) {
      n += std::accumulate(s.shape.begin(), s.shape.end(), std::size_t{1}, std::multiplies<>());
    }
    CHECK(n == closed_form_count(other));
  }
  NetConfig specific = toy();
  specific.in_channels = specific.out_channels = 2;
  specific.cond_audio_channels = 4;
  CHECK(init_params(specific, 0).total_size() == closed_form_count(specific));
}

TEST_CASE("dilation cycles through powers of two") {
  NetConfig c = toy(3, 10, 8);
  for (int j = 0; j < 10; ++j) CHECK(c.dilation(j) == (1 << j));
  c.dilation_cycle = 3;
  CHECK(c.dilation(3) == 1);
  CHECK(c.dilation(5) == 4);
}

TEST_CASE("init_params contract") {
  const NetConfig c = toy();
  const ParamSet a = init_params(c, 3);
  CHECK(a == init_params(c, 3));
  CHECK(!(a == init_params(c, 4)));
  for (const auto& t : a.tensors()) {
    const bool bias = t.name.ends_with(".bias");
    if (bias || t.name == "output.weight") {
      for (double v : t.values) CHECK(v == 0.0);
      continue;
    }
    const double bound = std::sqrt(1.0 / static_cast<double>(t.shape[1] * (t.shape.size() == 3 ? t.shape[2] : 1)));
    for (double v : t.values) CHECK(std::abs(v) <= bound);
  }
  std::mt19937_64 rng(1);
  const Inputs in = random_inputs(c, 50, rng);
  CHECK(forward(in.z, 7, in.pos, in.audio, a, c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step encoding and embedding") {
  const NetConfig c = toy();
  const Eigen::VectorXd e = step_encoding(5, c);
  REQUIRE(e.size() == c.step_embed_dim);
  CHECK(e[0] == doctest::Approx(std::sin(5.0)));
  CHECK(e[c.step_embed_dim / 2] == doctest::Approx(std::cos(5.0)));
  CHECK(e[c.step_embed_dim / 2 - 1] == doctest::Approx(std::sin(5.0 * 1e4)));
  for (int t1 = 1; t1 <= c.train_steps; ++t1) {
    for (int t2 = t1 + 1; t2 <= c.train_steps; t2 += 7) {
      CHECK((step_encoding(t1, c) - step_encoding(t2, c)).norm() > 1e-6);
    }
  }
  const ParamSet p = init_params(c, 2);
  CHECK(step_embedding(9, p, c) == step_embedding(9, p, c));
  CHECK(step_embedding(9, p, c) != step_embedding(10, p, c));
  CHECK(error_of([&] { step_embedding(0, p, c); }) == ErrorCode::StepOutOfRange);
  CHECK(error_of([&] { step_embedding(c.train_steps + 1, p, c); }) == ErrorCode::StepOutOfRange);
}

TEST_CASE("conditioner contracts") {
  NetConfig c = toy();
  std::mt19937_64 rng(6);
  const ParamSet zero = init_params(c, 1).zeros_like();
  for (Eigen::Index n : {1, 17, 256}) {
    const Eigen::MatrixXd pos = gaussian(7, n, rng);
    const Eigen::MatrixXd audio = gaussian(2, n, rng);
    CHECK(conditioner(pos, audio, zero, c).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd out = conditioner(pos, audio, init_params(c, 1), c);
    CHECK(out.rows() == c.hidden);
    CHECK(out.cols() == n);
  }

  c.linear_conditioner = true;
  ParamSet p = init_params(c, 8);
  for (std::size_t i = 0; i < p.count(); ++i) {
    if (p.tensor(i).name.starts_with("cond.pos.")) {
      for (auto& v : p.mutable_tensor(i).values) v = 0.0;
    }
  }
  const Eigen::MatrixXd pos = gaussian(7, 40, rng);
  const Eigen::MatrixXd audio = gaussian(2, 40, rng);
  const Eigen::MatrixXd once = conditioner(pos, audio, p, c);
  const Eigen::MatrixXd twice = conditioner(pos, 2.0 * audio, p, c);
  CHECK((twice - 2.0 * once).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(once.cwiseAbs().maxCoeff() > 0.0);

  CHECK(error_of([&] { conditioner(pos, gaussian(3, 40, rng), p, c); }) == ErrorCode::ShapeMismatch);
  CHECK(error_of([&] { conditioner(pos, gaussian(2, 39, rng), p, c); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("forward shapes and determinism") {
  const NetConfig c = toy();
  std::mt19937_64 rng(10);
  ParamSet p = init_params(c, 5);
  randomize(p, rng, 0.2);
  for (Eigen::Index n : {8, 100}) {
    const Inputs in = random_inputs(c, n, rng);
    const Signal a = forward(in.z, 3, in.pos, in.audio, p, c);
    CHECK(a.rows() == 1);
    CHECK(a.cols() == n);
    CHECK(a == forward(in.z, 3, in.pos, in.audio, p, c));
  }
  const Inputs in = random_inputs(c, 8, rng);
  CHECK(error_of([&] { forward(gaussian(2, 8, rng), 3, in.pos, in.audio, p, c); }) == ErrorCode::ShapeMismatch);
  CHECK(error_of([&] { forward(in.z, 3, in.pos, in.audio, init_params(toy(1, 2), 0), c); }) ==
        ErrorCode::ShapeMismatch);
}

TEST_CASE("circular padding makes forward shift equivariant") {
  NetConfig c = toy(2, 3, 8);
  c.padding = Padding::circular;
  std::mt19937_64 rng(14);
  ParamSet p = init_params(c, 2);
  randomize(p, rng, 0.3);
  const Inputs in = random_inputs(c, 64, rng);
  const Signal base = forward(in.z, 11, in.pos, in.audio, p, c);
  for (Eigen::Index k : {1, 5, 33}) {
    const Signal shifted = forward(shift_columns(in.z, k), 11, shift_columns(in.pos, k), shift_columns(in.audio, k), p, c);
    CHECK((shifted - shift_columns(base, k)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("backward matches central finite differences") {
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    NetConfig c = toy(1, 2, 8);
    c.in_channels = c.out_channels = seed == 0 ? 1 : 2;
    c.cond_audio_channels = seed == 0 ? 2 : 4;
    std::mt19937_64 rng(seed + 30);
    ParamSet p = init_params(c, seed);
    randomize(p, rng);
    const Inputs in = random_inputs(c, 32, rng);
    const Signal w = gaussian(c.out_channels, 32, rng);
    ForwardContext ctx;
    forward(in.z, 42, in.pos, in.audio, p, c, &ctx);
    const GradientSet g = backward(ctx, w);
    CHECK(g.congruent(p));
    const double h = 1e-4;
    std::uniform_int_distribution<std::size_t> pick(0, 1u << 30);
    for (std::size_t k = 0; k < p.count(); ++k) {
      const std::size_t size = p.tensor(k).size();
      for (int trial = 0; trial < 4; ++trial) {
        const std::size_t i = pick(rng) % size;
        const double orig = p.tensor(k).values[i];
        p.mutable_tensor(k).values[i] = orig + h;
        const double up = (forward(in.z, 42, in.pos, in.audio, p, c).array() * w.array()).sum();
        p.mutable_tensor(k).values[i] = orig - h;
        const double down = (forward(in.z, 42, in.pos, in.audio, p, c).array() * w.array()).sum();
        p.mutable_tensor(k).values[i] = orig;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = g.tensor(k).values[i];
        const double diff = std::abs(numeric - analytic);
        INFO(p.tensor(k).name, "[", i, "]");
        CHECK((diff <= 1e-8 || diff <= 1e-3 * std::max(std::abs(numeric), std::abs(analytic))));
      }
    }
  }
}

TEST_CASE("backward of a zero loss gradient is zero") {
  const NetConfig c = toy();
  std::mt19937_64 rng(3);
  ParamSet p = init_params(c, 1);
  randomize(p, rng);
  const Inputs in = random_inputs(c, 20, rng);
  ForwardContext ctx;
  forward(in.z, 2, in.pos, in.audio, p, c, &ctx);
  const GradientSet g = backward(ctx, Signal::Zero(1, 20));
  for (const auto& t : g.tensors()) {
    for (double v : t.values) CHECK(v == 0.0);
  }
}

TEST_CASE("backward rejects stale or empty contexts") {
  const NetConfig c = toy();
  std::mt19937_64 rng(4);
  ParamSet p = init_params(c, 1);
  const Inputs in = random_inputs(c, 20, rng);
  CHECK(error_of([&] { backward(ForwardContext{}, Signal::Zero(1, 20)); }) == ErrorCode::StaleContext);
  ForwardContext ctx;
  forward(in.z, 2, in.pos, in.audio, p, c, &ctx);
  p.mutable_tensor("skip.weight").values[0] += 1.0;
  CHECK(error_of([&] { backward(ctx, Signal::Zero(1, 20)); }) == ErrorCode::StaleContext);
}

TEST_CASE("adam_step") {
  const NetConfig c = toy(1, 1, 4);
  ParamSet p = init_params(c, 1);
  const ParamSet before = p;
  AdamState st = AdamState::for_params(p);
  const AdamConfig cfg;

  SUBCASE("zero gradients leave fresh parameters unchanged") {
    adam_step(p, p.zeros_like(), st, cfg);
    CHECK(p == before);
    CHECK(st.step == 1);
    for (const auto& t : st.m.tensors()) {
      for (double v : t.values) CHECK(v == 0.0);
    }
  }
  SUBCASE("first step moves by lr * g / (|g| + eps)") {
    GradientSet g = p.zeros_like();
    std::mt19937_64 rng(2);
    randomize(g, rng, 1e-3);
    adam_step(p, g, st, cfg);
    for (std::size_t k = 0; k < p.count(); ++k) {
      for (std::size_t i = 0; i < p.tensor(k).size(); ++i) {
        const double gi = g.tensor(k).values[i];
        const double delta = p.tensor(k).values[i] - before.tensor(k).values[i];
        CHECK(delta == doctest::Approx(-cfg.lr * gi / (std::abs(gi) + cfg.eps)).epsilon(1e-9));
      }
    }
    // A following zero-gradient step decays both moments.
    const AdamState after_one = st;
    adam_step(p, p.zeros_like(), st, cfg);
    for (std::size_t k = 0; k < p.count(); ++k) {
      for (std::size_t i = 0; i < p.tensor(k).size(); ++i) {
        CHECK(st.m.tensor(k).values[i] == doctest::Approx(cfg.beta1 * after_one.m.tensor(k).values[i]));
        CHECK(st.v.tensor(k).values[i] == doctest::Approx(cfg.beta2 * after_one.v.tensor(k).values[i]));
      }
    }
  }
  SUBCASE("deterministic") {
    GradientSet g = p.zeros_like();
    std::mt19937_64 rng(7);
    randomize(g, rng);
    ParamSet q = p;
    AdamState sq = AdamState::for_params(q);
    adam_step(p, g, st, cfg);
    adam_step(q, g, sq, cfg);
    CHECK(p == q);
  }
  SUBCASE("shape mismatch") {
    CHECK(error_of([&] { adam_step(p, init_params(toy(1, 2, 4), 0), st, cfg); }) == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("Adam overfits a single example") {
  const NetConfig c = toy();
  std::mt19937_64 rng(12);
  ParamSet p = init_params(c, 12);
  AdamState st = AdamState::for_params(p);
  AdamConfig cfg;
  cfg.lr = 1e-3;
  const Inputs in = random_inputs(c, 64, rng);
  const Signal eps = gaussian(1, 64, rng);
  std::vector<double> losses;
  for (int step = 0; step < 200; ++step) {
    ForwardContext ctx;
    const Signal pred = forward(in.z, 17, in.pos, in.audio, p, c, &ctx);
    losses.push_back(training_loss(eps, pred));
    adam_step(p, backward(ctx, training_loss_grad(eps, pred)), st, cfg);
  }
  CHECK(losses.back() < 0.5 * losses.front());
  const double head = std::accumulate(losses.begin(), losses.begin() + 20, 0.0);
  const double tail = std::accumulate(losses.end() - 20, losses.end(), 0.0);
  CHECK(tail < head);
}
