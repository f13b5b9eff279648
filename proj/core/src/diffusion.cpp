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

#include "binsynth/diffusion.hpp"

#include <cmath>
#include <limits>

#include "binsynth/error.hpp"

namespace binsynth {

namespace {

void check_shapes(const Signal& a, const Signal& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + " vs " +
                                       std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

NoiseSchedule NoiseSchedule::make(ScheduleKind kind, int steps, double beta_start,
                                  double beta_end) {
  if (steps < 1) fail(ErrorCode::BadRange, "schedule needs T >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    fail(ErrorCode::BadRange, "need 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  switch (kind) {
    case ScheduleKind::linear:
      for (int i = 0; i < steps; ++i) {
        betas[static_cast<std::size_t>(i)] =
            steps == 1 ? beta_start
                       : beta_start + (beta_end - beta_start) * i / static_cast<double>(steps - 1);
      }
      break;
  }
  return from_betas(std::move(betas));
}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
  if (betas.empty()) fail(ErrorCode::BadRange, "schedule needs at least one beta");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0 && betas[i] < 1.0)) {
      fail(ErrorCode::BadRange, "beta_" + std::to_string(i + 1) + " outside (0, 1)");
    }
    if (i > 0 && betas[i] < betas[i - 1]) {
      fail(ErrorCode::BadRange, "betas must be non-decreasing");
    }
  }
  NoiseSchedule s;
  s.betas_ = std::move(betas);
  s.alpha_bars_.resize(s.betas_.size() + 1);
  s.alpha_bars_[0] = 1.0;
  for (std::size_t i = 0; i < s.betas_.size(); ++i) {
    s.alpha_bars_[i + 1] = s.alpha_bars_[i] * (1.0 - s.betas_[i]);
  }
  return s;
}

void NoiseSchedule::check_step(int t) const {
  if (t < 1 || t > steps()) {
    fail(ErrorCode::StepOutOfRange, "t = " + std::to_string(t) + " outside [1, " +
                                        std::to_string(steps()) + "]");
  }
}

double NoiseSchedule::beta(int t) const {
  check_step(t);
  return betas_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha(int t) const { return 1.0 - beta(t); }

double NoiseSchedule::alpha_bar(int t) const {
  if (t != 0) check_step(t);
  return alpha_bars_[static_cast<std::size_t>(t)];
}

double NoiseSchedule::posterior_variance(int t) const {
  check_step(t);
  return (1.0 - alpha_bar(t - 1)) / (1.0 - alpha_bar(t)) * beta(t);
}

std::vector<int> align_schedules(const NoiseSchedule& train, const NoiseSchedule& infer) {
  std::vector<int> out;
  for (int s = 1; s <= infer.steps(); ++s) {
    const double target = infer.alpha_bar(s);
    int best = 1;
    double best_err = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= train.steps(); ++t) {
      const double err = std::abs(train.alpha_bar(t) - target);
      if (err < best_err) {
        best_err = err;
        best = t;
      }
    }
    out.push_back(best);
  }
  return out;
}

Signal forward_sample(const Signal& z0, int t, const Signal& eps, const NoiseSchedule& s) {
  check_shapes(z0, eps, "forward_sample");
  const double ab = s.alpha_bar(t);
  return std::sqrt(ab) * z0 + std::sqrt(1.0 - ab) * eps;
}

Signal recover_x0(const Signal& zt, int t, const Signal& eps, const NoiseSchedule& s) {
  check_shapes(zt, eps, "recover_x0");
  const double ab = s.alpha_bar(t);
  return (zt - std::sqrt(1.0 - ab) * eps) / std::sqrt(ab);
}

Signal posterior_mean(const Signal& zt, int t, const Signal& eps_pred, const NoiseSchedule& s) {
  check_shapes(zt, eps_pred, "posterior_mean");
  const double coef = s.beta(t) / std::sqrt(1.0 - s.alpha_bar(t));
  return (zt - coef * eps_pred) / std::sqrt(s.alpha(t));
}

Signal reverse_step(const Signal& zt, int t, const Signal& eps_pred, const NoiseSchedule& s,
                    const Signal& noise) {
  Signal mu = posterior_mean(zt, t, eps_pred, s);
  if (t == 1) return mu;
  check_shapes(zt, noise, "reverse_step");
  return mu + std::sqrt(s.posterior_variance(t)) * noise;
}

double training_loss(const Signal& eps, const Signal& eps_pred) {
  check_shapes(eps, eps_pred, "training_loss");
  if (eps.size() == 0) return 0.0;
  return (eps - eps_pred).squaredNorm() / static_cast<double>(eps.size());
}

Signal training_loss_grad(const Signal& eps, const Signal& eps_pred) {
  check_shapes(eps, eps_pred, "training_loss_grad");
  if (eps.size() == 0) return Signal(eps.rows(), eps.cols());
  return (2.0 / static_cast<double>(eps.size())) * (eps_pred - eps);
}

Signal gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Signal out(rows, cols);
  // Fill column by column so the draw order is independent of Eigen storage.
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = normal(rng);
  return out;
}

Signal sample(const Denoiser& denoiser, const NoiseSchedule& s, Eigen::Index rows,
              Eigen::Index cols, std::mt19937_64& rng) {
  Signal z = gaussian(rows, cols, rng);
  for (int t = s.steps(); t >= 1; --t) {
    const Signal eps = denoiser(z, t);
    if (eps.rows() != rows || eps.cols() != cols) {
      fail(ErrorCode::ShapeMismatch, "denoiser returned a prediction of the wrong shape");
    }
    if (t > 1) {
      z = reverse_step(z, t, eps, s, gaussian(rows, cols, rng));
    } else {
      z = posterior_mean(z, t, eps, s);
    }
  }
  return z;
}

}  // namespace binsynth
