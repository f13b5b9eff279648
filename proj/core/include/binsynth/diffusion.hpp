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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace binsynth {

/// Data, latents and noise all share this channels x samples layout.
using Signal = Eigen::MatrixXd;

enum class ScheduleKind { linear };

/// Variance schedule with 1-based step indexing; alpha_bar(0) is defined as 1
/// so the last reverse step is deterministic.
class NoiseSchedule {
 public:
  static NoiseSchedule make(ScheduleKind kind, int steps, double beta_start, double beta_end);
  /// Arbitrary non-decreasing betas in (0, 1), e.g. a short inference grid.
  static NoiseSchedule from_betas(std::vector<double> betas);

  int steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const;
  double alpha(int t) const;
  double alpha_bar(int t) const;  // t in [0, T]

  const std::vector<double>& betas() const { return betas_; }

  /// sigma_t^2 = (1 - abar_{t-1}) / (1 - abar_t) * beta_t.
  double posterior_variance(int t) const;

 private:
  void check_step(int t) const;

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;  // index 0 holds abar_0 = 1
};

/// Training-step index whose alpha_bar is nearest to each inference step's
/// alpha_bar (ties go to the smaller index).
std::vector<int> align_schedules(const NoiseSchedule& train, const NoiseSchedule& infer);

/// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps.
Signal forward_sample(const Signal& z0, int t, const Signal& eps, const NoiseSchedule& s);

/// Algebraic inverse of forward_sample.
Signal recover_x0(const Signal& zt, int t, const Signal& eps, const NoiseSchedule& s);

/// mu = (z_t - beta_t / sqrt(1 - abar_t) * eps_pred) / sqrt(alpha_t).
Signal posterior_mean(const Signal& zt, int t, const Signal& eps_pred, const NoiseSchedule& s);

/// z_{t-1} = mu + sigma_t * noise; noise is ignored at t = 1.
Signal reverse_step(const Signal& zt, int t, const Signal& eps_pred, const NoiseSchedule& s,
                    const Signal& noise);

/// Element mean of (eps - eps_pred)^2.
double training_loss(const Signal& eps, const Signal& eps_pred);

/// d(training_loss)/d(eps_pred).
Signal training_loss_grad(const Signal& eps, const Signal& eps_pred);

/// Standard normal draw of the given shape.
Signal gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

/// Maps (z_t, t) to a noise prediction of the same shape.
using Denoiser = std::function<Signal(const Signal& zt, int t)>;

/// Ancestral sampling from N(0, I) through t = T..1 of `s`.
Signal sample(const Denoiser& denoiser, const NoiseSchedule& s, Eigen::Index rows,
              Eigen::Index cols, std::mt19937_64& rng);

}  // namespace binsynth
