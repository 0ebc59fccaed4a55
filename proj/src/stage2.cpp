// Copyright 2026 The convlearn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convlearn/stage2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convlearn/errors.hpp"

namespace convlearn {

void Stage2Config::validate() const {
  if (T2 < 1) throw ConfigError("stage2: T2 must be >= 1");
  if (eta2 && (!(*eta2 >= 0.0) || !std::isfinite(*eta2))) {
    throw ConfigError("stage2: eta2 must be >= 0");
  }
  if (divergence_bound && !(*divergence_bound > 0.0)) throw ConfigError("stage2: divergence_bound must be positive");
  if (record_every < 1) throw ConfigError("stage2: record_every must be >= 1");
}

double default_eta2(const PatchConfig& cfg, double bound_B, double sigma1_hat) {
  const double scale = std::max(1.0, sigma1_hat * sigma1_hat);
  return 1.0 / (4.0 * cfg.k() * bound_B * bound_B * scale);
}

namespace {

// Writes sum_i a_i P_i x into `dir` and returns y - f(w, a, x).
double residual_and_direction(const PatchConfig& cfg, const Activation& act, const Vector& w,
                              const Vector& a, const Sample& sample, Vector& dir) {
  dir.setZero(cfg.r());
  double f = 0.0;
  for (int i = 0; i < cfg.k(); ++i) {
    const auto patch = sample.x.segment(cfg.patch_start(i), cfg.r());
    f += a[i] * act(w.dot(patch));
    dir.noalias() += a[i] * patch;
  }
  return sample.y - f;
}

}  // namespace

Vector convotron_grad(const PatchConfig& cfg, const Activation& act, const Vector& w,
                      const Vector& a_fixed, const Sample& sample) {
  check_params(cfg, CnnParams{w, a_fixed});
  check_input(cfg, sample.x);
  Vector dir;
  const double residual = residual_and_direction(cfg, act, w, a_fixed, sample, dir);
  return residual * dir;
}

Stage2Result convotron(const PatchConfig& cfg, const Activation& act, const Vector& a_fixed,
                       SampleStream& stream, const Stage2Config& config,
                       const std::optional<Reference>& reference) {
  config.validate();
  if (a_fixed.size() != cfg.k()) throw ArgumentError("stage2: |a_fixed| must equal k");
  const double a_norm = a_fixed.norm();
  if (!(a_norm > 0.0) || !std::isfinite(a_norm)) {
    throw ArgumentError("stage2: output layer must be nonzero and finite");
  }
  if (!config.eta2) throw ConfigError("stage2: eta2 must be resolved before running");
  if (!(stream.config() == cfg)) throw ArgumentError("stage2: stream built for another config");
  if (reference && reference->target.size() != cfg.r()) {
    throw ArgumentError("stage2: reference must be a filter of length r");
  }

  const Vector a = a_fixed / a_norm;
  const double eta = *config.eta2;
  const double bound = config.divergence_bound.value_or(1e6);
  Stage2Result result;
  Vector w = Vector::Zero(cfg.r());
  Vector dir;
  Sample sample;
  double window_loss = 0.0;
  long window_count = 0;

  auto record = [&](long iter) {
    TrajectoryRecord rec;
    rec.iter = iter;
    rec.loss_estimate = window_count > 0 ? window_loss / static_cast<double>(window_count)
                                         : std::numeric_limits<double>::quiet_NaN();
    rec.norm_w = w.norm();
    rec.norm_a = 1.0;
    if (reference) {
      rec.dist_plus = (w - reference->target).norm();
      rec.dist_minus = (w + reference->target).norm();
    } else {
      rec.dist_plus = rec.dist_minus = std::numeric_limits<double>::quiet_NaN();
    }
    result.trajectory.push_back(rec);
    window_loss = 0.0;
    window_count = 0;
  };

  record(0);
  for (long t = 1; t <= config.T2; ++t) {
    stream.next_into(sample);
    const double residual = residual_and_direction(cfg, act, w, a, sample, dir);
    window_loss += residual * residual;
    ++window_count;
    w.noalias() += (eta * residual) * dir;
    const double wn = w.norm();
    if (!std::isfinite(wn) || wn > bound) throw DivergedError("stage2", t);
    if (t % config.record_every == 0 || t == config.T2) record(t);
  }
  result.w = std::move(w);
  return result;
}

}  // namespace convlearn
