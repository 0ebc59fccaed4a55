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

#include "convlearn/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convlearn/analysis.hpp"
#include "convlearn/errors.hpp"

namespace convlearn {

void Stage1Config::validate() const {
  if (T1 < 1) throw ConfigError("stage1: T1 must be >= 1");
  if (!(eta1 >= 0.0) || !std::isfinite(eta1)) throw ConfigError("stage1: eta1 must be >= 0");
  if (init_scale && !(*init_scale > 0.0 && std::isfinite(*init_scale))) {
    throw ConfigError("stage1: init_scale must be positive");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw ConfigError("stage1: noise_scale must be >= 0");
  }
  if (record_every < 1) throw ConfigError("stage1: record_every must be >= 1");
}

namespace {

// Workspace for one evaluation of (g, h); reused across iterations.
struct Stage1Workspace {
  Vector proj;      // w_non . x_j^non per patch
  Vector weighted;  // sum_j a_j x_j^non
  Vector g;
  Vector h;
};

// Fills ws.g and ws.h and returns the residual f^ - y.
double compute_gradients(const PatchConfig& cfg, const Activation& act,
                         const NonOverlapParams& p, const Sample& sample,
                         Stage1Workspace& ws) {
  const int k = cfg.k();
  const int m = static_cast<int>(p.w_non.size());
  const int off = cfg.nonoverlap_offset();
  ws.proj.resize(k);
  ws.weighted.setZero(m);
  double fhat = 0.0;
  for (int j = 0; j < k; ++j) {
    const auto seg = sample.x.segment(cfg.patch_start(j) + off, m);
    const double z = p.w_non.dot(seg);
    ws.proj[j] = z;
    fhat += p.a[j] * act(z);
    ws.weighted.noalias() += p.a[j] * seg;
  }
  const double residual = fhat - sample.y;
  const double scaled = act.symmetric_gain_inverse() * residual;
  const double imbalance = p.w_non.squaredNorm() - p.a.squaredNorm();
  ws.g = scaled * ws.weighted + analysis::kBalanceGain * imbalance * p.w_non;
  ws.h = scaled * ws.proj - analysis::kBalanceGain * imbalance * p.a;
  return residual;
}

void check_sample(const PatchConfig& cfg, const Sample& sample) { check_input(cfg, sample.x); }

double normalized_distance(const Vector& v, const Vector& target, double sign) {
  const double vn = v.norm();
  const double tn = target.norm();
  if (vn == 0.0 || tn == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (v / vn - sign * target / tn).norm();
}

}  // namespace

Vector grad_w_non(const PatchConfig& cfg, const Activation& act,
                  const NonOverlapParams& params, const Sample& sample) {
  cfg.require_large_stride();
  check_params(cfg, params);
  check_sample(cfg, sample);
  Stage1Workspace ws;
  compute_gradients(cfg, act, params, sample, ws);
  return ws.g;
}

Vector grad_a(const PatchConfig& cfg, const Activation& act, const NonOverlapParams& params,
              const Sample& sample) {
  cfg.require_large_stride();
  check_params(cfg, params);
  check_sample(cfg, sample);
  Stage1Workspace ws;
  compute_gradients(cfg, act, params, sample, ws);
  return ws.h;
}

Vector unit_sphere_noise(int dim, Rng& rng) {
  if (dim < 1) throw ArgumentError("unit_sphere_noise: dim must be >= 1");
  return random_unit_vector(dim, rng);
}

double estimate_sigma1(SampleStream& stream, std::size_t n) {
  if (n < 1) throw ArgumentError("estimate_sigma1: n must be >= 1");
  double sum = 0.0;
  Sample s;
  for (std::size_t i = 0; i < n; ++i) {
    stream.next_into(s);
    sum += s.y * s.y;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

Stage1Result double_convotron(const PatchConfig& cfg, const Activation& act,
                              SampleStream& stream, const Stage1Config& config, Rng& rng,
                              const std::optional<Reference>& reference) {
  cfg.require_large_stride();
  config.validate();
  Stage1Config resolved = config;
  if (!resolved.init_scale) {
    const double sigma_hat = estimate_sigma1(stream);
    if (!(sigma_hat > 0.0)) throw NumericError("stage1: pilot labels are all zero");
    resolved.init_scale = std::sqrt(sigma_hat);
  }
  const double radius = *resolved.init_scale;
  NonOverlapParams start{random_unit_vector(cfg.nonoverlap_size(), rng) * radius,
                         random_unit_vector(cfg.k(), rng) * radius};
  return double_convotron_from(cfg, act, stream, resolved, rng, std::move(start), reference);
}

Stage1Result double_convotron_from(const PatchConfig& cfg, const Activation& act,
                                   SampleStream& stream, const Stage1Config& config, Rng& rng,
                                   NonOverlapParams start,
                                   const std::optional<Reference>& reference) {
  cfg.require_large_stride();
  config.validate();
  check_params(cfg, start);
  if (!(stream.config() == cfg)) throw ArgumentError("stage1: stream built for another config");
  if (reference && reference->target.size() != cfg.k()) {
    throw ArgumentError("stage1: reference must be an output layer of length k");
  }

  const double scale =
      config.init_scale.value_or(std::max(start.w_non.norm(), start.a.norm()));
  const double limit = 1e3 * std::max(scale, std::numeric_limits<double>::min());
  const double eta = config.eta1;
  const double noise = eta * config.noise_scale;
  const int m = cfg.nonoverlap_size();

  Stage1Result result;
  result.init_scale = scale;
  NonOverlapParams p = std::move(start);
  Stage1Workspace ws;
  Sample sample;
  double window_loss = 0.0;
  long window_count = 0;

  auto record = [&](long iter) {
    TrajectoryRecord rec;
    rec.iter = iter;
    rec.loss_estimate = window_count > 0 ? window_loss / static_cast<double>(window_count)
                                         : std::numeric_limits<double>::quiet_NaN();
    rec.norm_w = p.w_non.norm();
    rec.norm_a = p.a.norm();
    if (reference) {
      rec.dist_plus = normalized_distance(p.a, reference->target, 1.0);
      rec.dist_minus = normalized_distance(p.a, reference->target, -1.0);
    } else {
      rec.dist_plus = rec.dist_minus = std::numeric_limits<double>::quiet_NaN();
    }
    result.trajectory.push_back(rec);
    window_loss = 0.0;
    window_count = 0;
  };

  record(0);
  for (long t = 1; t <= config.T1; ++t) {
    stream.next_into(sample);
    const double residual = compute_gradients(cfg, act, p, sample, ws);
    window_loss += residual * residual;
    ++window_count;
    p.w_non -= eta * ws.g;
    p.a -= eta * ws.h;
    if (noise != 0.0) {
      p.w_non += noise * random_unit_vector(m, rng);
      p.a += noise * random_unit_vector(cfg.k(), rng);
    }
    const double wn = p.w_non.norm();
    const double an = p.a.norm();
    if (!std::isfinite(wn) || !std::isfinite(an) || wn > limit || an > limit) {
      throw DivergedError("stage1", t);
    }
    if (t % config.record_every == 0 || t == config.T1) record(t);
  }
  result.params = std::move(p);
  return result;
}

}  // namespace convlearn
