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

#include "convlearn/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "convlearn/errors.hpp"
#include "convlearn/rng.hpp"

namespace convlearn {

void PipelineConfig::validate() const {
  stage1.validate();
  stage2.validate();
  if (T3 < 1) throw ConfigError("pipeline: T3 must be >= 1");
  if (restarts < 1) throw ConfigError("pipeline: restarts must be >= 1");
  if (record_every < 1) throw ConfigError("pipeline: record_every must be >= 1");
  if (pilot_samples < 1) throw ConfigError("pipeline: pilot_samples must be >= 1");
}

double empirical_loss(const PatchConfig& cfg, const Activation& act, const CnnParams& params,
                      std::span<const Sample> samples) {
  if (samples.empty()) throw ArgumentError("empirical_loss: no samples");
  check_params(cfg, params);
  double total = 0.0;
  for (const Sample& s : samples) {
    const double r = s.y - forward(cfg, act, params, s.x);
    total += r * r;
  }
  return total / static_cast<double>(samples.size());
}

std::size_t select_hypothesis_index(const PatchConfig& cfg, const Activation& act,
                                    std::span<const CnnParams> candidates,
                                    std::span<const Sample> samples) {
  if (candidates.empty()) throw ArgumentError("select_hypothesis: no candidates");
  std::size_t best = 0;
  double best_loss = empirical_loss(cfg, act, candidates[0], samples);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double loss = empirical_loss(cfg, act, candidates[i], samples);
    if (loss < best_loss) {
      best = i;
      best_loss = loss;
    }
  }
  return best;
}

CnnParams select_hypothesis(const PatchConfig& cfg, const Activation& act,
                            std::span<const CnnParams> candidates,
                            std::span<const Sample> samples) {
  return candidates[select_hypothesis_index(cfg, act, candidates, samples)];
}

PipelineResult run_pipeline(const PatchConfig& cfg, const Activation& act,
                            const InputDistribution& dist, const GroundTruth& truth,
                            const PipelineConfig& config) {
  cfg.require_large_stride();
  config.validate();
  const std::uint64_t seed = config.seed;
  auto stream_for = [&](std::initializer_list<std::uint64_t> path) {
    return SampleStream(cfg, act, truth, dist, derive_stream(seed, path));
  };

  PipelineResult result;
  PipelineDiagnostics& diag = result.diagnostics;

  SampleStream pilot = stream_for({kStreamPilot});
  diag.sigma1_hat = estimate_sigma1(pilot, config.pilot_samples);
  if (!(diag.sigma1_hat > 0.0)) throw NumericError("pipeline: pilot labels are all zero");

  // Stage 1.
  Stage1Config s1 = config.stage1;
  s1.record_every = config.record_every;
  if (!s1.init_scale) s1.init_scale = std::sqrt(diag.sigma1_hat);
  diag.init_scale = *s1.init_scale;
  diag.eta1 = s1.eta1;
  SampleStream s1_samples = stream_for({kStreamStage1Samples});
  Rng s1_noise = derive_stream(seed, {kStreamStage1Noise});
  const Stage1Result stage1 = double_convotron(cfg, act, s1_samples, s1, s1_noise,
                                               Reference{truth.a_star});
  result.stage1_trajectory = stage1.trajectory;
  const double a_norm = stage1.params.a.norm();
  if (!(a_norm > 0.0)) throw NumericError("pipeline: stage 1 returned a zero output layer");
  const Vector a_hat = stage1.params.a / a_norm;

  // Stage 2: both signs, every restart.
  Stage2Config s2 = config.stage2;
  s2.record_every = config.record_every;
  if (!s2.eta2) s2.eta2 = default_eta2(cfg, dist.bound(), diag.sigma1_hat);
  diag.eta2 = *s2.eta2;
  if (!s2.divergence_bound) s2.divergence_bound = 1e3 * std::max(1.0, diag.sigma1_hat);
  const Reference filter_ref{truth.w_star * truth.a_star.norm()};
  for (int restart = 0; restart < config.restarts; ++restart) {
    for (int sign : {1, -1}) {
      SampleStream stream = stream_for(
          {kStreamStage2, static_cast<std::uint64_t>(restart), sign > 0 ? 0u : 1u});
      const Vector a_signed = static_cast<double>(sign) * a_hat;
      Stage2Result stage2 = convotron(cfg, act, a_signed, stream, s2, filter_ref);
      Candidate c;
      c.params = {std::move(stage2.w), a_signed};
      c.sign = sign;
      c.restart = restart;
      result.candidates.push_back(std::move(c));
      result.stage2_trajectories.push_back(std::move(stage2.trajectory));
    }
  }

  // Stage 3.
  SampleStream validation = stream_for({kStreamStage3});
  std::vector<Sample> holdout(static_cast<std::size_t>(config.T3));
  for (Sample& s : holdout) validation.next_into(s);
  std::size_t best = 0;
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    Candidate& c = result.candidates[i];
    c.loss = empirical_loss(cfg, act, c.params, holdout);
    if (c.loss < result.candidates[best].loss) best = i;
  }
  result.params = result.candidates[best].params;
  diag.chosen_index = static_cast<int>(best);
  diag.chosen_sign = result.candidates[best].sign;
  return result;
}

}  // namespace convlearn
