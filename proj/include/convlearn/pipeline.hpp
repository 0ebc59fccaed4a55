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

// Three-stage learner:
//   1. Double Convotron recovers the output layer up to sign.
//   2. Convotron recovers the filter for +a_hat and -a_hat (per restart).
//   3. The candidate with the lowest empirical loss on fresh samples wins.
//
// Every stage reads its own stream derived from the master seed, so a
// (seed, config) pair determines the result bit for bit.

#ifndef CONVLEARN_PIPELINE_HPP_
#define CONVLEARN_PIPELINE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "convlearn/data.hpp"
#include "convlearn/model.hpp"
#include "convlearn/stage1.hpp"
#include "convlearn/stage2.hpp"
#include "convlearn/trajectory.hpp"

namespace convlearn {

// Stream tags for derive_stream(seed, {tag, ...}).
enum StreamTag : std::uint64_t {
  kStreamPilot = 1,
  kStreamStage1Samples = 2,
  kStreamStage1Noise = 3,
  kStreamStage2 = 4,
  kStreamStage3 = 5,
};

struct PipelineConfig {
  Stage1Config stage1;
  Stage2Config stage2;
  long T3 = 10000;
  int restarts = 3;
  std::uint64_t seed = 1;
  long record_every = 100;
  std::size_t pilot_samples = 1000;

  void validate() const;
};

struct Candidate {
  CnnParams params;
  double loss = 0.0;
  int sign = 1;  // +1 for a_hat, -1 for -a_hat
  int restart = 0;
};

struct PipelineDiagnostics {
  double sigma1_hat = 0.0;
  double init_scale = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  int chosen_sign = 1;
  int chosen_index = 0;
};

struct PipelineResult {
  CnnParams params;  // output layer has unit norm
  std::vector<Candidate> candidates;
  Trajectory stage1_trajectory;
  std::vector<Trajectory> stage2_trajectories;  // parallel to candidates
  PipelineDiagnostics diagnostics;
};

// Mean squared residual. Throws ArgumentError on an empty sample list.
double empirical_loss(const PatchConfig& cfg, const Activation& act, const CnnParams& params,
                      std::span<const Sample> samples);

// Index of the lowest-loss candidate; ties go to the lowest index.
std::size_t select_hypothesis_index(const PatchConfig& cfg, const Activation& act,
                                    std::span<const CnnParams> candidates,
                                    std::span<const Sample> samples);

CnnParams select_hypothesis(const PatchConfig& cfg, const Activation& act,
                            std::span<const CnnParams> candidates,
                            std::span<const Sample> samples);

// The teacher generates labels and, for traces only, reference distances.
// DivergedError from a stage propagates with the stage name attached.
PipelineResult run_pipeline(const PatchConfig& cfg, const Activation& act,
                            const InputDistribution& dist, const GroundTruth& truth,
                            const PipelineConfig& config);

}  // namespace convlearn

#endif  // CONVLEARN_PIPELINE_HPP_
