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

// Experiment specs and multi-seed runs.
//
// An experiment is a flat INI file:
//
//   [model]    d r s k alpha
//   [data]     distribution sigma1
//   [stage1]   T1 eta1 init_scale noise_scale
//   [stage2]   T2 eta2
//   [stage3]   T3 restarts
//   [run]      name seeds seed_list record_every heldout mse_threshold
//              pilot_samples
//
// `init_scale` and `eta2` accept "auto". `seeds = N` means seeds 1..N;
// `seed_list` takes "1,2,7-9" and wins over `seeds`.

#ifndef CONVLEARN_EXPERIMENT_HPP_
#define CONVLEARN_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "convlearn/data.hpp"
#include "convlearn/model.hpp"
#include "convlearn/pipeline.hpp"

namespace convlearn {

// Per-seed teacher and held-out evaluation streams.
inline constexpr std::uint64_t kStreamTruth = 6;
inline constexpr std::uint64_t kStreamHeldout = 7;

struct ExperimentSpec {
  std::string name = "experiment";
  int d = 25, r = 3, s = 2, k = 12;
  double alpha = 0.0;
  DistributionKind distribution = DistributionKind::kRademacher;
  double sigma1 = 1.0;
  PipelineConfig pipeline;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  long heldout = 10000;
  double mse_threshold = 1e-2;

  PatchConfig patch_config() const;
  Activation activation() const;
  InputDistribution input_distribution() const;

  // Throws ConfigError, including for a stride below the large-stride
  // threshold.
  void validate() const;

  // Fully resolved INI text; parse_experiment(to_ini()) round-trips.
  std::string to_ini() const;
};

// Throws ConfigError with the offending line.
ExperimentSpec parse_experiment(std::string_view text);
ExperimentSpec load_experiment(const std::filesystem::path& path);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "diverged"
  std::string failed_stage;
  long failed_iteration = 0;
  double heldout_mse = 0.0;
  double a_error = 0.0;  // to the sign-matched unit teacher layer
  double w_error = 0.0;  // to the sign-matched w* ||a*||
  int chosen_sign = 0;
  bool sign_correct = false;
  double sigma1_hat = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::vector<double> candidate_losses;
  double seconds = 0.0;
};

struct SeedRun {
  SeedOutcome outcome;
  GroundTruth truth;
  PipelineResult result;  // empty when the run diverged
};

// Teacher from derive_stream(seed, {kStreamTruth}); pipeline seeded by
// `seed`; held-out MSE on `heldout` fresh samples.
SeedRun run_seed(const ExperimentSpec& spec, std::uint64_t seed);

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<SeedOutcome> outcomes;  // in spec.seeds order

  int completed() const;
  int mse_passes() const;
};

// Deterministic fields only; timings go to timings_json.
nlohmann::json summary_json(const ExperimentReport& report);
nlohmann::json timings_json(const ExperimentReport& report);

// Runs every seed on up to `jobs` threads and writes summary.json,
// timings.json, config.ini and stage{1,2}_seed{N}.csv into out_dir.
// A diverged seed is recorded and the run continues.
ExperimentReport run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                int jobs = 1);

}  // namespace convlearn

#endif  // CONVLEARN_EXPERIMENT_HPP_
