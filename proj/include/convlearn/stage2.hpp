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

// Convotron with a fixed output layer: starting from w = 0,
//
//   w <- w + eta (y - f(w, a, x)) sum_i a_i P_i x
//
// on fresh samples. The update direction is an ascent direction; under a
// symmetric isotropic law its mean is (1+alpha)/2 (Q w* - P^a w) with
// Q = sum_{ij} a*_i a_j P_j P_i^T, so the iteration contracts at a rate set
// by lambda_min(P^a).

#ifndef CONVLEARN_STAGE2_HPP_
#define CONVLEARN_STAGE2_HPP_

#include <optional>

#include "convlearn/data.hpp"
#include "convlearn/model.hpp"
#include "convlearn/trajectory.hpp"

namespace convlearn {

struct Stage2Config {
  long T2 = 50000;
  // Unset: default_eta2(cfg, dist bound, sigma1 estimate).
  std::optional<double> eta2;
  // Abort once ||w|| exceeds this. Unset: 1e6 standalone; the pipeline
  // uses 1e3 * max(1, sigma1_hat).
  std::optional<double> divergence_bound;
  long record_every = 100;

  void validate() const;
};

// 1 / (4 k B^2 max(1, sigma1_hat^2)).
double default_eta2(const PatchConfig& cfg, double bound_B, double sigma1_hat);

struct Stage2Result {
  Vector w;
  Trajectory trajectory;
};

Vector convotron_grad(const PatchConfig& cfg, const Activation& act, const Vector& w,
                      const Vector& a_fixed, const Sample& sample);

// a_fixed is rescaled to unit norm before use; the returned filter lives in
// that scale. `reference`, when given, is the target filter (w* ||a*||) for
// the dist_plus/dist_minus trace columns; norm_a is always 1.
//
// Throws ArgumentError for a zero output layer, ConfigError when eta2 is
// unset, DivergedError past config.divergence_bound.
Stage2Result convotron(const PatchConfig& cfg, const Activation& act, const Vector& a_fixed,
                       SampleStream& stream, const Stage2Config& config,
                       const std::optional<Reference>& reference = std::nullopt);

}  // namespace convlearn

#endif  // CONVLEARN_STAGE2_HPP_
