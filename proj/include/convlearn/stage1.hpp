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

// Double Convotron: joint recovery of the exclusive filter segment w_non and
// the output weights a, up to a common sign.
//
// Per fresh sample (x, y), with f^ = sum_j a_j sigma(w_non . x_j^non):
//
//   g = 2/(1+alpha) (f^ - y) sum_j a_j x_j^non      + 1/2 (|w_non|^2 - |a|^2) w_non
//   h = 2/(1+alpha) (f^ - y) (w_non . x_j^non)_j    + 1/2 (|a|^2 - |w_non|^2) a
//
//   w_non <- w_non - eta g + eta * noise_scale * xi_w
//   a     <- a     - eta h + eta * noise_scale * xi_a
//
// xi are uniform on unit spheres. Under a symmetric isotropic input law
// E[g], E[h] are exactly the gradient of
//   1/2 |w_non a^T - w*_non a*^T|_F^2 + 1/8 (|w_non|^2 - |a|^2)^2.

#ifndef CONVLEARN_STAGE1_HPP_
#define CONVLEARN_STAGE1_HPP_

#include <cstddef>
#include <optional>

#include "convlearn/data.hpp"
#include "convlearn/model.hpp"
#include "convlearn/rng.hpp"
#include "convlearn/trajectory.hpp"

namespace convlearn {

struct Stage1Config {
  long T1 = 1000000;
  double eta1 = 5e-5;
  // Radius of the spherical initialization. Unset: sqrt of the pilot
  // estimate of sigma1 (see estimate_sigma1).
  std::optional<double> init_scale;
  double noise_scale = 1.0;
  long record_every = 100;

  // Throws ConfigError.
  void validate() const;
};

struct Stage1Result {
  NonOverlapParams params;
  Trajectory trajectory;
  double init_scale = 0.0;
};

Vector grad_w_non(const PatchConfig& cfg, const Activation& act,
                  const NonOverlapParams& params, const Sample& sample);

Vector grad_a(const PatchConfig& cfg, const Activation& act, const NonOverlapParams& params,
              const Sample& sample);

Vector unit_sphere_noise(int dim, Rng& rng);

// sqrt(mean y^2) over n samples drawn from `stream`.
double estimate_sigma1(SampleStream& stream, std::size_t n = 1000);

// Runs T1 updates with one fresh sample from `stream` each; `rng` drives the
// initialization and the injected noise. `reference`, when given, is the
// true output layer a* and is used for the dist_plus/dist_minus columns of
// the normalized iterate only.
//
// Throws ConfigError without large stride, DivergedError once any norm
// exceeds 1e3 * init_scale or turns non-finite.
Stage1Result double_convotron(const PatchConfig& cfg, const Activation& act,
                              SampleStream& stream, const Stage1Config& config, Rng& rng,
                              const std::optional<Reference>& reference = std::nullopt);

// Same iteration from a caller-supplied starting point.
Stage1Result double_convotron_from(const PatchConfig& cfg, const Activation& act,
                                   SampleStream& stream, const Stage1Config& config, Rng& rng,
                                   NonOverlapParams start,
                                   const std::optional<Reference>& reference = std::nullopt);

}  // namespace convlearn

#endif  // CONVLEARN_STAGE1_HPP_
