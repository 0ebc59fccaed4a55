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

#ifndef CONVLEARN_DATA_HPP_
#define CONVLEARN_DATA_HPP_

#include <cstddef>
#include <string>
#include <string_view>

#include "convlearn/model.hpp"
#include "convlearn/rng.hpp"

namespace convlearn {

// Symmetric, isotropic, almost-surely bounded input laws.
//   Rademacher    x_i = +-1                      B = sqrt(d)
//   UniformBox    x_i ~ U[-sqrt(3), sqrt(3)]     B = sqrt(3d)
//   SphereScaled  uniform on radius-sqrt(d) sphere, B = sqrt(d)
enum class DistributionKind { kRademacher, kUniformBox, kSphereScaled };

std::string to_string(DistributionKind kind);
// Accepts "rademacher", "uniform_box", "sphere_scaled". Throws ConfigError.
DistributionKind parse_distribution_kind(std::string_view name);

struct InputDistribution {
  DistributionKind kind = DistributionKind::kRademacher;
  int d = 1;

  double bound() const;
};

struct Sample {
  Vector x;
  double y = 0.0;
};

// Continuous kinds multiply each draw by an independent fair sign, so the
// law is exactly symmetric rather than symmetric up to sampler bias.
Vector sample_input(const InputDistribution& dist, Rng& rng);

// Noiseless teacher label f(x; w*, a*).
double label(const PatchConfig& cfg, const Activation& act, const GroundTruth& truth,
             const Vector& x);

// w* uniform on the radius-sqrt(sigma1) sphere in R^r, a* likewise in R^k.
GroundTruth make_ground_truth(const PatchConfig& cfg, double sigma1, Rng& rng);

struct DistributionReport {
  double max_mean_abs = 0.0;
  double max_cov_dev = 0.0;
  double max_norm = 0.0;
};

DistributionReport distribution_self_check(const InputDistribution& dist, std::size_t n,
                                           Rng& rng);

// Fresh labelled samples from a teacher; owns its random state.
class SampleStream {
 public:
  SampleStream(PatchConfig cfg, Activation act, GroundTruth truth, InputDistribution dist,
               Rng rng);

  Sample next();
  // Overwrites `out` in place; avoids an allocation per draw.
  void next_into(Sample& out);

  const PatchConfig& config() const { return cfg_; }
  const Activation& activation() const { return act_; }
  const GroundTruth& truth() const { return truth_; }
  const InputDistribution& distribution() const { return dist_; }

 private:
  PatchConfig cfg_;
  Activation act_;
  GroundTruth truth_;
  InputDistribution dist_;
  Rng rng_;
};

}  // namespace convlearn

#endif  // CONVLEARN_DATA_HPP_
