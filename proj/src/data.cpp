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

#include "convlearn/data.hpp"

#include <algorithm>
#include <cmath>

#include "convlearn/errors.hpp"

namespace convlearn {

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kRademacher: return "rademacher";
    case DistributionKind::kUniformBox: return "uniform_box";
    case DistributionKind::kSphereScaled: return "sphere_scaled";
  }
  return "unknown";
}

DistributionKind parse_distribution_kind(std::string_view name) {
  if (name == "rademacher") return DistributionKind::kRademacher;
  if (name == "uniform_box") return DistributionKind::kUniformBox;
  if (name == "sphere_scaled") return DistributionKind::kSphereScaled;
  throw ConfigError("unknown distribution '" + std::string(name) +
                    "' (expected rademacher, uniform_box or sphere_scaled)");
}

double InputDistribution::bound() const {
  switch (kind) {
    case DistributionKind::kRademacher:
    case DistributionKind::kSphereScaled: return std::sqrt(static_cast<double>(d));
    case DistributionKind::kUniformBox: return std::sqrt(3.0 * d);
  }
  return 0.0;
}

namespace {

void fill_input(const InputDistribution& dist, Rng& rng, Vector& x) {
  x.resize(dist.d);
  switch (dist.kind) {
    case DistributionKind::kRademacher: {
      std::uint64_t bits = 0;
      for (int i = 0; i < dist.d; ++i) {
        if (i % 64 == 0) bits = rng();
        x[i] = (bits & 1u) ? 1.0 : -1.0;
        bits >>= 1;
      }
      return;
    }
    case DistributionKind::kUniformBox: {
      const double half = std::sqrt(3.0);
      std::uniform_real_distribution<double> unif(-half, half);
      for (int i = 0; i < dist.d; ++i) x[i] = unif(rng);
      break;
    }
    case DistributionKind::kSphereScaled: {
      x = random_unit_vector(dist.d, rng) * std::sqrt(static_cast<double>(dist.d));
      break;
    }
  }
  if (rng() & 1u) x = -x;
}

}  // namespace

Vector sample_input(const InputDistribution& dist, Rng& rng) {
  Vector x;
  fill_input(dist, rng, x);
  return x;
}

double label(const PatchConfig& cfg, const Activation& act, const GroundTruth& truth,
             const Vector& x) {
  return forward(cfg, act, {truth.w_star, truth.a_star}, x);
}

GroundTruth make_ground_truth(const PatchConfig& cfg, double sigma1, Rng& rng) {
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) {
    throw ArgumentError("sigma1 must be positive and finite");
  }
  const double radius = std::sqrt(sigma1);
  Vector w = random_unit_vector(cfg.r(), rng) * radius;
  Vector a = random_unit_vector(cfg.k(), rng) * radius;
  return GroundTruth::from_params(std::move(w), std::move(a));
}

DistributionReport distribution_self_check(const InputDistribution& dist, std::size_t n,
                                           Rng& rng) {
  if (n < 1) throw ArgumentError("self check needs n >= 1");
  const int d = dist.d;
  Vector sum = Vector::Zero(d);
  Matrix second = Matrix::Zero(d, d);
  DistributionReport report;
  Vector x;
  for (std::size_t i = 0; i < n; ++i) {
    fill_input(dist, rng, x);
    sum += x;
    second.selfadjointView<Eigen::Lower>().rankUpdate(x);
    report.max_norm = std::max(report.max_norm, x.norm());
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  report.max_mean_abs = (sum * inv_n).cwiseAbs().maxCoeff();
  Matrix cov = second.selfadjointView<Eigen::Lower>();
  cov *= inv_n;
  report.max_cov_dev = (cov - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  return report;
}

SampleStream::SampleStream(PatchConfig cfg, Activation act, GroundTruth truth,
                           InputDistribution dist, Rng rng)
    : cfg_(cfg), act_(act), truth_(std::move(truth)), dist_(dist), rng_(std::move(rng)) {
  if (dist_.d != cfg_.d()) {
    throw ConfigError("distribution dimension does not match patch config d");
  }
  check_params(cfg_, truth_.params());
}

Sample SampleStream::next() {
  Sample s;
  next_into(s);
  return s;
}

void SampleStream::next_into(Sample& out) {
  fill_input(dist_, rng_, out.x);
  double y = 0.0;
  for (int j = 0; j < cfg_.k(); ++j) {
    y += truth_.a_star[j] *
         act_(truth_.w_star.dot(out.x.segment(cfg_.patch_start(j), cfg_.r())));
  }
  out.y = y;
}

}  // namespace convlearn
