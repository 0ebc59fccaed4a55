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

// Claim verifiers. Each suite checks one identity or bound numerically and
// reports one ClaimResult per claim with the worst value observed.

#ifndef CONVLEARN_VERIFY_HPP_
#define CONVLEARN_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace convlearn::verify {

struct ClaimResult {
  std::string suite;
  std::string claim;
  std::string anchor;  // the identity or bound being checked, in words
  double computed = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

nlohmann::json to_json(const ClaimResult& result);

// Stage-1 estimators are unbiased for the regularized factorization
// gradient, by exact enumeration.
struct UnbiasedOptions {
  int d = 7, r = 3, s = 2, k = 3;
  std::vector<double> alphas{0.0, 0.5, 1.0};
  int points = 20;
  double tolerance = 1e-9;
  std::uint64_t seed = 11;
};
std::vector<ClaimResult> run_unbiased(const UnbiasedOptions& opt = {});

// E[sigma(a.x)(b.x)] = (1+alpha)/2 E[(a.x)(b.x)] on the Rademacher cube.
struct SwitchOptions {
  int max_d = 12;
  int pairs = 50;
  int alpha_steps = 11;  // alpha on {0, 0.1, ..., 1}
  double tolerance = 1e-12;
  std::uint64_t seed = 12;
};
std::vector<ClaimResult> run_switch(const SwitchOptions& opt = {});

// Spectral sandwich of P^a for unit a, the banded closed form, and the
// tridiagonal Toeplitz spectrum.
struct EigenOptions {
  int k_max = 64;
  int samples = 100;
  double tolerance = 1e-9;
  std::uint64_t seed = 13;
};
std::vector<ClaimResult> run_eigen(const EigenOptions& opt = {});

// Gershgorin disks contain every eigenvalue.
struct GershgorinOptions {
  int matrices = 1000;
  double tolerance = 1e-12;
  std::uint64_t seed = 14;
};
std::vector<ClaimResult> run_gershgorin(const GershgorinOptions& opt = {});

// Pointwise and expectation forms of the squared-loss gap bound.
struct LossGapOptions {
  int draws = 100000;
  std::uint64_t seed = 15;
};
std::vector<ClaimResult> run_lossgap(const LossGapOptions& opt = {});

// Noise-injected descent on the regularized objective from random starts.
struct LandscapeOptions {
  int runs = 100;
  int dim = 5;  // r = k
  double sigma1 = 1.0;
  double eta = 0.01;
  long steps = 50000;
  double noise = 0.01;
  double loss_threshold = 1e-4;
  int min_successes = 95;
  std::uint64_t seed = 16;
};
std::vector<ClaimResult> run_landscape(const LandscapeOptions& opt = {});

// Per-k spectral extremes of P^a over random unit output layers, with the
// lower bound 1 - cos(pi/(k+1)).
struct EigenScanRow {
  int k = 0;
  double bound = 0.0;
  double worst_lambda_min = 0.0;
  double max_lambda_max = 0.0;
};
std::vector<EigenScanRow> eigen_scan(int k_max, int samples, int r, int s, std::uint64_t seed);

inline constexpr std::string_view kSuites[] = {"switch",     "unbiased", "eigen",
                                               "gershgorin", "lossgap",  "landscape"};

// Runs one suite by name, or every suite for "all". Throws ArgumentError
// for an unknown name.
std::vector<ClaimResult> run_suite(std::string_view name);

}  // namespace convlearn::verify

#endif  // CONVLEARN_VERIFY_HPP_
