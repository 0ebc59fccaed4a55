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

// Independent reference machinery: numeric derivatives, Monte-Carlo means
// with error bars, exact expectations over the Rademacher cube, and the
// brute-force patch coverage map. Nothing here depends on the learners.

#ifndef CONVLEARN_ORACLE_HPP_
#define CONVLEARN_ORACLE_HPP_

#include <cstddef>
#include <functional>
#include <vector>

#include "convlearn/model.hpp"
#include "convlearn/rng.hpp"

namespace convlearn::oracle {

inline constexpr int kMaxEnumerationDim = 20;

// Central differences. The step along coordinate i is h * max(1, |p_i|).
// Throws NumericError if f is non-finite at any probe.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& point,
                        double h = 1e-6);

struct McEstimate {
  Vector mean;
  Vector std_error;  // sample std / sqrt(n)
  std::size_t n = 0;
};

McEstimate monte_carlo_expectation(const std::function<Vector(Rng&)>& gen, std::size_t n,
                                   Rng& rng);

// 2^-d * sum of f over {-1, +1}^d. Throws UnsupportedError for d > 20.
double enumerate_rademacher(int d, const std::function<double(const Vector&)>& f);

// Vector-valued variant; every call of f must return the same length.
Vector enumerate_rademacher_vector(int d, const std::function<Vector(const Vector&)>& f);

// For each input coordinate, the 0-based indices of the patches covering it.
std::vector<std::vector<int>> patch_coverage(const PatchConfig& cfg);

}  // namespace convlearn::oracle

#endif  // CONVLEARN_ORACLE_HPP_
