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

#ifndef CONVLEARN_RNG_HPP_
#define CONVLEARN_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace convlearn {

using Rng = std::mt19937_64;

// Independent stream keyed by a master seed and a path of stream tags,
// e.g. derive_stream(seed, {kStage2, restart, sign}).
inline Rng derive_stream(std::uint64_t master,
                         std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(master);
  for (std::uint64_t tag : path) push(tag);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Uniform draw on the unit sphere S^{dim-1}; dim = 1 yields +-1.
inline Eigen::VectorXd random_unit_vector(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
    norm = v.norm();
  } while (norm == 0.0);
  v /= norm;
  return v;
}

}  // namespace convlearn

#endif  // CONVLEARN_RNG_HPP_
