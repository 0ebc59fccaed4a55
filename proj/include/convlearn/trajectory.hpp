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

#ifndef CONVLEARN_TRAJECTORY_HPP_
#define CONVLEARN_TRAJECTORY_HPP_

#include <optional>
#include <vector>

#include "convlearn/model.hpp"

namespace convlearn {

// One row of a learner trace. dist_plus / dist_minus are distances of the
// current iterate to +reference / -reference (NaN when no reference is
// attached); loss_estimate is the mean squared residual since the previous
// record.
struct TrajectoryRecord {
  long iter = 0;
  double loss_estimate = 0.0;
  double norm_w = 0.0;
  double norm_a = 0.0;
  double dist_plus = 0.0;
  double dist_minus = 0.0;
};

using Trajectory = std::vector<TrajectoryRecord>;

// Diagnostic target for a trace. The learners never read it for updates.
struct Reference {
  Vector target;
};

}  // namespace convlearn

#endif  // CONVLEARN_TRAJECTORY_HPP_
