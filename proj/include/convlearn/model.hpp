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

// One-hidden-layer convolutional predictor
//
//   f(x; w, a) = sum_j a_j * sigma(w^T P_j x),
//
// with a single shared filter w of length r sliding over x with stride s.
// Patch indices are 0-based throughout: patch j reads input coordinates
// [j*s, j*s + r).
//
// For strides with s >= floor(r/2) + 1 ("large stride") every patch has a
// middle segment of length 2s - r that no other patch touches. It sits at
// filter coordinates [r - s, s) and input coordinates [j*s + r - s, (j+1)*s).
// Once s >= r patches are disjoint and the segment is the whole filter.

#ifndef CONVLEARN_MODEL_HPP_
#define CONVLEARN_MODEL_HPP_

#include <Eigen/Dense>

namespace convlearn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class PatchConfig {
 public:
  // Throws ConfigError unless all sizes are >= 1 and (k-1)*s + r <= d.
  PatchConfig(int d, int r, int s, int k);

  int d() const { return d_; }
  int r() const { return r_; }
  int s() const { return s_; }
  int k() const { return k_; }

  bool large_stride() const { return s_ >= r_ / 2 + 1; }

  // Length of the exclusive middle segment: 2s - r, or r once s >= r.
  // Requires large_stride().
  int nonoverlap_size() const;
  // First filter coordinate of the exclusive segment: max(0, r - s).
  int nonoverlap_offset() const { return r_ > s_ ? r_ - s_ : 0; }

  int patch_start(int j) const { return j * s_; }

  // Throws ConfigError naming the large-stride requirement.
  void require_large_stride() const;

  bool operator==(const PatchConfig&) const = default;

 private:
  int d_, r_, s_, k_;
};

// Leaky-linear activation: z for z >= 0, alpha * z otherwise.
class Activation {
 public:
  explicit Activation(double alpha);

  double alpha() const { return alpha_; }
  double operator()(double z) const { return z >= 0.0 ? z : alpha_ * z; }

  // 2 / (1 + alpha): rescales the half-gain the activation contributes
  // under a symmetric input law.
  double symmetric_gain_inverse() const { return 2.0 / (1.0 + alpha_); }

 private:
  double alpha_;
};

struct CnnParams {
  Vector w;  // filter, length r
  Vector a;  // output weights, length k
};

struct NonOverlapParams {
  Vector w_non;  // exclusive filter segment, length nonoverlap_size()
  Vector a;      // output weights, length k
};

struct GroundTruth {
  Vector w_star;
  Vector a_star;
  double sigma1;  // ||w*|| * ||a*||

  // Throws ArgumentError when the scale ||w*|| ||a*|| is not positive.
  static GroundTruth from_params(Vector w_star, Vector a_star);

  CnnParams params() const { return {w_star, a_star}; }
};

Vector patch_extract(const PatchConfig& cfg, const Vector& x, int j);

// r x k matrix whose column j is patch_extract(cfg, x, j).
Matrix patch_matrix(const PatchConfig& cfg, const Vector& x);

double activation_apply(const Activation& act, double z);

double forward(const PatchConfig& cfg, const Activation& act,
               const CnnParams& params, const Vector& x);

Vector nonoverlap_extract(const PatchConfig& cfg, const Vector& x, int j);

// Filter coordinates [r - s, s) of a full filter: the part of w that acts
// on the exclusive segment of every patch.
Vector nonoverlap_filter(const PatchConfig& cfg, const Vector& w);

double forward_nonoverlap(const PatchConfig& cfg, const Activation& act,
                          const NonOverlapParams& params, const Vector& x);

// Validation helpers shared by the learners.
void check_params(const PatchConfig& cfg, const CnnParams& params);
void check_params(const PatchConfig& cfg, const NonOverlapParams& params);
void check_input(const PatchConfig& cfg, const Vector& x);

}  // namespace convlearn

#endif  // CONVLEARN_MODEL_HPP_
