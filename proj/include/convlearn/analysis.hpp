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

// Closed-form objects behind the learners: the balanced rank-1
// factorization objective and its gradient, the weighted patch Gram matrix
// and its spectrum, and pointwise/expectation checks of the identities the
// learners rely on.

#ifndef CONVLEARN_ANALYSIS_HPP_
#define CONVLEARN_ANALYSIS_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "convlearn/data.hpp"
#include "convlearn/model.hpp"
#include "convlearn/rng.hpp"

namespace convlearn::analysis {

// Multiplies (||w||^2 - ||a||^2) w in the gradient of the balance term
// (1/8)(||w||^2 - ||a||^2)^2.
inline constexpr double kBalanceGain = 0.5;

// L(w, a) = 1/2 ||w a^T - w* a*^T||_F^2 + 1/8 (||w||^2 - ||a||^2)^2
double l_reg(const Vector& w, const Vector& a, const Vector& w_star, const Vector& a_star);

struct RegGradient {
  Vector grad_w;
  Vector grad_a;
};

RegGradient l_reg_grad(const Vector& w, const Vector& a, const Vector& w_star,
                       const Vector& a_star);

// ||w a^T - w* a*^T||_F^2, the population square loss of a linear CNN with
// disjoint patches under identity covariance.
double population_linear_loss(const Vector& w, const Vector& a, const Vector& w_star,
                              const Vector& a_star);

// P^a = sum_{i,j} a_i a_j P_i P_j^T, r x r.
struct WeightedPatchGram {
  Matrix matrix;
};

// Built by explicit summation; valid for any stride.
WeightedPatchGram weighted_patch_gram(const PatchConfig& cfg, const Vector& a);

// Banded form valid when only adjacent patches overlap: ||a||^2 on the
// diagonal, sum_i a_i a_{i+1} at offset +-s, zero elsewhere.
Matrix weighted_patch_gram_banded(const PatchConfig& cfg, const Vector& a);

// k x k tridiagonal Toeplitz matrix, 1 on the diagonal, -1/2 beside it.
Matrix tridiagonal_toeplitz(int k);

// Closed-form spectrum of tridiagonal_toeplitz(k), ascending:
// {1 - cos(i pi / (k+1)) : i = 1..k}.
std::vector<double> tridiagonal_toeplitz_spectrum(int k);

struct LambdaBounds {
  double lower_min;  // 1 - cos(pi / (k+1))
  double upper_max;  // 2
};

LambdaBounds toeplitz_lambda_bounds(int k);

struct Disk {
  double center;
  double radius;
};

// Throws ArgumentError on a non-square matrix.
std::vector<Disk> gershgorin_bounds(const Matrix& m);

bool gershgorin_contains(const std::vector<Disk>& disks, double lambda, double tol = 0.0);

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // columns match values
};

// Cyclic Jacobi rotations for dense symmetric matrices. Stops once the
// off-diagonal Frobenius mass falls to 1e-12 (relative to max(1, ||A||_F)).
// Throws NumericError if it has not converged after `max_sweeps`.
EigenDecomposition jacobi_eigen(const Matrix& symmetric, int max_sweeps = 100);

Vector jacobi_eigenvalues(const Matrix& symmetric);

// --- switch identity: E[sigma(a.x)(b.x)] = (1+alpha)/2 E[(a.x)(b.x)] ------

struct Enumerate {};
struct MonteCarlo {
  std::size_t n = 1000000;
  std::uint64_t seed = 0;
};
using SwitchMode = std::variant<Enumerate, MonteCarlo>;

struct SwitchCheck {
  double lhs;
  double rhs;
  double gap;
  double std_error;  // of lhs - rhs; 0 in enumerate mode
};

// Enumerate mode requires a Rademacher law with d <= 20 and throws
// UnsupportedError otherwise.
SwitchCheck switch_lemma_check(const InputDistribution& dist, const Vector& a,
                               const Vector& b, double alpha, const SwitchMode& mode);

// --- squared-loss gap ----------------------------------------------------

struct LossGap {
  double lhs;            // (f(w*, a*, x) - f(w, a, x))^2
  double rhs_pointwise;  // 2k (||a||^2 ||w-w*||^2 + ||a-a*||^2 ||w*||^2) ||x||^2
};

LossGap loss_gap_bound_check(const PatchConfig& cfg, const Activation& act,
                             const CnnParams& params, const GroundTruth& truth,
                             const Vector& x);

// Bracket 2k (||a||^2 ||w-w*||^2 + ||a-a*||^2 ||w*||^2) shared by both forms.
double loss_gap_bracket(const PatchConfig& cfg, const CnnParams& params,
                        const GroundTruth& truth);

// --- linear-CNN stochastic gradient oracle --------------------------------

// For f = w^T P(x) a:
//   g_w = (f - y) P(x) a   + 1/2 (||w||^2 - ||a||^2) w
//   g_a = (f - y) P(x)^T w + 1/2 (||a||^2 - ||w||^2) a
RegGradient sg_oracle_linear(const PatchConfig& cfg, const Vector& w, const Vector& a,
                             const Sample& sample);

// Noise-injected gradient descent on l_reg with the exact gradient:
//   w <- w - eta dL/dw + eta * noise * xi_w    (xi uniform on the unit sphere)
// Returns l_reg at the final iterate. Throws DivergedError if a norm leaves
// 1e3 * max(1, ||w0||, ||a0||, sqrt(||w*|| ||a*||)).
double landscape_descent(const Vector& w0, const Vector& a0, const Vector& w_star,
                         const Vector& a_star, double eta, long steps, double noise,
                         Rng& rng);

}  // namespace convlearn::analysis

#endif  // CONVLEARN_ANALYSIS_HPP_
