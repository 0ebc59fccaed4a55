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

#include "convlearn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "convlearn/errors.hpp"
#include "convlearn/oracle.hpp"

namespace convlearn::analysis {

namespace {

void check_same_size(const Vector& u, const Vector& v, const char* what) {
  if (u.size() != v.size()) throw ArgumentError(std::string(what) + ": length mismatch");
}

Vector unit_noise(Eigen::Index dim, Rng& rng) { return random_unit_vector(dim, rng); }

}  // namespace

double l_reg(const Vector& w, const Vector& a, const Vector& w_star, const Vector& a_star) {
  check_same_size(w, w_star, "l_reg w");
  check_same_size(a, a_star, "l_reg a");
  const double fit = (w * a.transpose() - w_star * a_star.transpose()).squaredNorm();
  const double imbalance = w.squaredNorm() - a.squaredNorm();
  return 0.5 * fit + 0.125 * imbalance * imbalance;
}

RegGradient l_reg_grad(const Vector& w, const Vector& a, const Vector& w_star,
                       const Vector& a_star) {
  check_same_size(w, w_star, "l_reg_grad w");
  check_same_size(a, a_star, "l_reg_grad a");
  const double ww = w.squaredNorm();
  const double aa = a.squaredNorm();
  const double imbalance = ww - aa;
  RegGradient g;
  g.grad_w = aa * w - a.dot(a_star) * w_star + kBalanceGain * imbalance * w;
  g.grad_a = ww * a - w.dot(w_star) * a_star - kBalanceGain * imbalance * a;
  return g;
}

double population_linear_loss(const Vector& w, const Vector& a, const Vector& w_star,
                              const Vector& a_star) {
  check_same_size(w, w_star, "population_linear_loss w");
  check_same_size(a, a_star, "population_linear_loss a");
  return (w * a.transpose() - w_star * a_star.transpose()).squaredNorm();
}

WeightedPatchGram weighted_patch_gram(const PatchConfig& cfg, const Vector& a) {
  if (a.size() != cfg.k()) throw ArgumentError("weighted_patch_gram: |a| must equal k");
  const int r = cfg.r();
  Matrix gram = Matrix::Zero(r, r);
  // P_i P_j^T has ones where filter coordinate p of patch i and coordinate q
  // of patch j read the same input: i*s + p == j*s + q.
  for (int i = 0; i < cfg.k(); ++i) {
    for (int j = 0; j < cfg.k(); ++j) {
      const int shift = (j - i) * cfg.s();  // p - q
      if (std::abs(shift) >= r) continue;
      const double weight = a[i] * a[j];
      for (int q = 0; q < r; ++q) {
        const int p = q + shift;
        if (p >= 0 && p < r) gram(p, q) += weight;
      }
    }
  }
  return {std::move(gram)};
}

Matrix weighted_patch_gram_banded(const PatchConfig& cfg, const Vector& a) {
  if (a.size() != cfg.k()) throw ArgumentError("weighted_patch_gram_banded: |a| must equal k");
  const int r = cfg.r();
  double neighbour = 0.0;
  for (int i = 0; i + 1 < cfg.k(); ++i) neighbour += a[i] * a[i + 1];
  Matrix m = Matrix::Identity(r, r) * a.squaredNorm();
  for (int i = 0; i + cfg.s() < r; ++i) {
    m(i, i + cfg.s()) = neighbour;
    m(i + cfg.s(), i) = neighbour;
  }
  return m;
}

Matrix tridiagonal_toeplitz(int k) {
  if (k < 1) throw ArgumentError("tridiagonal_toeplitz: k must be >= 1");
  Matrix m = Matrix::Identity(k, k);
  for (int i = 0; i + 1 < k; ++i) {
    m(i, i + 1) = -0.5;
    m(i + 1, i) = -0.5;
  }
  return m;
}

std::vector<double> tridiagonal_toeplitz_spectrum(int k) {
  if (k < 1) throw ArgumentError("tridiagonal_toeplitz_spectrum: k must be >= 1");
  std::vector<double> values(k);
  for (int i = 1; i <= k; ++i) {
    values[i - 1] = 1.0 - std::cos(i * std::numbers::pi / (k + 1));
  }
  return values;
}

LambdaBounds toeplitz_lambda_bounds(int k) {
  if (k < 1) throw ArgumentError("toeplitz_lambda_bounds: k must be >= 1");
  return {1.0 - std::cos(std::numbers::pi / (k + 1)), 2.0};
}

std::vector<Disk> gershgorin_bounds(const Matrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("gershgorin_bounds: matrix must be square");
  std::vector<Disk> disks;
  disks.reserve(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double radius = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    disks.push_back({m(i, i), std::max(0.0, radius)});
  }
  return disks;
}

bool gershgorin_contains(const std::vector<Disk>& disks, double lambda, double tol) {
  return std::any_of(disks.begin(), disks.end(), [&](const Disk& disk) {
    return std::abs(lambda - disk.center) <= disk.radius + tol;
  });
}

EigenDecomposition jacobi_eigen(const Matrix& symmetric, int max_sweeps) {
  if (symmetric.rows() != symmetric.cols()) {
    throw ArgumentError("jacobi_eigen: matrix must be square");
  }
  const Eigen::Index n = symmetric.rows();
  Matrix a = 0.5 * (symmetric + symmetric.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double tol = 1e-12 * std::max(1.0, a.norm());

  auto off_diagonal = [&a, n] {
    double sum = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) sum += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(sum);
  };

  int sweep = 0;
  while (off_diagonal() > tol) {
    if (++sweep > max_sweeps) throw NumericError("jacobi_eigen: no convergence");
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            a(r, p) = a(p, r) = c * arp - s * arq;
            a(r, q) = a(q, r) = s * arp + c * arq;
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

Vector jacobi_eigenvalues(const Matrix& symmetric) { return jacobi_eigen(symmetric).values; }

SwitchCheck switch_lemma_check(const InputDistribution& dist, const Vector& a,
                               const Vector& b, double alpha, const SwitchMode& mode) {
  if (a.size() != dist.d || b.size() != dist.d) {
    throw ArgumentError("switch_lemma_check: a and b must have length d");
  }
  const Activation act(alpha);
  const double half_gain = 0.5 * (1.0 + alpha);

  if (std::holds_alternative<Enumerate>(mode)) {
    if (dist.kind != DistributionKind::kRademacher) {
      throw UnsupportedError("switch_lemma_check: enumeration needs a Rademacher law");
    }
    const Vector both = oracle::enumerate_rademacher_vector(dist.d, [&](const Vector& x) {
      const double u = a.dot(x);
      const double v = b.dot(x);
      return Vector{{act(u) * v, u * v}};
    });
    const double lhs = both[0];
    const double rhs = half_gain * both[1];
    return {lhs, rhs, std::abs(lhs - rhs), 0.0};
  }

  const auto& mc = std::get<MonteCarlo>(mode);
  Rng rng = derive_stream(mc.seed, {0x5157u});
  const oracle::McEstimate est = oracle::monte_carlo_expectation(
      [&](Rng& g) {
        const Vector x = sample_input(dist, g);
        const double u = a.dot(x);
        const double v = b.dot(x);
        const double lhs = act(u) * v;
        const double rhs = half_gain * u * v;
        return Vector{{lhs, rhs, lhs - rhs}};
      },
      mc.n, rng);
  return {est.mean[0], est.mean[1], std::abs(est.mean[2]), est.std_error[2]};
}

double loss_gap_bracket(const PatchConfig& cfg, const CnnParams& params,
                        const GroundTruth& truth) {
  check_params(cfg, params);
  return 2.0 * cfg.k() *
         (params.a.squaredNorm() * (params.w - truth.w_star).squaredNorm() +
          (params.a - truth.a_star).squaredNorm() * truth.w_star.squaredNorm());
}

LossGap loss_gap_bound_check(const PatchConfig& cfg, const Activation& act,
                             const CnnParams& params, const GroundTruth& truth,
                             const Vector& x) {
  const double diff = forward(cfg, act, truth.params(), x) - forward(cfg, act, params, x);
  return {diff * diff, loss_gap_bracket(cfg, params, truth) * x.squaredNorm()};
}

RegGradient sg_oracle_linear(const PatchConfig& cfg, const Vector& w, const Vector& a,
                             const Sample& sample) {
  check_params(cfg, CnnParams{w, a});
  const Matrix p = patch_matrix(cfg, sample.x);
  const double residual = w.dot(p * a) - sample.y;
  const double imbalance = w.squaredNorm() - a.squaredNorm();
  return {residual * (p * a) + kBalanceGain * imbalance * w,
          residual * (p.transpose() * w) - kBalanceGain * imbalance * a};
}

double landscape_descent(const Vector& w0, const Vector& a0, const Vector& w_star,
                         const Vector& a_star, double eta, long steps, double noise,
                         Rng& rng) {
  if (!(eta > 0.0)) throw ArgumentError("landscape_descent: eta must be positive");
  if (steps < 0) throw ArgumentError("landscape_descent: steps must be >= 0");
  check_same_size(w0, w_star, "landscape_descent w");
  check_same_size(a0, a_star, "landscape_descent a");
  const double limit =
      1e3 * std::max({1.0, w0.norm(), a0.norm(), std::sqrt(w_star.norm() * a_star.norm())});
  Vector w = w0;
  Vector a = a0;
  for (long t = 0; t < steps; ++t) {
    const RegGradient g = l_reg_grad(w, a, w_star, a_star);
    w -= eta * g.grad_w;
    a -= eta * g.grad_a;
    if (noise != 0.0) {
      w += (eta * noise) * unit_noise(w.size(), rng);
      a += (eta * noise) * unit_noise(a.size(), rng);
    }
    const double wn = w.norm();
    const double an = a.norm();
    if (!std::isfinite(wn) || !std::isfinite(an) || wn > limit || an > limit) {
      throw DivergedError("landscape_descent", t + 1);
    }
  }
  return l_reg(w, a, w_star, a_star);
}

}  // namespace convlearn::analysis
