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

#include "convlearn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convlearn/errors.hpp"

namespace convlearn::oracle {

Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& point,
                        double h) {
  if (!(h > 0.0)) throw ArgumentError("finite difference step must be positive");
  Vector grad(point.size());
  Vector probe = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(point[i]));
    probe[i] = point[i] + step;
    const double up = f(probe);
    probe[i] = point[i] - step;
    const double down = f(probe);
    probe[i] = point[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite difference: non-finite evaluation along coordinate " +
                         std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

McEstimate monte_carlo_expectation(const std::function<Vector(Rng&)>& gen, std::size_t n,
                                   Rng& rng) {
  if (n < 2) throw ArgumentError("Monte Carlo estimate needs n >= 2");
  // Welford accumulation keeps the variance stable for large n.
  Vector mean, m2;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector v = gen(rng);
    if (i == 0) {
      mean = Vector::Zero(v.size());
      m2 = Vector::Zero(v.size());
    } else if (v.size() != mean.size()) {
      throw ArgumentError("Monte Carlo generator changed output length");
    }
    const Vector delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta.cwiseProduct(v - mean);
  }
  const double nn = static_cast<double>(n);
  Vector se = (m2 / (nn - 1.0)).cwiseMax(0.0).cwiseSqrt() / std::sqrt(nn);
  return {std::move(mean), std::move(se), n};
}

namespace {

void check_enumeration_dim(int d) {
  if (d < 1) throw ArgumentError("enumeration dimension must be >= 1");
  if (d > kMaxEnumerationDim) {
    throw UnsupportedError("Rademacher enumeration limited to d <= 20, got d = " +
                           std::to_string(d));
  }
}

// Visits every sign vector once. The vector passed to `visit` is reused.
template <typename Visit>
void for_each_sign_vector(int d, Visit&& visit) {
  Vector x(d);
  const unsigned long count = 1ul << d;
  for (unsigned long mask = 0; mask < count; ++mask) {
    for (int i = 0; i < d; ++i) x[i] = ((mask >> i) & 1ul) ? 1.0 : -1.0;
    visit(x);
  }
}

}  // namespace

double enumerate_rademacher(int d, const std::function<double(const Vector&)>& f) {
  check_enumeration_dim(d);
  double total = 0.0;
  for_each_sign_vector(d, [&](const Vector& x) { total += f(x); });
  return std::ldexp(total, -d);
}

Vector enumerate_rademacher_vector(int d, const std::function<Vector(const Vector&)>& f) {
  check_enumeration_dim(d);
  Vector total;
  bool first = true;
  for_each_sign_vector(d, [&](const Vector& x) {
    Vector v = f(x);
    if (first) {
      total = std::move(v);
      first = false;
    } else {
      if (v.size() != total.size()) {
        throw ArgumentError("enumerated function changed output length");
      }
      total += v;
    }
  });
  return total * std::ldexp(1.0, -d);
}

std::vector<std::vector<int>> patch_coverage(const PatchConfig& cfg) {
  std::vector<std::vector<int>> cover(cfg.d());
  for (int j = 0; j < cfg.k(); ++j) {
    for (int c = 0; c < cfg.r(); ++c) cover[j * cfg.s() + c].push_back(j);
  }
  return cover;
}

}  // namespace convlearn::oracle
