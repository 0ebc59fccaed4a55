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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "convlearn/data.hpp"
#include "convlearn/errors.hpp"
#include "convlearn/oracle.hpp"

using namespace convlearn;
using namespace convlearn::oracle;

TEST_CASE("finite differences: quadratic and constant") {
  const Vector g = finite_diff_grad([](const Vector& v) { return v.squaredNorm(); }, Vector{{1.0, 2.0}});
  CHECK(std::abs(g[0] - 2.0) <= 1e-6);
  CHECK(std::abs(g[1] - 4.0) <= 1e-6);
  const Vector z = finite_diff_grad([](const Vector&) { return 3.0; }, Vector{{1.0, -5.0, 2.0}});
  CHECK(z.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(finite_diff_grad([](const Vector&) { return 1.0; }, Vector{{1.0}}, 0.0),
                  ArgumentError);
  CHECK_THROWS_AS(
      finite_diff_grad([](const Vector& v) { return v[0] > 1.0 ? std::nan("") : v[0]; },
                       Vector{{1.0}}),
      NumericError);
}

TEST_CASE("finite differences are second order") {
  // f = x^3 + x y^2: truncation error of central differences is h^2 f'''/6.
  auto f = [](const Vector& v) { return v[0] * v[0] * v[0] + v[0] * v[1] * v[1]; };
  const Vector p{{0.7, -0.4}};
  const double exact = 3 * 0.49 + 0.16;
  const double e1 = std::abs(finite_diff_grad(f, p, 1e-2)[0] - exact);
  const double e2 = std::abs(finite_diff_grad(f, p, 1e-3)[0] - exact);
  CHECK(e1 == doctest::Approx(1e-4).epsilon(1e-6));  // h^2 * 6 / 6
  CHECK(e1 / e2 == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("Monte Carlo: constants and CLT band") {
  Rng rng = derive_stream(1, {3});
  const McEstimate c = monte_carlo_expectation([](Rng&) { return Vector{{2.5, -1.0}}; }, 100, rng);
  CHECK(c.mean == Vector{{2.5, -1.0}});
  CHECK(c.std_error.cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.n == 100);

  const McEstimate r = monte_carlo_expectation(
      [](Rng& g) { return Vector{{(g() & 1u) ? 1.0 : -1.0}}; }, 1000000, rng);
  CHECK(std::abs(r.mean[0]) <= 5.0 * r.std_error[0]);
  CHECK(r.std_error[0] == doctest::Approx(1e-3).epsilon(1e-3));
  CHECK_THROWS_AS(monte_carlo_expectation([](Rng&) { return Vector{{1.0}}; }, 1, rng),
                  ArgumentError);
}

TEST_CASE("Rademacher enumeration") {
  CHECK(enumerate_rademacher(3, [](const Vector& x) { return x[0]; }) == 0.0);
  CHECK(enumerate_rademacher(3, [](const Vector& x) { return x[0] * x[0]; }) == 1.0);
  CHECK(enumerate_rademacher(2, [](const Vector& x) {
          return std::max(0.0, x[0] + x[1]) * x[0];
        }) == 0.5);
  CHECK(enumerate_rademacher(4, [](const Vector& x) { return x[0] * x[1] * x[2] * x[3]; }) == 0.0);
  CHECK_THROWS_AS(enumerate_rademacher(21, [](const Vector&) { return 0.0; }), UnsupportedError);
  CHECK_THROWS_AS(enumerate_rademacher(0, [](const Vector&) { return 0.0; }), ArgumentError);
}

TEST_CASE("enumeration agrees with Monte Carlo") {
  const Vector a{{0.3, -1.2, 0.8, 0.5, -0.1}};
  auto f = [&](const Vector& x) {
    const double u = a.dot(x);
    return Vector{{std::max(0.0, u) * x[1], u * u * u, std::abs(u)}};
  };
  const Vector exact = enumerate_rademacher_vector(5, f);
  Rng rng = derive_stream(2, {3});
  const InputDistribution dist{DistributionKind::kRademacher, 5};
  const McEstimate est =
      monte_carlo_expectation([&](Rng& g) { return f(sample_input(dist, g)); }, 200000, rng);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(std::abs(est.mean[i] - exact[i]) <= 5.0 * est.std_error[i] + 1e-15);
  }
}

TEST_CASE("patch coverage") {
  const auto cover = patch_coverage(PatchConfig(7, 3, 2, 3));
  REQUIRE(cover.size() == 7);
  // 0-based: coordinate 2 is shared by patches 0 and 1, coordinate 3 is
  // only in patch 1, coordinate 6 is in patch 2.
  CHECK(cover[2] == std::vector<int>{0, 1});
  CHECK(cover[3] == std::vector<int>{1});
  CHECK(cover[1] == std::vector<int>{0});
  CHECK(cover[6] == std::vector<int>{2});

  const auto disjoint = patch_coverage(PatchConfig(12, 3, 3, 4));
  for (const auto& c : disjoint) CHECK(c.size() == 1);
  const auto gap = patch_coverage(PatchConfig(10, 2, 3, 3));
  CHECK(gap[2].empty());
  CHECK(gap[9].empty());

  for (int r = 1; r <= 16; ++r) {
    for (int s = r / 2 + 1; s <= r; ++s) {
      const PatchConfig cfg(5 * s + r, r, s, 6);
      for (const auto& c : patch_coverage(cfg)) CHECK(c.size() <= 2);
    }
  }
  // Small strides do put three patches on one coordinate.
  std::size_t most = 0;
  for (const auto& c : patch_coverage(PatchConfig(10, 5, 2, 3))) most = std::max(most, c.size());
  CHECK(most == 3);
}
