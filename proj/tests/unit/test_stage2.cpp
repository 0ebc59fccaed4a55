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
#include <random>

#include "convlearn/analysis.hpp"
#include "convlearn/data.hpp"
#include "convlearn/errors.hpp"
#include "convlearn/oracle.hpp"
#include "convlearn/stage2.hpp"

using namespace convlearn;

namespace {

Vector normal_vector(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// sum_{i,j} a_i b_j P_i P_j^T with P_i the r x d selector of patch i.
Matrix cross_gram(const PatchConfig& cfg, const Vector& a, const Vector& b) {
  Matrix m = Matrix::Zero(cfg.r(), cfg.r());
  for (int i = 0; i < cfg.k(); ++i) {
    for (int j = 0; j < cfg.k(); ++j) {
      for (int p = 0; p < cfg.r(); ++p) {
        const int q = cfg.patch_start(i) + p - cfg.patch_start(j);
        if (q >= 0 && q < cfg.r()) m(p, q) += a[i] * b[j];
      }
    }
  }
  return m;
}

Stage2Config fixed_step(long T2, double eta) {
  Stage2Config c;
  c.T2 = T2;
  c.eta2 = eta;
  return c;
}

}  // namespace

TEST_CASE("convotron step examples") {
  const PatchConfig one(1, 1, 1, 1);
  const Activation lin(1.0);
  const Vector g = convotron_grad(one, lin, Vector{{0.0}}, Vector{{1.0}}, {Vector{{2.0}}, 2.0});
  CHECK(g[0] == 4.0);

  const PatchConfig cfg(25, 3, 2, 12);
  Rng rng = derive_stream(1, {20});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  for (double alpha : {0.0, 0.5, 1.0}) {
    const Activation act(alpha);
    SampleStream stream(cfg, act, truth, {DistributionKind::kUniformBox, 25}, derive_stream(1, {21}));
    for (int i = 0; i < 200; ++i) {
      CHECK(convotron_grad(cfg, act, truth.w_star, truth.a_star, stream.next()).norm() == 0.0);
    }
  }
  CHECK_THROWS_AS(convotron_grad(cfg, lin, Vector::Zero(2), truth.a_star, {Vector::Zero(25), 0.0}),
                  ArgumentError);
  CHECK_THROWS_AS(convotron_grad(cfg, lin, truth.w_star, Vector::Zero(11), {Vector::Zero(25), 0.0}),
                  ArgumentError);
}

TEST_CASE("mean step is (1+alpha)/2 (Q w* - P^a w)") {
  const PatchConfig cfg(9, 3, 2, 4);
  Rng rng = derive_stream(2, {20});
  for (double alpha : {0.0, 0.3, 1.0}) {
    const Activation act(alpha);
    for (int t = 0; t < 5; ++t) {
      const GroundTruth truth = GroundTruth::from_params(normal_vector(3, rng), normal_vector(4, rng));
      const Vector w = normal_vector(3, rng);
      const Vector a = random_unit_vector(4, rng);
      const Vector mean = oracle::enumerate_rademacher_vector(9, [&](const Vector& x) {
        return convotron_grad(cfg, act, w, a, {x, label(cfg, act, truth, x)});
      });
      const Vector expected = 0.5 * (1.0 + alpha) *
                              (cross_gram(cfg, a, truth.a_star) * truth.w_star -
                               analysis::weighted_patch_gram(cfg, a).matrix * w);
      CHECK((mean - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  // Exact outer layer, linear: P^{a*} (w* - w); with k = 1 this is w* - w.
  const PatchConfig single(3, 3, 1, 1);
  const Activation lin(1.0);
  const GroundTruth truth = GroundTruth::from_params(Vector{{0.5, -1.0, 2.0}}, Vector{{1.0}});
  const Vector w{{0.1, 0.2, 0.3}};
  const Vector mean = oracle::enumerate_rademacher_vector(3, [&](const Vector& x) {
    return convotron_grad(single, lin, w, truth.a_star, {x, label(single, lin, truth, x)});
  });
  CHECK((mean - (truth.w_star - w)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Monte Carlo agrees on a continuous law") {
  const PatchConfig cfg(25, 3, 2, 12);
  const Activation act(0.0);
  Rng rng = derive_stream(3, {20});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  const Vector w = normal_vector(3, rng);
  const Vector a = random_unit_vector(12, rng);
  SampleStream stream(cfg, act, truth, {DistributionKind::kSphereScaled, 25}, derive_stream(3, {21}));
  const oracle::McEstimate est = oracle::monte_carlo_expectation(
      [&](Rng&) { return convotron_grad(cfg, act, w, a, stream.next()); }, 400000, rng);
  // Sphere coordinates are uncorrelated with unit variance, as on the cube.
  const Vector expected = 0.5 * (cross_gram(cfg, a, truth.a_star) * truth.w_star -
                                 analysis::weighted_patch_gram(cfg, a).matrix * w);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(est.mean[i] - expected[i]) <= 5.0 * est.std_error[i]);
}

TEST_CASE("zero step returns the zero filter") {
  const PatchConfig cfg(7, 3, 2, 3);
  const Activation act(0.0);
  Rng rng = derive_stream(4, {20});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  SampleStream stream(cfg, act, truth, {DistributionKind::kRademacher, 7}, derive_stream(4, {21}));
  const Stage2Result r = convotron(cfg, act, truth.a_star, stream, fixed_step(1000, 0.0));
  CHECK(r.w == Vector::Zero(3));
  CHECK(r.trajectory.size() == 11);
  CHECK(r.trajectory.front().norm_w == 0.0);
}

TEST_CASE("recovers the filter at eta 0.01 with the exact outer layer") {
  const PatchConfig cfg(25, 3, 2, 12);
  const InputDistribution dist{DistributionKind::kRademacher, 25};
  for (double alpha : {1.0, 0.0}) {
    const Activation act(alpha);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng = derive_stream(seed, {6});
      const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
      SampleStream stream(cfg, act, truth, dist, derive_stream(seed, {4}));
      const Vector a = truth.a_star / truth.a_star.norm();
      const Stage2Result r = convotron(cfg, act, a, stream, fixed_step(50000, 0.01));
      const double err = (r.w - truth.w_star * truth.a_star.norm()).norm();
      if (err <= 0.05 * truth.sigma1) ++hits;
    }
    INFO("alpha " << alpha);
    CHECK(hits >= 4);
  }
}

TEST_CASE("negated outer layer learns the negated filter") {
  const PatchConfig cfg(25, 3, 2, 12);
  const InputDistribution dist{DistributionKind::kRademacher, 25};
  Rng rng = derive_stream(5, {6});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  const Vector target = truth.w_star * truth.a_star.norm();

  // Linear: (w, a) -> (-w, -a) is an exact symmetry of the model.
  const Activation lin(1.0);
  SampleStream stream(cfg, lin, truth, dist, derive_stream(5, {4}));
  const Stage2Result r =
      convotron(cfg, lin, -truth.a_star, stream, fixed_step(50000, 0.01), Reference{target});
  CHECK((r.w + target).norm() <= 0.05);
  CHECK(r.trajectory.back().dist_minus <= 0.05);
  CHECK(r.trajectory.back().dist_plus >= 1.9);

  // ReLU: the mean step still points at -w*||a*||, but the residual does not
  // vanish there, so check the time average of the iterates.
  const Activation relu(0.0);
  SampleStream s2(cfg, relu, truth, dist, derive_stream(5, {4}));
  const long T = 200000;
  Vector w = Vector::Zero(3), avg = Vector::Zero(3);
  Sample sample;
  for (long t = 0; t < T; ++t) {
    s2.next_into(sample);
    w += 0.01 * convotron_grad(cfg, relu, w, -truth.a_star, sample);
    if (t >= T / 2) avg += w / static_cast<double>(T / 2);
  }
  CHECK((avg + target).norm() <= 0.05);
  CHECK((w + target).norm() < (w - target).norm());
}

TEST_CASE("rebalancing the teacher leaves the run unchanged") {
  const PatchConfig cfg(9, 3, 2, 4);
  const Activation act(0.2);
  Rng rng = derive_stream(6, {20});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  const GroundTruth scaled = GroundTruth::from_params(4.0 * truth.w_star, truth.a_star / 4.0);
  const InputDistribution dist{DistributionKind::kUniformBox, 9};
  SampleStream s1(cfg, act, truth, dist, derive_stream(6, {21}));
  SampleStream s2(cfg, act, scaled, dist, derive_stream(6, {21}));
  const Vector a = random_unit_vector(4, rng);
  const Stage2Result r1 = convotron(cfg, act, a, s1, fixed_step(5000, 0.02));
  const Stage2Result r2 = convotron(cfg, act, a, s2, fixed_step(5000, 0.02));
  CHECK((r1.w - r2.w).norm() <= 1e-12);
}

TEST_CASE("outer layer is normalized before use") {
  const PatchConfig cfg(9, 3, 2, 4);
  const Activation act(0.0);
  Rng rng = derive_stream(7, {20});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  const InputDistribution dist{DistributionKind::kRademacher, 9};
  SampleStream s1(cfg, act, truth, dist, derive_stream(7, {21}));
  SampleStream s2(cfg, act, truth, dist, derive_stream(7, {21}));
  const Vector a = random_unit_vector(4, rng);
  const Stage2Result r1 = convotron(cfg, act, a, s1, fixed_step(2000, 0.02));
  const Stage2Result r2 = convotron(cfg, act, 7.5 * a, s2, fixed_step(2000, 0.02));
  CHECK((r1.w - r2.w).norm() <= 1e-12);
}

TEST_CASE("contraction rate is at least half the predicted rate") {
  // alpha = 1 and a* exact: the squared error contracts by about
  // 1 - 2 eta lambda_min(P^{a*}) per step in expectation.
  const PatchConfig cfg(7, 3, 2, 3);
  const Activation act(1.0);
  const InputDistribution dist{DistributionKind::kRademacher, 7};
  const double eta = 0.01;
  const long T = 2000;
  Rng rng = derive_stream(8, {20});
  const GroundTruth truth = GroundTruth::from_params(random_unit_vector(3, rng), random_unit_vector(3, rng));
  const double beta = analysis::jacobi_eigenvalues(analysis::weighted_patch_gram(cfg, truth.a_star).matrix)[0];
  REQUIRE(beta > 0.0);

  Stage2Config conf = fixed_step(T, eta);
  conf.record_every = 100;
  std::vector<double> mean_sq;
  const int runs = 20;
  for (int run = 0; run < runs; ++run) {
    SampleStream stream(cfg, act, truth, dist, derive_stream(8, {21, static_cast<std::uint64_t>(run)}));
    const Stage2Result r = convotron(cfg, act, truth.a_star, stream, conf, Reference{truth.w_star});
    if (mean_sq.empty()) mean_sq.assign(r.trajectory.size(), 0.0);
    for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
      mean_sq[i] += r.trajectory[i].dist_plus * r.trajectory[i].dist_plus / runs;
    }
  }
  // Least-squares slope of log E||w - w*||^2 against t.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(mean_sq.size());
  for (std::size_t i = 0; i < mean_sq.size(); ++i) {
    const double x = 100.0 * static_cast<double>(i);
    const double y = std::log(mean_sq[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double predicted = 2.0 * eta * beta;
  INFO("observed rate " << -slope << ", predicted " << predicted);
  CHECK(-slope >= 0.5 * predicted);
}

TEST_CASE("default step size") {
  const PatchConfig cfg(25, 3, 2, 12);
  CHECK(default_eta2(cfg, 5.0, 1.0) == doctest::Approx(1.0 / (4.0 * 12 * 25)));
  CHECK(default_eta2(cfg, 5.0, 0.5) == default_eta2(cfg, 5.0, 1.0));
  CHECK(default_eta2(cfg, 5.0, 2.0) == doctest::Approx(1.0 / (4.0 * 12 * 25 * 4)));
}

TEST_CASE("argument and config errors") {
  const PatchConfig cfg(7, 3, 2, 3);
  const Activation act(0.0);
  Rng rng = derive_stream(9, {20});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  SampleStream stream(cfg, act, truth, {DistributionKind::kRademacher, 7}, derive_stream(9, {21}));
  CHECK_THROWS_AS(convotron(cfg, act, Vector::Zero(3), stream, fixed_step(10, 0.1)), ArgumentError);
  CHECK_THROWS_AS(convotron(cfg, act, truth.a_star.head(2), stream, fixed_step(10, 0.1)), ArgumentError);
  Stage2Config unresolved;
  CHECK_THROWS_AS(convotron(cfg, act, truth.a_star, stream, unresolved), ConfigError);
  CHECK_THROWS_AS(convotron(PatchConfig(9, 3, 2, 3), act, truth.a_star, stream, fixed_step(10, 0.1)),
                  ArgumentError);
  CHECK_THROWS_AS(convotron(cfg, act, truth.a_star, stream, fixed_step(10, 0.1), Reference{Vector::Zero(2)}),
                  ArgumentError);
  CHECK_THROWS_AS(fixed_step(0, 0.1).validate(), ConfigError);
  CHECK_THROWS_AS(fixed_step(10, -0.1).validate(), ConfigError);
}

TEST_CASE("divergence is reported") {
  const PatchConfig cfg(25, 3, 2, 12);
  const Activation act(1.0);
  Rng rng = derive_stream(10, {20});
  const GroundTruth truth = make_ground_truth(cfg, 1.0, rng);
  SampleStream stream(cfg, act, truth, {DistributionKind::kRademacher, 25}, derive_stream(10, {21}));
  try {
    convotron(cfg, act, truth.a_star, stream, fixed_step(100000, 1.0));
    FAIL("expected divergence");
  } catch (const DivergedError& e) {
    CHECK(e.stage() == "stage2");
    CHECK(e.iteration() >= 1);
  }
}
