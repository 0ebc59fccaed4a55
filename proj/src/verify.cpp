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

#include "convlearn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "convlearn/analysis.hpp"
#include "convlearn/data.hpp"
#include "convlearn/errors.hpp"
#include "convlearn/model.hpp"
#include "convlearn/oracle.hpp"
#include "convlearn/rng.hpp"
#include "convlearn/stage1.hpp"

namespace convlearn::verify {

namespace {

Vector normal_vector(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

ClaimResult below(std::string suite, std::string claim, std::string anchor, double computed,
                  double bound, double tol, std::string detail = {}) {
  ClaimResult r{std::move(suite), std::move(claim), std::move(anchor), computed, bound, tol,
                computed <= bound + tol, std::move(detail)};
  return r;
}

ClaimResult above(std::string suite, std::string claim, std::string anchor, double computed,
                  double bound, double tol, std::string detail = {}) {
  ClaimResult r{std::move(suite), std::move(claim), std::move(anchor), computed, bound, tol,
                computed >= bound - tol, std::move(detail)};
  return r;
}

// Large-stride (r, s) pairs exercised by the spectral suites.
constexpr std::pair<int, int> kStrides[] = {{2, 2}, {3, 2}, {4, 3}, {5, 3}, {6, 4}, {7, 4}, {3, 3}};

PatchConfig stride_config(int r, int s, int k) { return PatchConfig((k - 1) * s + r, r, s, k); }

}  // namespace

nlohmann::json to_json(const ClaimResult& r) {
  return {{"suite", r.suite},      {"claim", r.claim}, {"anchor", r.anchor},
          {"computed", r.computed}, {"bound", r.bound}, {"tolerance", r.tolerance},
          {"pass", r.pass},         {"detail", r.detail}};
}

std::vector<ClaimResult> run_unbiased(const UnbiasedOptions& opt) {
  const PatchConfig cfg(opt.d, opt.r, opt.s, opt.k);
  cfg.require_large_stride();
  Rng rng = derive_stream(opt.seed, {1});
  double worst_w = 0.0, worst_a = 0.0, worst_fd = 0.0;
  for (double alpha : opt.alphas) {
    const Activation act(alpha);
    for (int p = 0; p < opt.points; ++p) {
      GroundTruth truth{normal_vector(cfg.r(), rng), normal_vector(cfg.k(), rng), 1.0};
      const NonOverlapParams params{normal_vector(cfg.nonoverlap_size(), rng),
                                    normal_vector(cfg.k(), rng)};
      const Vector mean = oracle::enumerate_rademacher_vector(cfg.d(), [&](const Vector& x) {
        const Sample s{x, label(cfg, act, truth, x)};
        Vector both(cfg.nonoverlap_size() + cfg.k());
        both << grad_w_non(cfg, act, params, s), grad_a(cfg, act, params, s);
        return both;
      });
      const Vector w_star_non = nonoverlap_filter(cfg, truth.w_star);
      const analysis::RegGradient g =
          analysis::l_reg_grad(params.w_non, params.a, w_star_non, truth.a_star);
      worst_w = std::max(worst_w, (mean.head(cfg.nonoverlap_size()) - g.grad_w).cwiseAbs().maxCoeff());
      worst_a = std::max(worst_a, (mean.tail(cfg.k()) - g.grad_a).cwiseAbs().maxCoeff());

      // Closed-form gradient against central differences of the objective.
      Vector stacked(cfg.nonoverlap_size() + cfg.k());
      stacked << params.w_non, params.a;
      const int m = cfg.nonoverlap_size();
      const Vector fd = oracle::finite_diff_grad(
          [&](const Vector& v) {
            return analysis::l_reg(v.head(m), v.tail(cfg.k()), w_star_non, truth.a_star);
          },
          stacked);
      Vector closed(stacked.size());
      closed << g.grad_w, g.grad_a;
      const double scale = std::max(1.0, closed.cwiseAbs().maxCoeff());
      worst_fd = std::max(worst_fd, (fd - closed).cwiseAbs().maxCoeff() / scale);
    }
  }
  std::ostringstream where;
  where << "d=" << cfg.d() << " r=" << cfg.r() << " s=" << cfg.s() << " k=" << cfg.k()
        << ", " << opt.points << " points x " << opt.alphas.size() << " alphas, exact enumeration";
  return {
      below("unbiased", "E[g] = grad_w L_reg", "filter estimator mean equals regularized gradient",
            worst_w, 0.0, opt.tolerance, where.str()),
      below("unbiased", "E[h] = grad_a L_reg",
            "output-layer estimator mean equals regularized gradient", worst_a, 0.0,
            opt.tolerance, where.str()),
      below("unbiased", "grad L_reg matches finite differences",
            "closed-form gradient of the balanced factorization objective", worst_fd, 0.0, 1e-6,
            "relative max-abs error, central differences"),
  };
}

std::vector<ClaimResult> run_switch(const SwitchOptions& opt) {
  Rng rng = derive_stream(opt.seed, {2});
  double worst = 0.0, worst_closed = 0.0;
  for (int d = 1; d <= opt.max_d; ++d) {
    const InputDistribution dist{DistributionKind::kRademacher, d};
    for (int p = 0; p < opt.pairs; ++p) {
      const Vector a = random_unit_vector(d, rng);
      const Vector b = random_unit_vector(d, rng);
      for (int i = 0; i < opt.alpha_steps; ++i) {
        const double alpha =
            opt.alpha_steps > 1 ? static_cast<double>(i) / (opt.alpha_steps - 1) : 0.0;
        const analysis::SwitchCheck c =
            analysis::switch_lemma_check(dist, a, b, alpha, analysis::Enumerate{});
        worst = std::max(worst, c.gap);
        // Rademacher coordinates are orthonormal, so E[(a.x)(b.x)] = a.b.
        worst_closed = std::max(worst_closed, std::abs(c.rhs - 0.5 * (1.0 + alpha) * a.dot(b)));
      }
    }
  }
  std::ostringstream where;
  where << "d=1.." << opt.max_d << ", " << opt.pairs << " unit pairs per d, " << opt.alpha_steps
        << " alphas";
  return {
      below("switch", "E[sigma(a.x) b.x] = (1+alpha)/2 E[a.x b.x]",
            "odd part of the leaky activation averages out", worst, 0.0, opt.tolerance,
            where.str()),
      below("switch", "E[a.x b.x] = a.b", "isotropy of the Rademacher cube", worst_closed, 0.0,
            opt.tolerance, where.str()),
  };
}

std::vector<ClaimResult> run_eigen(const EigenOptions& opt) {
  Rng rng = derive_stream(opt.seed, {3});
  double worst_lower = std::numeric_limits<double>::infinity();  // lambda_min - bound
  double worst_upper = -std::numeric_limits<double>::infinity(); // lambda_max
  double worst_band = 0.0, worst_toeplitz = 0.0, worst_tight = 0.0;
  for (int k = 1; k <= opt.k_max; ++k) {
    const analysis::LambdaBounds lb = analysis::toeplitz_lambda_bounds(k);
    const Vector spec = analysis::jacobi_eigenvalues(analysis::tridiagonal_toeplitz(k));
    const std::vector<double> closed = analysis::tridiagonal_toeplitz_spectrum(k);
    std::vector<double> sorted = closed;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < k; ++i) {
      worst_toeplitz = std::max(worst_toeplitz, std::abs(spec[i] - sorted[static_cast<std::size_t>(i)]));
    }
    // Extremal output layer: the leading sine mode.
    Vector sine(k);
    for (int i = 0; i < k; ++i) sine[i] = std::sin((i + 1) * std::numbers::pi / (k + 1));
    sine.normalize();

    for (auto [r, s] : kStrides) {
      const PatchConfig cfg = stride_config(r, s, k);
      for (int n = 0; n < opt.samples; ++n) {
        const Vector a = random_unit_vector(k, rng);
        const Matrix pa = analysis::weighted_patch_gram(cfg, a).matrix;
        worst_band = std::max(
            worst_band, (pa - analysis::weighted_patch_gram_banded(cfg, a)).cwiseAbs().maxCoeff());
        const Vector ev = analysis::jacobi_eigenvalues(pa);
        worst_lower = std::min(worst_lower, ev[0] - lb.lower_min);
        worst_upper = std::max(worst_upper, ev[ev.size() - 1]);
      }
      if (r > s && k > 1) {
        const Vector ev = analysis::jacobi_eigenvalues(analysis::weighted_patch_gram(cfg, sine).matrix);
        worst_tight = std::max(worst_tight, std::abs(ev[0] - lb.lower_min));
      }
    }
  }
  std::ostringstream where;
  where << "k=1.." << opt.k_max << ", " << opt.samples << " unit a per (k, r, s), "
        << std::size(kStrides) << " large-stride (r, s)";
  return {
      above("eigen", "lambda_min(P^a) >= 1 - cos(pi/(k+1))",
            "lower spectral bound for unit output layers", worst_lower, 0.0, opt.tolerance,
            where.str() + "; computed = min(lambda_min - bound)"),
      below("eigen", "lambda_max(P^a) <= 2", "upper spectral bound for unit output layers",
            worst_upper, 2.0, opt.tolerance, where.str()),
      below("eigen", "lower bound is attained", "sine-mode output layer meets the bound",
            worst_tight, 0.0, opt.tolerance, "max |lambda_min - bound| over r > s"),
      below("eigen", "P^a is banded", "diagonal ||a||^2, offsets +-s carry sum a_i a_{i+1}",
            worst_band, 0.0, opt.tolerance, "explicit sum vs closed form"),
      below("eigen", "tridiagonal spectrum 1 - cos(i pi/(k+1))",
            "Toeplitz eigenvalues in closed form", worst_toeplitz, 0.0, opt.tolerance,
            "Jacobi vs closed form"),
  };
}

std::vector<ClaimResult> run_gershgorin(const GershgorinOptions& opt) {
  Rng rng = derive_stream(opt.seed, {4});
  std::uniform_int_distribution<int> pick_k(1, 32);
  std::uniform_int_distribution<int> pick_stride(0, static_cast<int>(std::size(kStrides)) - 1);
  std::uniform_int_distribution<int> pick_n(1, 16);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < opt.matrices; ++t) {
    Matrix m;
    switch (t % 3) {
      case 0: {
        const auto [r, s] = kStrides[static_cast<std::size_t>(pick_stride(rng))];
        const int k = pick_k(rng);
        m = analysis::weighted_patch_gram(stride_config(r, s, k), normal_vector(k, rng)).matrix;
        break;
      }
      case 1:
        m = analysis::tridiagonal_toeplitz(pick_k(rng));
        break;
      default: {
        const int n = pick_n(rng);
        Matrix g(n, n);
        for (int i = 0; i < n; ++i) g.col(i) = normal_vector(n, rng);
        m = 0.5 * (g + g.transpose());
      }
    }
    const std::vector<analysis::Disk> disks = analysis::gershgorin_bounds(m);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (double lambda : analysis::jacobi_eigenvalues(m)) {
      double excess = std::numeric_limits<double>::infinity();
      for (const analysis::Disk& disk : disks) {
        excess = std::min(excess, std::abs(lambda - disk.center) - disk.radius);
      }
      worst = std::max(worst, excess / scale);
    }
  }
  std::ostringstream where;
  where << opt.matrices << " symmetric matrices (P^a, tridiagonal, random)";
  return {below("gershgorin", "every eigenvalue lies in a Gershgorin disk",
                "disk union covers the spectrum", worst, 0.0, opt.tolerance,
                where.str() + "; computed = max scaled distance outside the union")};
}

std::vector<ClaimResult> run_lossgap(const LossGapOptions& opt) {
  Rng rng = derive_stream(opt.seed, {5});
  const PatchConfig cfg(25, 3, 2, 12);
  constexpr int kGroups = 20;
  const int per_group = std::max(1, opt.draws / kGroups);
  constexpr DistributionKind kinds[] = {DistributionKind::kRademacher,
                                        DistributionKind::kUniformBox,
                                        DistributionKind::kSphereScaled};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long violations = 0;
  long total = 0;
  double worst_ratio = 0.0, worst_mean_ratio = 0.0;
  for (int g = 0; g < kGroups; ++g) {
    const Activation act(unit(rng));
    const InputDistribution dist{kinds[g % 3], cfg.d()};
    const GroundTruth truth = make_ground_truth(cfg, 0.25 + 2.0 * unit(rng), rng);
    // Perturbations of the teacher at mixed scales.
    const double scale = std::pow(10.0, -2.0 + 2.0 * unit(rng));
    const CnnParams params{truth.w_star + scale * normal_vector(cfg.r(), rng),
                           truth.a_star + scale * normal_vector(cfg.k(), rng)};
    const double bracket = analysis::loss_gap_bracket(cfg, params, truth);
    double sum = 0.0;
    for (int n = 0; n < per_group; ++n) {
      const Vector x = sample_input(dist, rng);
      const analysis::LossGap gap = analysis::loss_gap_bound_check(cfg, act, params, truth, x);
      sum += gap.lhs;
      ++total;
      if (gap.lhs > gap.rhs_pointwise * (1.0 + 1e-12)) ++violations;
      if (gap.rhs_pointwise > 0.0) worst_ratio = std::max(worst_ratio, gap.lhs / gap.rhs_pointwise);
    }
    const double b = dist.bound();
    worst_mean_ratio = std::max(worst_mean_ratio, (sum / per_group) / (bracket * b * b));
  }
  std::ostringstream where;
  where << total << " draws over " << kGroups << " (params, teacher, law) groups; max ratio "
        << worst_ratio;
  return {
      below("lossgap", "pointwise (f* - f)^2 <= bracket ||x||^2",
            "squared-loss gap controlled by parameter distances", static_cast<double>(violations),
            0.0, 0.0, where.str() + "; computed = violations"),
      below("lossgap", "mean (f* - f)^2 <= bracket B^2",
            "expected gap with B^2 dominating E||x||^2", worst_mean_ratio, 1.0, 0.0,
            "computed = worst mean / bound"),
  };
}

std::vector<ClaimResult> run_landscape(const LandscapeOptions& opt) {
  Rng rng = derive_stream(opt.seed, {6});
  const double radius = std::sqrt(opt.sigma1);
  int successes = 0;
  double worst = 0.0;
  for (int run = 0; run < opt.runs; ++run) {
    const Vector w_star = radius * random_unit_vector(opt.dim, rng);
    const Vector a_star = radius * random_unit_vector(opt.dim, rng);
    const Vector w0 = normal_vector(opt.dim, rng);
    const Vector a0 = normal_vector(opt.dim, rng);
    double loss;
    try {
      loss = analysis::landscape_descent(w0, a0, w_star, a_star, opt.eta, opt.steps, opt.noise, rng);
    } catch (const DivergedError&) {
      loss = std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, loss);
    if (loss <= opt.loss_threshold) ++successes;
  }

  // The origin is a critical point with zero gradient; noise must carry the
  // iterate off it.
  const Vector w_star = radius * random_unit_vector(opt.dim, rng);
  const Vector a_star = radius * random_unit_vector(opt.dim, rng);
  const Vector zero = Vector::Zero(opt.dim);
  const double from_origin =
      analysis::landscape_descent(zero, zero, w_star, a_star, opt.eta, opt.steps, opt.noise, rng);
  const analysis::RegGradient at_star = analysis::l_reg_grad(w_star, a_star, w_star, a_star);
  const double star_grad = std::max(at_star.grad_w.norm(), at_star.grad_a.norm());

  std::ostringstream where;
  where << opt.runs << " starts, dim " << opt.dim << ", eta " << opt.eta << ", " << opt.steps
        << " steps, noise " << opt.noise << "; worst final loss " << worst;
  ClaimResult global = above("landscape", "noisy descent reaches a global minimum",
                             "no spurious local minima of the regularized objective",
                             static_cast<double>(successes), static_cast<double>(opt.min_successes),
                             0.0, where.str() + "; computed = runs with loss <= threshold");
  return {
      global,
      below("landscape", "saddle at the origin is escaped",
            "injected noise leaves the zero critical point", from_origin, opt.loss_threshold, 0.0),
      below("landscape", "teacher is a critical point", "gradient vanishes at (w*, a*)", star_grad,
            0.0, 1e-12),
  };
}

std::vector<EigenScanRow> eigen_scan(int k_max, int samples, int r, int s, std::uint64_t seed) {
  if (k_max < 1 || samples < 1) throw ArgumentError("eigen_scan: k_max and samples must be >= 1");
  Rng rng = derive_stream(seed, {7});
  std::vector<EigenScanRow> rows;
  for (int k = 1; k <= k_max; ++k) {
    const PatchConfig cfg = stride_config(r, s, k);
    cfg.require_large_stride();
    EigenScanRow row{k, analysis::toeplitz_lambda_bounds(k).lower_min,
                     std::numeric_limits<double>::infinity(), 0.0};
    for (int n = 0; n < samples; ++n) {
      const Vector ev = analysis::jacobi_eigenvalues(
          analysis::weighted_patch_gram(cfg, random_unit_vector(k, rng)).matrix);
      row.worst_lambda_min = std::min(row.worst_lambda_min, ev[0]);
      row.max_lambda_max = std::max(row.max_lambda_max, ev[ev.size() - 1]);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ClaimResult> run_suite(std::string_view name) {
  if (name == "switch") return run_switch();
  if (name == "unbiased") return run_unbiased();
  if (name == "eigen") return run_eigen();
  if (name == "gershgorin") return run_gershgorin();
  if (name == "lossgap") return run_lossgap();
  if (name == "landscape") return run_landscape();
  if (name == "all") {
    std::vector<ClaimResult> all;
    for (std::string_view suite : kSuites) {
      std::vector<ClaimResult> part = run_suite(suite);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  throw ArgumentError("unknown suite '" + std::string(name) + "'");
}

}  // namespace convlearn::verify
