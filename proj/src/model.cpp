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

#include "convlearn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convlearn/errors.hpp"

namespace convlearn {

PatchConfig::PatchConfig(int d, int r, int s, int k) : d_(d), r_(r), s_(s), k_(k) {
  if (d < 1 || r < 1 || s < 1 || k < 1) {
    throw ConfigError("patch config: d, r, s, k must all be >= 1");
  }
  // (k-1)*s + r <= d, evaluated without overflow for large k*s.
  if (static_cast<long long>(k - 1) * s + r > d) {
    throw ConfigError("patch config: (k-1)*s + r = " +
                      std::to_string(static_cast<long long>(k - 1) * s + r) +
                      " exceeds input dimension d = " + std::to_string(d));
  }
}

int PatchConfig::nonoverlap_size() const {
  require_large_stride();
  return std::min(r_, s_) - nonoverlap_offset();
}

void PatchConfig::require_large_stride() const {
  if (!large_stride()) {
    throw ConfigError("large-stride assumption violated: need s >= floor(r/2) + 1, got r = " +
                      std::to_string(r_) + ", s = " + std::to_string(s_));
  }
}

Activation::Activation(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("activation slope alpha must lie in [0, 1]");
  }
}

GroundTruth GroundTruth::from_params(Vector w_star, Vector a_star) {
  const double sigma1 = w_star.norm() * a_star.norm();
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) {
    throw ArgumentError("ground truth needs finite, nonzero w* and a*");
  }
  return {std::move(w_star), std::move(a_star), sigma1};
}

void check_input(const PatchConfig& cfg, const Vector& x) {
  if (x.size() != cfg.d()) {
    throw ArgumentError("input has length " + std::to_string(x.size()) +
                        ", expected d = " + std::to_string(cfg.d()));
  }
}

void check_params(const PatchConfig& cfg, const CnnParams& params) {
  if (params.w.size() != cfg.r() || params.a.size() != cfg.k()) {
    throw ArgumentError("parameters must have |w| = r and |a| = k");
  }
}

void check_params(const PatchConfig& cfg, const NonOverlapParams& params) {
  if (params.w_non.size() != cfg.nonoverlap_size() || params.a.size() != cfg.k()) {
    throw ArgumentError("non-overlap parameters must have |w_non| = nonoverlap_size() and |a| = k");
  }
}

namespace {

void check_patch_index(const PatchConfig& cfg, int j) {
  if (j < 0 || j >= cfg.k()) {
    throw ArgumentError("patch index " + std::to_string(j) + " outside [0, " +
                        std::to_string(cfg.k()) + ")");
  }
}

}  // namespace

Vector patch_extract(const PatchConfig& cfg, const Vector& x, int j) {
  check_input(cfg, x);
  check_patch_index(cfg, j);
  return x.segment(cfg.patch_start(j), cfg.r());
}

Matrix patch_matrix(const PatchConfig& cfg, const Vector& x) {
  check_input(cfg, x);
  Matrix p(cfg.r(), cfg.k());
  for (int j = 0; j < cfg.k(); ++j) p.col(j) = x.segment(cfg.patch_start(j), cfg.r());
  return p;
}

double activation_apply(const Activation& act, double z) { return act(z); }

double forward(const PatchConfig& cfg, const Activation& act, const CnnParams& params,
               const Vector& x) {
  check_input(cfg, x);
  check_params(cfg, params);
  double out = 0.0;
  for (int j = 0; j < cfg.k(); ++j) {
    out += params.a[j] * act(params.w.dot(x.segment(cfg.patch_start(j), cfg.r())));
  }
  return out;
}

Vector nonoverlap_extract(const PatchConfig& cfg, const Vector& x, int j) {
  const int m = cfg.nonoverlap_size();
  check_input(cfg, x);
  check_patch_index(cfg, j);
  return x.segment(cfg.patch_start(j) + cfg.nonoverlap_offset(), m);
}

Vector nonoverlap_filter(const PatchConfig& cfg, const Vector& w) {
  const int m = cfg.nonoverlap_size();
  if (w.size() != cfg.r()) throw ArgumentError("filter must have length r");
  return w.segment(cfg.nonoverlap_offset(), m);
}

double forward_nonoverlap(const PatchConfig& cfg, const Activation& act,
                          const NonOverlapParams& params, const Vector& x) {
  check_input(cfg, x);
  check_params(cfg, params);
  const int m = cfg.nonoverlap_size();
  const int off = cfg.nonoverlap_offset();
  double out = 0.0;
  for (int j = 0; j < cfg.k(); ++j) {
    out += params.a[j] * act(params.w_non.dot(x.segment(cfg.patch_start(j) + off, m)));
  }
  return out;
}

}  // namespace convlearn
