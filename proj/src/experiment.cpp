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

#include "convlearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "convlearn/errors.hpp"
#include "convlearn/io.hpp"
#include "convlearn/rng.hpp"

namespace convlearn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view v, const std::string& key) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("config: " + key + " expects a number, got '" + std::string(v) + "'");
  }
  return out;
}

long to_long(std::string_view v, const std::string& key) {
  // Accept integral values written in float notation, e.g. 1e6.
  const double x = to_double(v, key);
  if (x != std::floor(x) || std::abs(x) > 9e15) {
    throw ConfigError("config: " + key + " expects an integer, got '" + std::string(v) + "'");
  }
  return static_cast<long>(x);
}

std::uint64_t to_seed(std::string_view v) {
  std::uint64_t out = 0;
  v = trim(v);
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("seed list: bad seed '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = trim(text.substr(pos, comma - pos));
    const std::size_t dash = item.find('-');
    if (dash != std::string_view::npos && dash > 0) {
      const std::uint64_t lo = to_seed(item.substr(0, dash));
      const std::uint64_t hi = to_seed(item.substr(dash + 1));
      if (hi < lo || hi - lo > 1000000) throw ConfigError("seed list: bad range '" + std::string(item) + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(to_seed(item));
    }
    pos = comma + 1;
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw ConfigError("seed list: duplicate seed");
  return seeds;
}

PatchConfig ExperimentSpec::patch_config() const { return PatchConfig(d, r, s, k); }
Activation ExperimentSpec::activation() const { return Activation(alpha); }
InputDistribution ExperimentSpec::input_distribution() const { return {distribution, d}; }

void ExperimentSpec::validate() const {
  const PatchConfig cfg = patch_config();
  cfg.require_large_stride();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("config: alpha must lie in [0, 1]");
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) throw ConfigError("config: sigma1 must be positive");
  pipeline.validate();
  if (seeds.empty()) throw ConfigError("config: no seeds");
  if (heldout < 1) throw ConfigError("config: heldout must be >= 1");
  if (!(mse_threshold > 0.0)) throw ConfigError("config: mse_threshold must be positive");
  if (name.empty() || name.find_first_of("\n\r") != std::string::npos) {
    throw ConfigError("config: bad name");
  }
}

std::string ExperimentSpec::to_ini() const {
  const auto& p = pipeline;
  std::ostringstream o;
  o << "[model]\n"
    << "d = " << d << "\nr = " << r << "\ns = " << s << "\nk = " << k
    << "\nalpha = " << format_double(alpha) << "\n\n[data]\n"
    << "distribution = " << to_string(distribution) << "\nsigma1 = " << format_double(sigma1)
    << "\n\n[stage1]\n"
    << "T1 = " << p.stage1.T1 << "\neta1 = " << format_double(p.stage1.eta1)
    << "\ninit_scale = "
    << (p.stage1.init_scale ? format_double(*p.stage1.init_scale) : std::string("auto"))
    << "\nnoise_scale = " << format_double(p.stage1.noise_scale) << "\n\n[stage2]\n"
    << "T2 = " << p.stage2.T2
    << "\neta2 = " << (p.stage2.eta2 ? format_double(*p.stage2.eta2) : std::string("auto"))
    << "\n\n[stage3]\n"
    << "T3 = " << p.T3 << "\nrestarts = " << p.restarts << "\n\n[run]\n"
    << "name = " << name << "\nseed_list = ";
  for (std::size_t i = 0; i < seeds.size(); ++i) o << (i ? "," : "") << seeds[i];
  o << "\nrecord_every = " << p.record_every << "\nheldout = " << heldout
    << "\nmse_threshold = " << format_double(mse_threshold)
    << "\npilot_samples = " << p.pilot_samples << "\n";
  return o.str();
}

ExperimentSpec parse_experiment(std::string_view text) {
  ExperimentSpec spec;
  auto& p = spec.pipeline;
  std::string section;
  std::set<std::string> seen;
  std::optional<long> seed_count;
  std::optional<std::vector<std::uint64_t>> seed_list;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string_view::npos) {
      value = trim(value.substr(0, hash));
    }
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) throw ConfigError(where + "duplicate key " + full);
    if (value.empty()) throw ConfigError(where + "empty value for " + full);

    if (full == "model.d") spec.d = static_cast<int>(to_long(value, full));
    else if (full == "model.r") spec.r = static_cast<int>(to_long(value, full));
    else if (full == "model.s") spec.s = static_cast<int>(to_long(value, full));
    else if (full == "model.k") spec.k = static_cast<int>(to_long(value, full));
    else if (full == "model.alpha") spec.alpha = to_double(value, full);
    else if (full == "data.distribution") spec.distribution = parse_distribution_kind(value);
    else if (full == "data.sigma1") spec.sigma1 = to_double(value, full);
    else if (full == "stage1.T1") p.stage1.T1 = to_long(value, full);
    else if (full == "stage1.eta1") p.stage1.eta1 = to_double(value, full);
    else if (full == "stage1.init_scale") {
      if (value == "auto") p.stage1.init_scale.reset();
      else p.stage1.init_scale = to_double(value, full);
    } else if (full == "stage1.noise_scale") p.stage1.noise_scale = to_double(value, full);
    else if (full == "stage2.T2") p.stage2.T2 = to_long(value, full);
    else if (full == "stage2.eta2") {
      if (value == "auto") p.stage2.eta2.reset();
      else p.stage2.eta2 = to_double(value, full);
    } else if (full == "stage3.T3") p.T3 = to_long(value, full);
    else if (full == "stage3.restarts") p.restarts = static_cast<int>(to_long(value, full));
    else if (full == "run.name") spec.name = std::string(value);
    else if (full == "run.seeds") seed_count = to_long(value, full);
    else if (full == "run.seed_list") seed_list = parse_seed_list(value);
    else if (full == "run.record_every") p.record_every = to_long(value, full);
    else if (full == "run.heldout") spec.heldout = to_long(value, full);
    else if (full == "run.mse_threshold") spec.mse_threshold = to_double(value, full);
    else if (full == "run.pilot_samples") {
      const long n = to_long(value, full);
      if (n < 1) throw ConfigError(where + "pilot_samples must be >= 1");
      p.pilot_samples = static_cast<std::size_t>(n);
    } else throw ConfigError(where + "unknown key " + full);
  }
  if (seed_list) {
    spec.seeds = *seed_list;
  } else if (seed_count) {
    if (*seed_count < 1) throw ConfigError("config: seeds must be >= 1");
    spec.seeds.clear();
    for (long i = 1; i <= *seed_count; ++i) spec.seeds.push_back(static_cast<std::uint64_t>(i));
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("config: cannot read " + path.string());
  }
  return parse_experiment(read_text(path));
}

SeedRun run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const PatchConfig cfg = spec.patch_config();
  const Activation act = spec.activation();
  const InputDistribution dist = spec.input_distribution();
  SeedRun run;
  Rng truth_rng = derive_stream(seed, {kStreamTruth});
  run.truth = make_ground_truth(cfg, spec.sigma1, truth_rng);
  SeedOutcome& out = run.outcome;
  out.seed = seed;

  PipelineConfig config = spec.pipeline;
  config.seed = seed;
  try {
    run.result = run_pipeline(cfg, act, dist, run.truth, config);
  } catch (const DivergedError& e) {
    out.status = "diverged";
    out.failed_stage = e.stage();
    out.failed_iteration = e.iteration();
    out.heldout_mse = out.a_error = out.w_error = std::numeric_limits<double>::quiet_NaN();
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
  }
  const PipelineResult& res = run.result;
  out.sigma1_hat = res.diagnostics.sigma1_hat;
  out.eta1 = res.diagnostics.eta1;
  out.eta2 = res.diagnostics.eta2;
  out.chosen_sign = res.diagnostics.chosen_sign;
  for (const Candidate& c : res.candidates) out.candidate_losses.push_back(c.loss);

  const double a_star_norm = run.truth.a_star.norm();
  const Vector a_unit = run.truth.a_star / a_star_norm;
  const Vector w_scaled = run.truth.w_star * a_star_norm;
  const double orient = res.params.a.dot(a_unit) >= 0.0 ? 1.0 : -1.0;
  out.sign_correct = orient > 0.0;
  out.a_error = (res.params.a - orient * a_unit).norm();
  out.w_error = (res.params.w - orient * w_scaled).norm();

  SampleStream held(cfg, act, run.truth, dist, derive_stream(seed, {kStreamHeldout}));
  std::vector<Sample> samples(static_cast<std::size_t>(spec.heldout));
  for (Sample& s : samples) held.next_into(s);
  out.heldout_mse = empirical_loss(cfg, act, res.params, samples);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

int ExperimentReport::completed() const {
  return static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(),
                                        [](const SeedOutcome& o) { return o.status == "ok"; }));
}

int ExperimentReport::mse_passes() const {
  return static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(), [&](const SeedOutcome& o) {
    return o.status == "ok" && o.heldout_mse <= spec.mse_threshold;
  }));
}

nlohmann::json summary_json(const ExperimentReport& report) {
  using nlohmann::json;
  const ExperimentSpec& sp = report.spec;
  json seeds = json::array();
  for (const SeedOutcome& o : report.outcomes) {
    json j = {{"seed", o.seed}, {"status", o.status}};
    if (o.status != "ok") {
      j["failed_stage"] = o.failed_stage;
      j["failed_iteration"] = o.failed_iteration;
    } else {
      j["heldout_mse"] = o.heldout_mse;
      j["a_error"] = o.a_error;
      j["w_error"] = o.w_error;
      j["chosen_sign"] = o.chosen_sign;
      j["sign_correct"] = o.sign_correct;
      j["sigma1_hat"] = o.sigma1_hat;
      j["eta1"] = o.eta1;
      j["eta2"] = o.eta2;
      j["candidate_losses"] = o.candidate_losses;
      j["mse_pass"] = o.heldout_mse <= sp.mse_threshold;
    }
    seeds.push_back(std::move(j));
  }
  return {
      {"name", sp.name},
      {"config", sp.to_ini()},
      {"seeds", std::move(seeds)},
      {"aggregate",
       {{"seeds", report.outcomes.size()},
        {"completed", report.completed()},
        {"mse_passes", report.mse_passes()},
        {"mse_threshold", sp.mse_threshold}}},
  };
}

nlohmann::json timings_json(const ExperimentReport& report) {
  nlohmann::json seeds = nlohmann::json::array();
  double total = 0.0;
  for (const SeedOutcome& o : report.outcomes) {
    seeds.push_back({{"seed", o.seed}, {"seconds", o.seconds}});
    total += o.seconds;
  }
  return {{"name", report.spec.name},
          {"config", report.spec.to_ini()},
          {"seeds", seeds},
          {"total_seconds", total}};
}

namespace {

AuditHeader audit_header(const ExperimentSpec& spec, std::uint64_t seed, int stage) {
  AuditHeader h{{"name", spec.name}, {"seed", std::to_string(seed)},
                {"stage", std::to_string(stage)}};
  std::istringstream ini(spec.to_ini());
  std::string line, section;
  while (std::getline(ini, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    h.emplace_back(section + "." + line.substr(0, eq), line.substr(eq + 3));
  }
  return h;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                                int jobs) {
  spec.validate();
  if (jobs < 1) throw ArgumentError("jobs must be >= 1");
  std::filesystem::create_directories(out_dir);

  ExperimentReport report;
  report.spec = spec;
  report.outcomes.resize(spec.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.seeds.size()) return;
      try {
        const std::uint64_t seed = spec.seeds[i];
        SeedRun run = run_seed(spec, seed);
        if (run.outcome.status == "ok") {
          const std::string tag = "seed" + std::to_string(seed) + ".csv";
          write_trajectory_csv(out_dir / ("stage1_" + tag), audit_header(spec, seed, 1),
                               run.result.stage1_trajectory);
          const auto chosen = static_cast<std::size_t>(run.result.diagnostics.chosen_index);
          AuditHeader h2 = audit_header(spec, seed, 2);
          h2.emplace_back("candidate", std::to_string(chosen));
          h2.emplace_back("sign", std::to_string(run.outcome.chosen_sign));
          write_trajectory_csv(out_dir / ("stage2_" + tag), h2,
                               run.result.stage2_trajectories[chosen]);
        }
        report.outcomes[i] = std::move(run.outcome);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = spec.seeds.size();
      }
    }
  };

  const int n_threads = std::min<int>(jobs, static_cast<int>(spec.seeds.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  write_text(out_dir / "config.ini", spec.to_ini());
  write_text(out_dir / "summary.json", summary_json(report).dump(2) + "\n");
  write_text(out_dir / "timings.json", timings_json(report).dump(2) + "\n");
  return report;
}

}  // namespace convlearn
