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

// convlearn run | verify | eigen-scan

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "convlearn/errors.hpp"
#include "convlearn/experiment.hpp"
#include "convlearn/io.hpp"
#include "convlearn/verify.hpp"

namespace fs = std::filesystem;
using namespace convlearn;

namespace {

int cmd_run(const std::string& config, long seeds, const std::string& seed_list,
            const std::string& out, int jobs) {
  ExperimentSpec spec = config.empty() ? ExperimentSpec{} : load_experiment(config);
  if (!seed_list.empty()) {
    spec.seeds = parse_seed_list(seed_list);
  } else if (seeds > 0) {
    spec.seeds.clear();
    for (long i = 1; i <= seeds; ++i) spec.seeds.push_back(static_cast<std::uint64_t>(i));
  }
  spec.validate();
  const ExperimentReport report = run_experiment(spec, out, jobs);
  std::printf("%-8s %-9s %-14s %-12s %-12s %s\n", "seed", "status", "heldout_mse", "a_error",
              "w_error", "sign");
  for (const SeedOutcome& o : report.outcomes) {
    if (o.status == "ok") {
      std::printf("%-8llu %-9s %-14.6e %-12.4e %-12.4e %+d%s\n",
                  static_cast<unsigned long long>(o.seed), o.status.c_str(), o.heldout_mse,
                  o.a_error, o.w_error, o.chosen_sign, o.sign_correct ? "" : " (wrong)");
    } else {
      std::printf("%-8llu %-9s %s at iteration %ld\n", static_cast<unsigned long long>(o.seed),
                  o.status.c_str(), o.failed_stage.c_str(), o.failed_iteration);
    }
  }
  std::printf("completed %d/%zu, mse <= %g on %d\n", report.completed(), report.outcomes.size(),
              spec.mse_threshold, report.mse_passes());
  std::printf("wrote %s\n", (fs::path(out) / "summary.json").string().c_str());
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& out) {
  const std::vector<verify::ClaimResult> results = verify::run_suite(suite);
  bool all = true;
  nlohmann::json doc = nlohmann::json::array();
  std::printf("%-11s %-46s %-24s %-24s %s\n", "suite", "claim", "computed", "bound", "result");
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("%-11s %-46s %-24s %-24s %s\n", r.suite.c_str(), r.claim.c_str(),
                format_double(r.computed).c_str(), format_double(r.bound).c_str(),
                r.pass ? "pass" : "FAIL");
    std::printf("%-11s   %s\n", "", r.anchor.c_str());
    doc.push_back(verify::to_json(r));
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_text(fs::path(out) / "verify.json",
               nlohmann::json{{"suite", suite}, {"all_pass", all}, {"claims", doc}}.dump(2) + "\n");
  }
  std::printf("%s\n", all ? "all claims pass" : "some claims FAIL");
  return all ? 0 : 1;
}

int cmd_eigen_scan(int k_max, int samples, int r, int s, std::uint64_t seed,
                   const std::string& out) {
  const auto rows = verify::eigen_scan(k_max, samples, r, s, seed);
  std::vector<std::vector<double>> table;
  bool ok = true;
  for (const auto& row : rows) {
    table.push_back({static_cast<double>(row.k), row.bound, row.worst_lambda_min,
                     row.max_lambda_max});
    ok = ok && row.worst_lambda_min >= row.bound - 1e-9 && row.max_lambda_max <= 2.0 + 1e-9;
  }
  fs::path path = out.empty() ? fs::path("eigen_scan.csv") : fs::path(out);
  if (fs::is_directory(path)) path /= "eigen_scan.csv";
  write_csv(path,
            {{"r", std::to_string(r)}, {"s", std::to_string(s)},
             {"samples", std::to_string(samples)}, {"seed", std::to_string(seed)}},
            {"k", "bound", "worst_lambda_min", "max_lambda_max"}, table);
  std::printf("k=1..%d, %d unit output layers each: bounds %s\nwrote %s\n", k_max, samples,
              ok ? "hold" : "VIOLATED", path.string().c_str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning a one-hidden-layer CNN with a shared filter"};
  app.require_subcommand(1);

  std::string config, seed_list, out = "results";
  long seeds = 0;
  int jobs = 1;
  CLI::App* run = app.add_subcommand("run", "run the three-stage learner over seeds");
  run->add_option("--config", config, "experiment INI file")->check(CLI::ExistingFile);
  auto* seeds_opt = run->add_option("--seeds", seeds, "use seeds 1..N")->check(CLI::PositiveNumber);
  run->add_option("--seed-list", seed_list, "explicit seeds, e.g. 1,2,7-9")->excludes(seeds_opt);
  run->add_option("--out", out, "output directory");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string suite = "all", verify_out;
  CLI::App* ver = app.add_subcommand("verify", "numerically check the supporting claims");
  ver->add_option("--suite", suite, "switch|unbiased|eigen|gershgorin|lossgap|landscape|all");
  ver->add_option("--out", verify_out, "directory for verify.json");

  int k_max = 64, samples = 100, r = 3, s = 2;
  std::uint64_t scan_seed = 1;
  std::string scan_out;
  CLI::App* scan = app.add_subcommand("eigen-scan", "spectral extremes of P^a per k");
  scan->add_option("--k-max", k_max)->check(CLI::PositiveNumber);
  scan->add_option("--samples", samples)->check(CLI::PositiveNumber);
  scan->add_option("--r", r);
  scan->add_option("--s", s);
  scan->add_option("--seed", scan_seed);
  scan->add_option("--out", scan_out, "CSV path or directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, seeds, seed_list, out, jobs);
    if (*ver) return cmd_verify(suite, verify_out);
    if (*scan) return cmd_eigen_scan(k_max, samples, r, s, scan_seed, scan_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
