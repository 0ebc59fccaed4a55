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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "convlearn/analysis.hpp"
#include "convlearn/data.hpp"
#include "convlearn/errors.hpp"
#include "convlearn/experiment.hpp"
#include "convlearn/model.hpp"
#include "convlearn/pipeline.hpp"
#include "convlearn/rng.hpp"
#include "convlearn/stage1.hpp"
#include "convlearn/stage2.hpp"
#include "convlearn/verify.hpp"

namespace py = pybind11;
using namespace convlearn;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::list trajectory_rows(const Trajectory& t) {
  py::list rows;
  for (const TrajectoryRecord& r : t) {
    rows.append(py::make_tuple(r.iter, r.loss_estimate, r.norm_w, r.norm_a, r.dist_plus,
                               r.dist_minus));
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "convlearn core: shared-filter CNN learner and claim checks";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<DivergedError>(m, "DivergedError", PyExc_RuntimeError);

  py::class_<PatchConfig>(m, "PatchConfig")
      .def(py::init<int, int, int, int>(), py::arg("d"), py::arg("r"), py::arg("s"), py::arg("k"))
      .def_property_readonly("d", &PatchConfig::d)
      .def_property_readonly("r", &PatchConfig::r)
      .def_property_readonly("s", &PatchConfig::s)
      .def_property_readonly("k", &PatchConfig::k)
      .def_property_readonly("large_stride", &PatchConfig::large_stride)
      .def_property_readonly("nonoverlap_size", &PatchConfig::nonoverlap_size)
      .def("__repr__", [](const PatchConfig& c) {
        return "PatchConfig(d=" + std::to_string(c.d()) + ", r=" + std::to_string(c.r()) +
               ", s=" + std::to_string(c.s()) + ", k=" + std::to_string(c.k()) + ")";
      });

  m.def("forward",
        [](const PatchConfig& cfg, double alpha, const Vector& w, const Vector& a,
           const Vector& x) { return forward(cfg, Activation(alpha), CnnParams{w, a}, x); },
        py::arg("cfg"), py::arg("alpha"), py::arg("w"), py::arg("a"), py::arg("x"));
  m.def("patch_matrix", &patch_matrix, py::arg("cfg"), py::arg("x"));
  m.def("nonoverlap_filter", &nonoverlap_filter, py::arg("cfg"), py::arg("w"));

  m.def("sample_inputs",
        [](const std::string& kind, int d, int n, std::uint64_t seed) {
          const InputDistribution dist{parse_distribution_kind(kind), d};
          Rng rng = derive_stream(seed, {0});
          Matrix out(n, d);
          for (int i = 0; i < n; ++i) out.row(i) = sample_input(dist, rng).transpose();
          return out;
        },
        py::arg("kind"), py::arg("d"), py::arg("n"), py::arg("seed") = 0);

  m.def("l_reg", &analysis::l_reg, py::arg("w"), py::arg("a"), py::arg("w_star"),
        py::arg("a_star"));
  m.def("l_reg_grad",
        [](const Vector& w, const Vector& a, const Vector& ws, const Vector& as) {
          const analysis::RegGradient g = analysis::l_reg_grad(w, a, ws, as);
          return py::make_tuple(g.grad_w, g.grad_a);
        },
        py::arg("w"), py::arg("a"), py::arg("w_star"), py::arg("a_star"));
  m.def("weighted_patch_gram",
        [](const PatchConfig& cfg, const Vector& a) {
          return analysis::weighted_patch_gram(cfg, a).matrix;
        },
        py::arg("cfg"), py::arg("a"));
  m.def("jacobi_eigenvalues", &analysis::jacobi_eigenvalues, py::arg("m"));
  m.def("lambda_lower_bound",
        [](int k) { return analysis::toeplitz_lambda_bounds(k).lower_min; }, py::arg("k"));

  m.def("double_convotron",
        [](const PatchConfig& cfg, double alpha, const Vector& w_star, const Vector& a_star,
           long T1, double eta1, std::optional<double> init_scale, double noise_scale,
           std::uint64_t seed, long record_every) {
          const Activation act(alpha);
          const GroundTruth truth = GroundTruth::from_params(w_star, a_star);
          SampleStream stream(cfg, act, truth, {DistributionKind::kRademacher, cfg.d()},
                              derive_stream(seed, {kStreamStage1Samples}));
          Rng rng = derive_stream(seed, {kStreamStage1Noise});
          Stage1Config c;
          c.T1 = T1;
          c.eta1 = eta1;
          c.init_scale = init_scale;
          c.noise_scale = noise_scale;
          c.record_every = record_every;
          Stage1Result r;
          {
            py::gil_scoped_release release;
            r = double_convotron(cfg, act, stream, c, rng, Reference{a_star});
          }
          return py::make_tuple(r.params.w_non, r.params.a, trajectory_rows(r.trajectory));
        },
        py::arg("cfg"), py::arg("alpha"), py::arg("w_star"), py::arg("a_star"),
        py::arg("T1") = Stage1Config{}.T1, py::arg("eta1") = Stage1Config{}.eta1,
        py::arg("init_scale") = py::none(), py::arg("noise_scale") = 1.0, py::arg("seed") = 1,
        py::arg("record_every") = 100,
        "Rademacher inputs; returns (w_non, a, trajectory rows).");

  m.def("run_seed",
        [](const std::string& config_text, std::uint64_t seed) {
          const ExperimentSpec spec = parse_experiment(config_text);
          SeedRun run;
          {
            py::gil_scoped_release release;
            run = run_seed(spec, seed);
          }
          ExperimentReport report;
          report.spec = spec;
          report.outcomes = {run.outcome};
          py::dict out = to_python(summary_json(report)["seeds"][0]);
          if (run.outcome.status == "ok") {
            out["w"] = run.result.params.w;
            out["a"] = run.result.params.a;
          }
          out["w_star"] = run.truth.w_star;
          out["a_star"] = run.truth.a_star;
          return out;
        },
        py::arg("config_text"), py::arg("seed"), "Run one seed; returns the summary record.");

  m.def("run_experiment",
        [](const std::string& config_text, const std::filesystem::path& out, int jobs) {
          const ExperimentSpec spec = parse_experiment(config_text);
          ExperimentReport report;
          {
            py::gil_scoped_release release;
            report = run_experiment(spec, out, jobs);
          }
          return to_python(summary_json(report));
        },
        py::arg("config_text"), py::arg("out"), py::arg("jobs") = 1);

  m.def("default_config", [] { return ExperimentSpec{}.to_ini(); });

  m.def("verify",
        [](const std::string& suite) {
          std::vector<verify::ClaimResult> results;
          {
            py::gil_scoped_release release;
            results = verify::run_suite(suite);
          }
          py::list out;
          for (const auto& r : results) out.append(to_python(verify::to_json(r)));
          return out;
        },
        py::arg("suite") = "all");

  m.def("eigen_scan",
        [](int k_max, int samples, int r, int s, std::uint64_t seed) {
          py::list out;
          for (const auto& row : verify::eigen_scan(k_max, samples, r, s, seed)) {
            out.append(py::make_tuple(row.k, row.bound, row.worst_lambda_min, row.max_lambda_max));
          }
          return out;
        },
        py::arg("k_max") = 64, py::arg("samples") = 100, py::arg("r") = 3, py::arg("s") = 2,
        py::arg("seed") = 1);
}
