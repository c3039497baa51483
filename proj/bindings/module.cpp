// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ordo/dataset_io.hpp"
#include "ordo/error.hpp"
#include "ordo/metrics.hpp"
#include "ordo/ordering.hpp"
#include "ordo/scaling.hpp"

namespace py = pybind11;

namespace {

ordo::Direction direction_of(bool descending) {
  return descending ? ordo::Direction::Descending : ordo::Direction::Ascending;
}

ordo::OrderingPlan plan_of(std::vector<std::size_t> permutation) {
  ordo::OrderingPlan plan;
  plan.strategy = ordo::Strategy::External;
  plan.permutation = std::move(permutation);
  return plan;
}

ordo::ScalingConstants constants_of(const py::dict& d) {
  ordo::ScalingConstants c;
  c.A = d["A"].cast<double>();
  c.B = d["B"].cast<double>();
  c.E = d["E"].cast<double>();
  c.alpha = d["alpha"].cast<double>();
  c.beta = d["beta"].cast<double>();
  return c;
}

std::vector<ordo::ScalingObservation> observations_of(
    const std::vector<std::tuple<double, double, double>>& rows) {
  std::vector<ordo::ScalingObservation> obs;
  obs.reserve(rows.size());
  for (const auto& [n, d, l] : rows) obs.push_back({n, d, l});
  return obs;
}

py::dict fit_result_dict(const ordo::FitResult& r) {
  py::dict out;
  out["A"] = r.constants.A;
  out["B"] = r.constants.B;
  out["E"] = r.constants.E;
  out["alpha"] = r.constants.alpha;
  out["beta"] = r.constants.beta;
  py::dict init;
  init["a"] = r.init.a;
  init["b"] = r.init.b;
  init["e"] = r.init.e;
  init["alpha"] = r.init.alpha;
  init["beta"] = r.init.beta;
  out["init"] = init;
  out["iterations"] = r.iterations;
  out["objective"] = r.objective;
  out["converged"] = r.converged;
  return out;
}

}  // namespace

PYBIND11_MODULE(_ordo, m) {
  m.doc() = "deterministic corpus ordering and scaling-law toolkit";

  py::register_exception<ordo::Error>(m, "Error");

  // ordering
  m.def(
      "rank_by_score",
      [](const std::vector<double>& scores, bool descending) {
        return ordo::rank_scores(scores, direction_of(descending)).order;
      },
      py::arg("scores"), py::arg("descending") = false,
      "Stable rank of sample indices by score; ties keep original order.");
  m.def(
      "select_top_k",
      [](const std::vector<double>& scores, double ratio) {
        return ordo::select_top_k(ordo::rank_scores(scores, ordo::Direction::Descending), ratio);
      },
      py::arg("scores"), py::arg("ratio"),
      "Indices of the floor(ratio * n) highest-scored samples.");
  m.def(
      "cl_order",
      [](const std::vector<double>& scores) {
        return ordo::cl_order(ordo::rank_scores(scores, ordo::Direction::Ascending)).permutation;
      },
      py::arg("scores"));
  m.def(
      "seg_order",
      [](const std::vector<double>& scores, const std::vector<std::pair<double, double>>& intervals,
         std::uint64_t seed, bool allow_gaps) {
        std::vector<ordo::PercentileInterval> ivs;
        ivs.reserve(intervals.size());
        for (const auto& [a, b] : intervals) ivs.push_back({a, b});
        return ordo::seg_order(ordo::rank_scores(scores, ordo::Direction::Descending), ivs, seed,
                               allow_gaps)
            .permutation;
      },
      py::arg("scores"), py::arg("intervals"), py::arg("seed") = 0, py::arg("allow_gaps") = false);
  m.def(
      "fold_order",
      [](const std::vector<double>& scores, std::size_t layers) {
        return ordo::fold_order(ordo::rank_scores(scores, ordo::Direction::Ascending), layers)
            .permutation;
      },
      py::arg("scores"), py::arg("layers"));
  m.def(
      "zigzag_order",
      [](const std::vector<double>& scores, std::size_t layers) {
        return ordo::zigzag_order(ordo::rank_scores(scores, ordo::Direction::Ascending), layers)
            .permutation;
      },
      py::arg("scores"), py::arg("layers"));
  m.def(
      "jitter",
      [](const std::vector<std::size_t>& permutation, std::size_t window, std::uint64_t seed) {
        return ordo::jitter(plan_of(permutation), window, seed).permutation;
      },
      py::arg("permutation"), py::arg("window"), py::arg("seed") = 0);
  m.def(
      "cross_order",
      [](const std::vector<double>& scores, const std::vector<std::size_t>& splits,
         std::size_t radius, std::size_t layers, const std::string& mode, std::size_t jit_window,
         std::uint64_t seed) {
        ordo::CrossConfig cfg;
        cfg.split_points = splits;
        cfg.radius = radius;
        cfg.folding_layers = layers;
        cfg.jit_window = jit_window;
        if (mode == "saw") {
          cfg.mode = ordo::CrossMode::Saw;
        } else if (mode == "str") {
          cfg.mode = ordo::CrossMode::Stair;
        } else {
          throw ordo::Error(ordo::ErrorCode::InvalidCrossConfig, "mode must be 'str' or 'saw'");
        }
        return ordo::cross_order(ordo::rank_scores(scores, ordo::Direction::Ascending), cfg, seed)
            .permutation;
      },
      py::arg("scores"), py::arg("splits"), py::arg("radius"), py::arg("layers") = 2,
      py::arg("mode") = "str", py::arg("jit_window") = 0, py::arg("seed") = 0);
  m.def(
      "random_order",
      [](std::size_t n, std::uint64_t seed) { return ordo::random_order(n, seed).permutation; },
      py::arg("n"), py::arg("seed") = 0);
  m.def(
      "validate_permutation",
      [](const std::vector<std::size_t>& permutation, std::size_t n) {
        const auto v = ordo::validate_plan(permutation, n);
        return py::make_tuple(v.ok, v.message);
      },
      py::arg("permutation"), py::arg("n"), "Returns (ok, message).");

  // metrics
  m.def(
      "trajectory",
      [](const std::vector<std::size_t>& permutation, const std::vector<double>& scores) {
        std::vector<std::pair<std::size_t, double>> out;
        for (const auto& p : ordo::trajectory(plan_of(permutation), scores)) {
          out.emplace_back(p.position, p.score);
        }
        return out;
      },
      py::arg("permutation"), py::arg("scores"));
  m.def(
      "continuity_stats",
      [](const std::vector<std::size_t>& permutation, const std::vector<double>& scores) {
        const auto s = ordo::continuity_stats(plan_of(permutation), scores);
        py::dict out;
        out["mean_abs_gap"] = s.mean_abs_gap;
        out["max_gap"] = s.max_gap;
        return out;
      },
      py::arg("permutation"), py::arg("scores"));
  m.def(
      "local_diversity",
      [](const std::vector<std::size_t>& permutation, const std::vector<double>& scores,
         std::size_t window) {
        const auto s = ordo::local_diversity(plan_of(permutation), scores, window);
        py::dict out;
        out["window"] = s.window;
        out["mean_window_stddev"] = s.mean_window_stddev;
        return out;
      },
      py::arg("permutation"), py::arg("scores"), py::arg("window"));
  m.def(
      "boundary_profile",
      [](const std::vector<std::size_t>& permutation, const std::vector<double>& scores,
         double fraction) {
        const auto s = ordo::boundary_profile(plan_of(permutation), scores, fraction);
        py::dict out;
        out["fraction"] = s.fraction;
        out["head_mean"] = s.head_mean;
        out["tail_mean"] = s.tail_mean;
        return out;
      },
      py::arg("permutation"), py::arg("scores"), py::arg("fraction"));
  m.def(
      "cycle_coverage",
      [](const std::vector<std::size_t>& permutation, const std::vector<double>& scores,
         std::size_t layers) {
        std::vector<std::tuple<std::size_t, double, double>> out;
        for (const auto& c : ordo::cycle_coverage(plan_of(permutation), scores, layers)) {
          out.emplace_back(c.chunk, c.min_score, c.max_score);
        }
        return out;
      },
      py::arg("permutation"), py::arg("scores"), py::arg("layers"),
      "Per-chunk (index, min score, max score).");

  // scaling law
  m.def("huber", &ordo::huber, py::arg("residual"), py::arg("delta"));
  m.def(
      "predict_loss",
      [](const py::dict& constants, double n_params, double tokens) {
        return ordo::predict_loss(constants_of(constants), n_params, tokens);
      },
      py::arg("constants"), py::arg("n_params"), py::arg("tokens"));
  m.def(
      "fit_data_scaling",
      [](const std::vector<std::tuple<double, double, double>>& rows) {
        const auto fit = ordo::fit_data_scaling(observations_of(rows));
        py::dict out;
        out["e_prime"] = fit.e_prime;
        out["b0"] = fit.b0;
        out["beta0"] = fit.beta0;
        out["n_params"] = fit.n_params;
        return out;
      },
      py::arg("observations"));
  m.def(
      "fit_model_scaling",
      [](const std::vector<std::pair<double, double>>& points) {
        const auto fit = ordo::fit_model_scaling(points);
        py::dict out;
        out["e0"] = fit.e0;
        out["a0"] = fit.a0;
        out["alpha0"] = fit.alpha0;
        return out;
      },
      py::arg("points"));
  m.def(
      "fit_scaling",
      [](const std::vector<std::tuple<double, double, double>>& rows, double delta, double step,
         std::size_t max_iterations, double tol) {
        ordo::FitConfig cfg;
        cfg.huber_delta = delta;
        cfg.step_size = step;
        cfg.max_iterations = max_iterations;
        cfg.convergence_tol = tol;
        return fit_result_dict(ordo::fit_scaling_pipeline(observations_of(rows), cfg));
      },
      py::arg("observations"), py::arg("delta") = 1e-3, py::arg("step") = 0.05,
      py::arg("max_iterations") = 50000, py::arg("tol") = 1e-10,
      "Two-stage initialization followed by the joint Huber/LSE fit.");
  m.def(
      "r_squared_data",
      [](const std::vector<std::tuple<double, double, double>>& rows, const py::dict& constants) {
        return ordo::r_squared_data(observations_of(rows), constants_of(constants));
      },
      py::arg("observations"), py::arg("constants"));
  m.def(
      "r_squared_model",
      [](const std::vector<std::tuple<double, double, double>>& rows, const py::dict& constants) {
        return ordo::r_squared_model(observations_of(rows), constants_of(constants));
      },
      py::arg("observations"), py::arg("constants"));

  // dataset io
  m.def(
      "load_scored_jsonl",
      [](const std::filesystem::path& path, const std::string& score_field) {
        const auto corpus = ordo::load_scored_jsonl(path, score_field);
        std::vector<std::pair<std::string, double>> out;
        out.reserve(corpus.samples.size());
        for (const auto& s : corpus.samples) out.emplace_back(s.id, s.score);
        return out;
      },
      py::arg("path"), py::arg("score_field") = "score", "Returns [(id, score), ...] in file order.");
  m.def(
      "export_permutation",
      [](const std::vector<std::size_t>& permutation, const std::filesystem::path& path,
         const std::string& format) {
        ordo::export_permutation(plan_of(permutation), path,
                                 format == "binary" ? ordo::PermFormat::Binary
                                                    : ordo::PermFormat::Text);
      },
      py::arg("permutation"), py::arg("path"), py::arg("format") = "text");
  m.def(
      "import_permutation",
      [](const std::filesystem::path& path) { return ordo::import_permutation(path).permutation; },
      py::arg("path"));
  m.def(
      "reorder_jsonl",
      [](const std::filesystem::path& input, const std::vector<std::size_t>& permutation,
         const std::filesystem::path& output, const std::string& score_field) {
        const auto corpus = ordo::load_scored_jsonl(input, score_field);
        ordo::materialize(corpus.handle, plan_of(permutation), output);
      },
      py::arg("input"), py::arg("permutation"), py::arg("output"), py::arg("score_field") = "score",
      "Stream records of `input` into `output` in permutation order.");
}
