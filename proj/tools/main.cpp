// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// ordo — reorder scored JSONL corpora, report ordering diagnostics, and fit
// loss scaling curves. Exit codes: 0 success, 1 data error, 2 usage error.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ordo/dataset_io.hpp"
#include "ordo/error.hpp"
#include "ordo/metrics.hpp"
#include "ordo/ordering.hpp"
#include "ordo/scaling.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

int usage_error(const std::string& message) {
  std::cerr << "usage error: " << message << "\n";
  return kExitUsage;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("ORDO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ordo::Error(ordo::ErrorCode::ParseError,
                        std::string("ORDO_SEED is not a 64-bit unsigned integer: '") + env + "'");
    }
  }
  return 0;
}

std::vector<ordo::PercentileInterval> parse_intervals(const std::string& text) {
  std::vector<ordo::PercentileInterval> intervals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      throw ordo::Error(ordo::ErrorCode::InvalidInterval,
                        "interval '" + item + "' is not of the form start-end");
    }
    try {
      intervals.push_back({std::stod(item.substr(0, dash)), std::stod(item.substr(dash + 1))});
    } catch (const std::exception&) {
      throw ordo::Error(ordo::ErrorCode::InvalidInterval, "cannot parse interval '" + item + "'");
    }
  }
  return intervals;
}

std::vector<std::size_t> parse_splits(const std::string& text) {
  std::vector<std::size_t> splits;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      splits.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ordo::Error(ordo::ErrorCode::ParseError, "cannot parse split point '" + item + "'");
    }
  }
  return splits;
}

struct OrderArgs {
  std::string input;
  std::string strategy;
  std::string score_field = "score";
  std::size_t layers = 2;
  bool layers_set = false;
  std::string intervals;
  bool allow_gaps = false;
  std::size_t sections = 4;
  std::string splits;
  std::size_t radius = 0;
  bool radius_set = false;
  std::optional<std::uint64_t> jit_window;
  bool jit_default = false;
  std::optional<std::uint64_t> seed;
  std::string out_perm;
  std::string perm_format = "text";
  std::string materialize_out;
};

// Window used when --jit is passed without an explicit --jit-window.
std::size_t default_jit_window(const std::string& strategy) {
  if (strategy == "fo") return 50000;
  return 5000;
}

int run_order(const OrderArgs& args) {
  if (args.out_perm.empty() && args.materialize_out.empty()) {
    return usage_error("order needs --out-perm and/or --materialize");
  }
  if (args.allow_gaps && args.strategy != "seg") {
    return usage_error("--allow-gaps only applies to --strategy seg");
  }
  if (args.allow_gaps && !args.materialize_out.empty()) {
    return usage_error("--allow-gaps plans drop samples and cannot be materialized");
  }
  if (!args.intervals.empty() && args.strategy != "seg") {
    return usage_error("--intervals only applies to --strategy seg");
  }
  if (args.strategy == "seg" && args.intervals.empty()) {
    return usage_error("--strategy seg requires --intervals");
  }
  const bool cross = args.strategy == "str" || args.strategy == "saw";
  if (!cross && (!args.splits.empty() || args.radius_set)) {
    return usage_error("--splits/--radius only apply to str/saw");
  }
  if (args.layers_set && (args.strategy == "cl" || args.strategy == "seg" || args.strategy == "random")) {
    return usage_error("--layers does not apply to --strategy " + args.strategy);
  }
  if (args.jit_default && args.jit_window) {
    return usage_error("--jit and --jit-window are mutually exclusive");
  }

  const std::uint64_t seed = resolve_seed(args.seed);
  const auto corpus = ordo::load_scored_jsonl(args.input, args.score_field);
  const std::size_t n = corpus.handle.n;

  ordo::OrderingPlan plan;
  std::vector<std::string> warnings;
  if (args.strategy == "cl") {
    plan = ordo::cl_order(ordo::rank_by_score(corpus.samples, ordo::Direction::Ascending));
  } else if (args.strategy == "seg") {
    plan = ordo::seg_order(ordo::rank_by_score(corpus.samples, ordo::Direction::Descending),
                           parse_intervals(args.intervals), seed, args.allow_gaps, &warnings);
  } else if (args.strategy == "fo") {
    plan = ordo::fold_order(ordo::rank_by_score(corpus.samples, ordo::Direction::Ascending),
                            args.layers);
  } else if (args.strategy == "zig") {
    plan = ordo::zigzag_order(ordo::rank_by_score(corpus.samples, ordo::Direction::Ascending),
                              args.layers);
  } else if (args.strategy == "random") {
    plan = ordo::random_order(n, seed);
  } else if (cross) {
    ordo::CrossConfig cfg;
    cfg.mode = args.strategy == "saw" ? ordo::CrossMode::Saw : ordo::CrossMode::Stair;
    cfg.folding_layers = args.layers;
    if (!args.splits.empty()) {
      cfg.split_points = parse_splits(args.splits);
    } else {
      for (std::size_t l = 1; l < args.sections; ++l) {
        cfg.split_points.push_back(l * n / args.sections);
      }
    }
    cfg.radius = args.radius_set ? args.radius
                                 : std::max<std::size_t>(1, n / (4 * cfg.section_count()));
    cfg.jit_window = args.jit_window ? static_cast<std::size_t>(*args.jit_window) : 5000;
    if (args.jit_default) cfg.jit_window = 5000;
    plan = ordo::cross_order(ordo::rank_by_score(corpus.samples, ordo::Direction::Ascending), cfg,
                             seed);
  } else {
    return usage_error("unknown strategy '" + args.strategy + "'");
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  // Trailing jitter pass for the plain strategies.
  if (!cross) {
    std::size_t window = 0;
    if (args.jit_window) window = static_cast<std::size_t>(*args.jit_window);
    if (args.jit_default) window = default_jit_window(args.strategy);
    if (window > 0) plan = ordo::jitter(plan, window, seed);
  }

  if (!args.out_perm.empty()) {
    const auto format =
        args.perm_format == "binary" ? ordo::PermFormat::Binary : ordo::PermFormat::Text;
    ordo::export_permutation(plan, args.out_perm, format);
    std::cout << "wrote permutation: " << args.out_perm << " (" << plan.permutation.size()
              << " indices, " << args.perm_format << ")\n";
  }
  if (!args.materialize_out.empty()) {
    ordo::materialize(corpus.handle, plan, args.materialize_out);
    std::cout << "materialized: " << args.materialize_out << " (+ manifest)\n";
  } else if (!args.out_perm.empty()) {
    const auto manifest = ordo::make_manifest(corpus.handle, plan);
    const std::string manifest_path = args.out_perm + ".manifest.json";
    std::ofstream mout(manifest_path, std::ios::binary);
    if (!mout) throw ordo::Error(ordo::ErrorCode::IoError, "cannot write '" + manifest_path + "'");
    mout << ordo::manifest_to_json(manifest);
    std::cout << "wrote manifest: " << manifest_path << "\n";
  }
  return kExitOk;
}

struct MetricsArgs {
  std::string input;
  std::string score_field = "score";
  std::string perm;
  std::size_t window = 1000;
  double fraction = 0.1;
  std::size_t layers = 2;
  std::string csv_out;
  std::string summary_csv;
};

int run_metrics(const MetricsArgs& args) {
  const auto corpus = ordo::load_scored_jsonl(args.input, args.score_field);
  std::vector<double> scores;
  scores.reserve(corpus.samples.size());
  for (const auto& s : corpus.samples) scores.push_back(s.score);

  ordo::OrderingPlan plan;
  if (!args.perm.empty()) {
    plan = ordo::import_permutation(args.perm);
  } else {
    plan.permutation.resize(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) plan.permutation[i] = i;
  }

  const std::size_t window = std::min(args.window, scores.size());
  const auto traj = ordo::trajectory(plan, scores);
  const auto continuity = ordo::continuity_stats(plan, scores);
  const auto diversity = ordo::local_diversity(plan, scores, std::max<std::size_t>(window, 1));
  const auto boundary = ordo::boundary_profile(plan, scores, args.fraction);
  const auto coverage = ordo::cycle_coverage(plan, scores, args.layers);

  std::cout << "n: " << scores.size() << "\n"
            << "continuity mean_abs_gap: " << continuity.mean_abs_gap << "\n"
            << "continuity max_gap: " << continuity.max_gap << "\n"
            << "diversity window: " << diversity.window << "\n"
            << "diversity mean_window_stddev: " << diversity.mean_window_stddev << "\n"
            << "boundary fraction: " << boundary.fraction << "\n"
            << "boundary head_mean: " << boundary.head_mean << "\n"
            << "boundary tail_mean: " << boundary.tail_mean << "\n";
  for (const auto& chunk : coverage) {
    std::cout << "coverage chunk " << chunk.chunk << ": min " << chunk.min_score << " max "
              << chunk.max_score << "\n";
  }

  if (!args.csv_out.empty()) {
    std::ofstream out(args.csv_out, std::ios::binary);
    if (!out) throw ordo::Error(ordo::ErrorCode::IoError, "cannot write '" + args.csv_out + "'");
    out << "position,score\n";
    for (const auto& point : traj) out << point.position << ',' << point.score << '\n';
    std::cout << "wrote trajectory: " << args.csv_out << "\n";
  }
  if (!args.summary_csv.empty()) {
    std::ofstream out(args.summary_csv, std::ios::binary);
    if (!out) throw ordo::Error(ordo::ErrorCode::IoError, "cannot write '" + args.summary_csv + "'");
    out << "metric,value\n";
    out << "continuity_mean_abs_gap," << continuity.mean_abs_gap << '\n';
    out << "continuity_max_gap," << continuity.max_gap << '\n';
    out << "diversity_window," << diversity.window << '\n';
    out << "diversity_mean_window_stddev," << diversity.mean_window_stddev << '\n';
    out << "boundary_fraction," << boundary.fraction << '\n';
    out << "boundary_head_mean," << boundary.head_mean << '\n';
    out << "boundary_tail_mean," << boundary.tail_mean << '\n';
    for (const auto& chunk : coverage) {
      out << "coverage_chunk_" << chunk.chunk << "_min," << chunk.min_score << '\n';
      out << "coverage_chunk_" << chunk.chunk << "_max," << chunk.max_score << '\n';
    }
    std::cout << "wrote metrics table: " << args.summary_csv << "\n";
  }
  return kExitOk;
}

std::vector<ordo::ScalingObservation> load_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ordo::Error(ordo::ErrorCode::IoError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw ordo::Error(ordo::ErrorCode::ParseError, "'" + path + "' is empty");
  }
  auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.erase(0, 1);
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
        cell.pop_back();
      }
      cells.push_back(cell);
    }
    return cells;
  };

  const auto header = split(line);
  int col_n = -1, col_d = -1, col_l = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "n_params") col_n = static_cast<int>(i);
    if (header[i] == "tokens") col_d = static_cast<int>(i);
    if (header[i] == "loss") col_l = static_cast<int>(i);
  }
  if (col_n < 0 || col_d < 0 || col_l < 0) {
    throw ordo::Error(ordo::ErrorCode::ParseError,
                      "header must contain n_params, tokens, and loss columns");
  }

  std::vector<ordo::ScalingObservation> obs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    const auto max_col = static_cast<std::size_t>(std::max({col_n, col_d, col_l}));
    if (cells.size() <= max_col) {
      throw ordo::Error(ordo::ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": too few columns");
    }
    try {
      obs.push_back({std::stod(cells[static_cast<std::size_t>(col_n)]),
                     std::stod(cells[static_cast<std::size_t>(col_d)]),
                     std::stod(cells[static_cast<std::size_t>(col_l)])});
    } catch (const std::exception&) {
      throw ordo::Error(ordo::ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": non-numeric cell");
    }
  }
  return obs;
}

nlohmann::ordered_json fit_result_json(const ordo::FitResult& result) {
  nlohmann::ordered_json doc;
  doc["A"] = result.constants.A;
  doc["B"] = result.constants.B;
  doc["E"] = result.constants.E;
  doc["alpha"] = result.constants.alpha;
  doc["beta"] = result.constants.beta;
  doc["init"] = {{"a", result.init.a},
                 {"b", result.init.b},
                 {"e", result.init.e},
                 {"alpha", result.init.alpha},
                 {"beta", result.init.beta}};
  doc["iterations"] = result.iterations;
  doc["objective"] = result.objective;
  doc["converged"] = result.converged;
  return doc;
}

struct FitArgs {
  std::string input;
  double delta = 1e-3;
  double step = 0.05;
  std::size_t max_iter = 50000;
  double tol = 1e-10;
  std::string json_out;
};

int run_fit_scaling(const FitArgs& args) {
  const auto obs = load_observations_csv(args.input);
  ordo::FitConfig cfg;
  cfg.huber_delta = args.delta;
  cfg.step_size = args.step;
  cfg.max_iterations = args.max_iter;
  cfg.convergence_tol = args.tol;

  auto emit = [&](const ordo::FitResult& result) {
    if (!args.json_out.empty()) {
      std::ofstream out(args.json_out, std::ios::binary);
      if (!out) throw ordo::Error(ordo::ErrorCode::IoError, "cannot write '" + args.json_out + "'");
      out << fit_result_json(result).dump(2) << "\n";
      std::cout << "wrote constants: " << args.json_out << "\n";
    }
  };

  ordo::FitResult result;
  try {
    result = ordo::fit_scaling_pipeline(obs, cfg);
  } catch (const ordo::ScalingConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (best-so-far written with converged=false)\n";
    emit(e.best());
    return kExitData;
  }

  std::printf("A      %.6g\nB      %.6g\nE      %.6g\nalpha  %.6g\nbeta   %.6g\n",
              result.constants.A, result.constants.B, result.constants.E, result.constants.alpha,
              result.constants.beta);
  std::printf("iterations %zu, objective %.6e\n", result.iterations, result.objective);

  std::printf("%-14s %-10s %s\n", "n_params", "points", "R^2(data)");
  for (const auto& group : ordo::group_by_model_size(obs)) {
    try {
      const double r2 = ordo::r_squared_data(group, result.constants);
      std::printf("%-14.6g %-10zu %.6f\n", group.front().n_params, group.size(), r2);
    } catch (const ordo::Error&) {
      std::printf("%-14.6g %-10zu (not computable)\n", group.front().n_params, group.size());
    }
  }
  emit(result);
  return kExitOk;
}

struct PredictArgs {
  std::string constants_path;
  double n_params = 0.0;
  double tokens = 0.0;
};

int run_predict(const PredictArgs& args) {
  std::ifstream in(args.constants_path);
  if (!in) return usage_error("cannot open constants file '" + args.constants_path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    return usage_error("malformed constants JSON: " + std::string(e.what()));
  }
  ordo::ScalingConstants constants;
  try {
    constants.A = doc.at("A").get<double>();
    constants.B = doc.at("B").get<double>();
    constants.E = doc.at("E").get<double>();
    constants.alpha = doc.at("alpha").get<double>();
    constants.beta = doc.at("beta").get<double>();
  } catch (const nlohmann::json::exception&) {
    return usage_error("constants JSON must define A, B, E, alpha, beta");
  }
  std::printf("%.4g\n", ordo::predict_loss(constants, args.n_params, args.tokens));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic corpus ordering and scaling-law toolkit"};
  app.require_subcommand(1);

  OrderArgs order_args;
  auto* order = app.add_subcommand("order", "reorder a scored JSONL corpus");
  order->add_option("input", order_args.input, "scored JSONL corpus")->required();
  order->add_option("--strategy", order_args.strategy, "ordering strategy")
      ->required()
      ->check(CLI::IsMember({"cl", "seg", "fo", "zig", "str", "saw", "random"}));
  order->add_option("--score-field", order_args.score_field, "JSON field holding the score");
  order->add_option("--layers", order_args.layers, "folding layers L (typical: 2,3,4,5,20,100)")
      ->check(CLI::PositiveNumber);
  order->add_option("--intervals", order_args.intervals,
                    "seg percentile intervals, e.g. 0-0.1,0.1-1");
  order->add_flag("--allow-gaps", order_args.allow_gaps,
                  "drop samples not covered by any seg interval");
  order->add_option("--sections", order_args.sections,
                    "str/saw section count when --splits is omitted")
      ->check(CLI::Range(static_cast<std::size_t>(2), static_cast<std::size_t>(1) << 32));
  order->add_option("--splits", order_args.splits, "str/saw split points, e.g. 1000,2000");
  order->add_option("--radius", order_args.radius, "str/saw transition radius");
  order->add_option("--jit-window", order_args.jit_window,
                    "jitter window (0 disables; str/saw default 5000)");
  order->add_flag("--jit", order_args.jit_default,
                  "jitter with the per-strategy default window (cl/zig 5000, fo 50000)");
  order->add_option("--seed", order_args.seed, "64-bit seed (default: $ORDO_SEED or 0)");
  order->add_option("--out-perm", order_args.out_perm, "write the permutation here");
  order->add_option("--perm-format", order_args.perm_format, "permutation file format")
      ->check(CLI::IsMember({"text", "binary"}));
  order->add_option("--materialize", order_args.materialize_out, "write the reordered corpus here");

  MetricsArgs metrics_args;
  auto* metrics = app.add_subcommand("metrics", "ordering diagnostics for a corpus + permutation");
  metrics->add_option("input", metrics_args.input, "scored JSONL corpus")->required();
  metrics->add_option("--score-field", metrics_args.score_field, "JSON field holding the score");
  metrics->add_option("--perm", metrics_args.perm, "permutation file (default: identity)");
  metrics->add_option("--window", metrics_args.window, "diversity window")->check(CLI::PositiveNumber);
  metrics->add_option("--fraction", metrics_args.fraction, "boundary fraction in (0, 0.5]");
  metrics->add_option("--layers", metrics_args.layers, "coverage chunk count")
      ->check(CLI::PositiveNumber);
  metrics->add_option("--csv-out", metrics_args.csv_out, "trajectory CSV output");
  metrics->add_option("--summary-csv", metrics_args.summary_csv, "metric table CSV output");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit-scaling", "fit loss scaling constants from observations");
  fit->add_option("input", fit_args.input, "CSV with n_params,tokens,loss columns")->required();
  fit->add_option("--delta", fit_args.delta, "huber delta")->check(CLI::PositiveNumber);
  fit->add_option("--step", fit_args.step, "initial optimizer step size")->check(CLI::PositiveNumber);
  fit->add_option("--max-iter", fit_args.max_iter, "iteration cap")->check(CLI::PositiveNumber);
  fit->add_option("--tol", fit_args.tol, "convergence tolerance")->check(CLI::PositiveNumber);
  fit->add_option("--json-out", fit_args.json_out, "constants JSON output");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "evaluate fitted constants at (N, D)");
  predict->add_option("--constants", predict_args.constants_path, "constants JSON")->required();
  predict->add_option("--n", predict_args.n_params, "model parameter count")->required();
  predict->add_option("--d", predict_args.tokens, "trained token count")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (order->parsed()) {
      order_args.layers_set = order->count("--layers") > 0;
      order_args.radius_set = order->count("--radius") > 0;
      return run_order(order_args);
    }
    if (metrics->parsed()) return run_metrics(metrics_args);
    if (fit->parsed()) return run_fit_scaling(fit_args);
    if (predict->parsed()) return run_predict(predict_args);
  } catch (const ordo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
