// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "ordo/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ordo/error.hpp"
#include "ordo/rng.hpp"

namespace ordo {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

void require_direction(const RankIndex& rank, Direction expected, const char* op) {
  if (rank.direction != expected) {
    std::string msg = std::string(op) + " requires a" +
                      (expected == Direction::Ascending ? "n ascending" : " descending") +
                      " rank";
    throw Error(ErrorCode::DirectionMismatch, msg);
  }
}

void require_nonempty(const RankIndex& rank) {
  if (rank.n == 0 || rank.order.empty()) throw Error(ErrorCode::EmptyCorpus, "rank over empty corpus");
  if (rank.order.size() != rank.n) throw Error(ErrorCode::DimensionError, "rank order/n mismatch");
}

RankIndex rank_impl(std::span<const double> scores, Direction direction,
                    const std::vector<std::string>* ids) {
  const std::size_t n = scores.size();
  if (n == 0) throw Error(ErrorCode::EmptyCorpus, "cannot rank an empty corpus");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(scores[i])) {
      const std::string who = ids ? (*ids)[i] : std::to_string(i);
      throw Error(ErrorCode::InvalidScore, "non-finite score for sample '" + who + "'");
    }
  }
  RankIndex rank;
  rank.direction = direction;
  rank.n = n;
  rank.order.resize(n);
  std::iota(rank.order.begin(), rank.order.end(), std::size_t{0});
  if (direction == Direction::Ascending) {
    std::stable_sort(rank.order.begin(), rank.order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  } else {
    std::stable_sort(rank.order.begin(), rank.order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  }
  return rank;
}

// Local fold/zig-zag order of [0, len): cycle l holds indices congruent to l
// modulo layers; odd cycles run high-to-low when reverse_odd is set.
void strided_positions(std::size_t len, std::size_t layers, bool reverse_odd,
                       std::vector<std::size_t>& out) {
  for (std::size_t l = 0; l < layers && l < len; ++l) {
    if (!reverse_odd || l % 2 == 0) {
      for (std::size_t i = l; i < len; i += layers) out.push_back(i);
    } else {
      const std::size_t last = l + ((len - 1 - l) / layers) * layers;
      for (std::size_t i = last;; i -= layers) {
        out.push_back(i);
        if (i == l) break;
      }
    }
  }
}

OrderingPlan strided_plan(const RankIndex& rank, std::size_t layers, bool reverse_odd,
                          Strategy strategy) {
  require_nonempty(rank);
  require_direction(rank, Direction::Ascending, strategy_name(strategy));
  if (layers < 1 || layers > rank.n) {
    throw Error(ErrorCode::InvalidLayerCount,
                "layers must be in [1, " + std::to_string(rank.n) + "], got " + std::to_string(layers));
  }
  std::vector<std::size_t> positions;
  positions.reserve(rank.n);
  strided_positions(rank.n, layers, reverse_odd, positions);

  OrderingPlan plan;
  plan.strategy = strategy;
  plan.params["layers"] = std::to_string(layers);
  plan.permutation.reserve(rank.n);
  for (std::size_t p : positions) plan.permutation.push_back(rank.order[p]);
  return plan;
}

}  // namespace

RankIndex rank_by_score(std::span<const ScoredSample> samples, Direction direction) {
  std::vector<double> scores;
  std::vector<std::string> ids;
  scores.reserve(samples.size());
  ids.reserve(samples.size());
  for (const auto& s : samples) {
    scores.push_back(s.score);
    ids.push_back(s.id);
  }
  return rank_impl(scores, direction, &ids);
}

RankIndex rank_scores(std::span<const double> scores, Direction direction) {
  return rank_impl(scores, direction, nullptr);
}

std::vector<std::size_t> select_top_k(const RankIndex& rank, double ratio) {
  require_nonempty(rank);
  require_direction(rank, Direction::Descending, "select_top_k");
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw Error(ErrorCode::InvalidRatio, "selection ratio must be in (0, 1], got " + fmt_double(ratio));
  }
  const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rank.n)));
  if (k == 0) throw Error(ErrorCode::EmptySelection, "floor(ratio * n) is zero");
  return {rank.order.begin(), rank.order.begin() + static_cast<std::ptrdiff_t>(k)};
}

OrderingPlan cl_order(const RankIndex& rank) {
  require_nonempty(rank);
  require_direction(rank, Direction::Ascending, "cl_order");
  OrderingPlan plan;
  plan.strategy = Strategy::CL;
  plan.permutation = rank.order;
  return plan;
}

OrderingPlan seg_order(const RankIndex& rank, std::span<const PercentileInterval> intervals,
                       std::uint64_t seed, bool allow_gaps, std::vector<std::string>* warnings) {
  require_nonempty(rank);
  require_direction(rank, Direction::Descending, "seg_order");
  if (intervals.empty()) throw Error(ErrorCode::InvalidInterval, "no percentile intervals given");

  const std::size_t n = rank.n;
  const auto to_rank = [n](double p) {
    return static_cast<std::size_t>(std::floor(p * static_cast<double>(n)));
  };

  // Discretized half-open rank range per interval.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(intervals.size());
  std::string intervals_param;
  for (std::size_t l = 0; l < intervals.size(); ++l) {
    const auto& iv = intervals[l];
    if (!(iv.p_start >= 0.0) || !(iv.p_end <= 1.0) || !(iv.p_start < iv.p_end)) {
      throw Error(ErrorCode::InvalidInterval,
                  "interval " + std::to_string(l) + " must satisfy 0 <= start < end <= 1");
    }
    const std::size_t lo = to_rank(iv.p_start);
    const std::size_t hi = std::min(to_rank(iv.p_end), n);
    ranges.emplace_back(lo, hi);
    if (lo >= hi && warnings) {
      warnings->push_back("EmptySegment: interval " + std::to_string(l) + " [" +
                          fmt_double(iv.p_start) + ", " + fmt_double(iv.p_end) +
                          ") holds no samples after discretization");
    }
    if (!intervals_param.empty()) intervals_param += ',';
    intervals_param += fmt_double(iv.p_start) + "-" + fmt_double(iv.p_end);
  }

  SplitMix64 rng(seed);
  std::vector<std::vector<std::size_t>> segments(intervals.size());
  std::vector<std::size_t> candidates;
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < n; ++r) {
    candidates.clear();
    for (std::size_t l = 0; l < ranges.size(); ++l) {
      if (r >= ranges[l].first && r < ranges[l].second) candidates.push_back(l);
    }
    if (candidates.empty()) {
      if (allow_gaps) {
        ++dropped;
        continue;
      }
      throw Error(ErrorCode::UncoveredInterval,
                  "descending rank " + std::to_string(r) + " (percentile " +
                      fmt_double(static_cast<double>(r) / static_cast<double>(n)) +
                      ") is covered by no interval");
    }
    const std::size_t pick =
        candidates.size() == 1 ? candidates[0] : candidates[rng.below(candidates.size())];
    segments[pick].push_back(rank.order[r]);
  }

  OrderingPlan plan;
  plan.strategy = Strategy::SEG;
  plan.seed = seed;
  plan.params["intervals"] = intervals_param;
  if (allow_gaps) plan.params["allow_gaps"] = "true";
  plan.permutation.reserve(n - dropped);
  std::string sizes_param;
  for (auto& segment : segments) {
    fisher_yates(segment.begin(), segment.end(), rng);
    plan.permutation.insert(plan.permutation.end(), segment.begin(), segment.end());
    if (!sizes_param.empty()) sizes_param += ',';
    sizes_param += std::to_string(segment.size());
  }
  plan.params["segment_sizes"] = sizes_param;
  return plan;
}

OrderingPlan fold_order(const RankIndex& rank, std::size_t layers) {
  return strided_plan(rank, layers, /*reverse_odd=*/false, Strategy::FO);
}

OrderingPlan zigzag_order(const RankIndex& rank, std::size_t layers) {
  return strided_plan(rank, layers, /*reverse_odd=*/true, Strategy::ZIG);
}

OrderingPlan jitter(const OrderingPlan& plan, std::size_t window, std::uint64_t seed) {
  if (window < 1) throw Error(ErrorCode::InvalidWindow, "jitter window must be >= 1");
  OrderingPlan out;
  out.strategy = Strategy::JIT;
  out.seed = seed;
  out.params = plan.params;
  out.params["base"] = strategy_name(plan.strategy);
  out.params["window"] = std::to_string(window);
  out.permutation = plan.permutation;

  SplitMix64 rng(seed);
  const std::size_t n = out.permutation.size();
  for (std::size_t lo = 0; lo < n; lo += window) {
    const std::size_t hi = std::min(lo + window, n);
    fisher_yates(out.permutation.begin() + static_cast<std::ptrdiff_t>(lo),
                 out.permutation.begin() + static_cast<std::ptrdiff_t>(hi), rng);
  }
  return out;
}

OrderingPlan cross_order(const RankIndex& rank, const CrossConfig& cfg, std::uint64_t seed) {
  require_nonempty(rank);
  require_direction(rank, Direction::Ascending, "cross_order");
  const std::size_t n = rank.n;
  const auto& splits = cfg.split_points;

  if (splits.empty()) {
    throw Error(ErrorCode::InvalidCrossConfig, "at least one split point required (K >= 2)");
  }
  if (cfg.radius < 1) throw Error(ErrorCode::InvalidCrossConfig, "radius must be positive");
  for (std::size_t l = 0; l < splits.size(); ++l) {
    if (splits[l] == 0 || splits[l] >= n) {
      throw Error(ErrorCode::InvalidCrossConfig, "split points must lie in (0, n)");
    }
    if (l > 0 && splits[l] <= splits[l - 1]) {
      throw Error(ErrorCode::InvalidCrossConfig, "split points must be strictly increasing");
    }
    if (l > 0 && splits[l] - splits[l - 1] <= 2 * cfg.radius) {
      throw Error(ErrorCode::InvalidCrossConfig,
                  "consecutive split points must be more than 2*radius apart");
    }
  }
  if (splits.front() < cfg.radius) {
    throw Error(ErrorCode::InvalidCrossConfig, "first split point minus radius underflows");
  }
  if (splits.back() + cfg.radius > n) {
    throw Error(ErrorCode::InvalidCrossConfig, "last split point plus radius exceeds n");
  }
  const std::size_t transition_len = 2 * cfg.radius;
  if (cfg.folding_layers < 1 || cfg.folding_layers > transition_len) {
    throw Error(ErrorCode::InvalidLayerCount,
                "transition region of size " + std::to_string(transition_len) +
                    " cannot hold " + std::to_string(cfg.folding_layers) + " layers");
  }

  const bool saw = cfg.mode == CrossMode::Saw;
  std::vector<std::size_t> positions;
  positions.reserve(n);
  std::vector<std::size_t> local;
  std::size_t cursor = 0;
  for (std::size_t l = 0; l < splits.size(); ++l) {
    const std::size_t t_lo = splits[l] - cfg.radius;
    const std::size_t t_hi = splits[l] + cfg.radius;
    for (std::size_t i = cursor; i < t_lo; ++i) positions.push_back(i);  // stable region
    local.clear();
    strided_positions(transition_len, cfg.folding_layers, saw, local);
    for (std::size_t p : local) positions.push_back(t_lo + p);
    cursor = t_hi;
  }
  for (std::size_t i = cursor; i < n; ++i) positions.push_back(i);  // final stable region

  OrderingPlan plan;
  plan.strategy = saw ? Strategy::SAW : Strategy::STR;
  {
    std::string s;
    for (std::size_t p : splits) {
      if (!s.empty()) s += ',';
      s += std::to_string(p);
    }
    plan.params["splits"] = s;
  }
  plan.params["radius"] = std::to_string(cfg.radius);
  plan.params["layers"] = std::to_string(cfg.folding_layers);
  plan.params["jit_window"] = std::to_string(cfg.jit_window);
  plan.permutation.reserve(n);
  for (std::size_t p : positions) plan.permutation.push_back(rank.order[p]);

  if (cfg.jit_window > 0) {
    OrderingPlan jittered = jitter(plan, cfg.jit_window, seed);
    jittered.strategy = plan.strategy;
    jittered.params = plan.params;
    jittered.seed = seed;
    return jittered;
  }
  plan.seed = seed;
  return plan;
}

OrderingPlan random_order(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::EmptyCorpus, "cannot order an empty corpus");
  OrderingPlan plan;
  plan.strategy = Strategy::Random;
  plan.seed = seed;
  plan.permutation.resize(n);
  std::iota(plan.permutation.begin(), plan.permutation.end(), std::size_t{0});
  SplitMix64 rng(seed);
  fisher_yates(plan.permutation.begin(), plan.permutation.end(), rng);
  return plan;
}

PlanValidation validate_plan(std::span<const std::size_t> permutation, std::size_t n) {
  PlanValidation result;
  if (permutation.size() != n) {
    result.ok = false;
    result.message = "length " + std::to_string(permutation.size()) + " differs from n = " +
                     std::to_string(n);
    return result;
  }
  std::vector<bool> seen(n, false);
  for (std::size_t v : permutation) {
    if (v >= n) {
      result.ok = false;
      if (!result.first_duplicate && result.message.empty()) {
        result.message = "index " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")";
      }
      continue;
    }
    if (seen[v]) {
      result.ok = false;
      if (!result.first_duplicate) result.first_duplicate = v;
    }
    seen[v] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) {
      result.ok = false;
      result.first_missing = i;
      break;
    }
  }
  if (!result.ok && result.message.empty()) {
    result.message = "not a bijection";
    if (result.first_duplicate) result.message += "; duplicate " + std::to_string(*result.first_duplicate);
    if (result.first_missing) result.message += "; missing " + std::to_string(*result.first_missing);
  }
  return result;
}

}  // namespace ordo
