// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "ordo/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ordo/error.hpp"

namespace ordo {

namespace {

// Scores in output order. All metrics read the corpus through the plan, so a
// size mismatch is caught here once.
std::vector<double> ordered_scores(const OrderingPlan& plan, std::span<const double> scores) {
  if (plan.permutation.size() != scores.size()) {
    throw Error(ErrorCode::DimensionError,
                "plan length " + std::to_string(plan.permutation.size()) +
                    " does not match corpus size " + std::to_string(scores.size()));
  }
  std::vector<double> out;
  out.reserve(scores.size());
  for (std::size_t idx : plan.permutation) {
    if (idx >= scores.size()) {
      throw Error(ErrorCode::DimensionError, "plan index " + std::to_string(idx) + " out of range");
    }
    out.push_back(scores[idx]);
  }
  return out;
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double population_stddev(std::span<const double> v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

std::vector<TrajectoryPoint> trajectory(const OrderingPlan& plan, std::span<const double> scores) {
  const auto ordered = ordered_scores(plan, scores);
  std::vector<TrajectoryPoint> points;
  points.reserve(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) points.push_back({i, ordered[i]});
  return points;
}

ContinuityStats continuity_stats(const OrderingPlan& plan, std::span<const double> scores) {
  const auto ordered = ordered_scores(plan, scores);
  if (ordered.size() < 2) {
    throw Error(ErrorCode::DimensionError, "continuity needs at least two samples");
  }
  ContinuityStats stats;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
    const double gap = std::abs(ordered[i + 1] - ordered[i]);
    sum += gap;
    stats.max_gap = std::max(stats.max_gap, gap);
  }
  stats.mean_abs_gap = sum / static_cast<double>(ordered.size() - 1);
  return stats;
}

DiversityStats local_diversity(const OrderingPlan& plan, std::span<const double> scores,
                               std::size_t window) {
  const auto ordered = ordered_scores(plan, scores);
  if (window < 1 || window > ordered.size()) {
    throw Error(ErrorCode::InvalidWindow,
                "diversity window must be in [1, " + std::to_string(ordered.size()) + "]");
  }
  double sum = 0.0;
  std::size_t buckets = 0;
  for (std::size_t lo = 0; lo < ordered.size(); lo += window) {
    const std::size_t hi = std::min(lo + window, ordered.size());
    sum += population_stddev(std::span<const double>(ordered).subspan(lo, hi - lo));
    ++buckets;
  }
  return {window, sum / static_cast<double>(buckets)};
}

BoundaryProfile boundary_profile(const OrderingPlan& plan, std::span<const double> scores,
                                 double fraction) {
  const auto ordered = ordered_scores(plan, scores);
  if (!(fraction > 0.0) || fraction > 0.5) {
    throw Error(ErrorCode::InvalidFraction, "boundary fraction must be in (0, 0.5]");
  }
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ordered.size())));
  if (k < 1) {
    throw Error(ErrorCode::InvalidFraction, "floor(fraction * n) must be at least 1");
  }
  const std::span<const double> all(ordered);
  return {fraction, mean_of(all.subspan(0, k)), mean_of(all.subspan(ordered.size() - k, k))};
}

std::vector<ChunkCoverage> cycle_coverage(const OrderingPlan& plan, std::span<const double> scores,
                                          std::size_t layers) {
  const auto ordered = ordered_scores(plan, scores);
  if (layers < 1 || layers > ordered.size()) {
    throw Error(ErrorCode::InvalidLayerCount,
                "chunk count must be in [1, " + std::to_string(ordered.size()) + "]");
  }
  const std::size_t chunk_size = (ordered.size() + layers - 1) / layers;
  std::vector<ChunkCoverage> coverage;
  std::size_t chunk = 0;
  for (std::size_t lo = 0; lo < ordered.size(); lo += chunk_size, ++chunk) {
    const std::size_t hi = std::min(lo + chunk_size, ordered.size());
    const auto [mn, mx] = std::minmax_element(ordered.begin() + static_cast<std::ptrdiff_t>(lo),
                                              ordered.begin() + static_cast<std::ptrdiff_t>(hi));
    coverage.push_back({chunk, *mn, *mx});
  }
  return coverage;
}

}  // namespace ordo
