// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "ordo/types.hpp"

namespace ordo {

/// One (output position, score) point of an ordered trajectory.
struct TrajectoryPoint {
  std::size_t position = 0;
  double score = 0.0;
};

/// Mean and max absolute score gap between consecutive output positions.
struct ContinuityStats {
  double mean_abs_gap = 0.0;
  double max_gap = 0.0;
};

/// Mean per-window population standard deviation of output scores.
struct DiversityStats {
  std::size_t window = 0;
  double mean_window_stddev = 0.0;
};

/// Mean score of the first and last floor(fraction * N) output positions.
struct BoundaryProfile {
  double fraction = 0.0;
  double head_mean = 0.0;
  double tail_mean = 0.0;
};

/// Score range observed in one contiguous output chunk.
struct ChunkCoverage {
  std::size_t chunk = 0;
  double min_score = 0.0;
  double max_score = 0.0;
};

std::vector<TrajectoryPoint> trajectory(const OrderingPlan& plan, std::span<const double> scores);

ContinuityStats continuity_stats(const OrderingPlan& plan, std::span<const double> scores);

DiversityStats local_diversity(const OrderingPlan& plan, std::span<const double> scores,
                               std::size_t window);

BoundaryProfile boundary_profile(const OrderingPlan& plan, std::span<const double> scores,
                                 double fraction);

/// Splits the output into `layers` contiguous chunks of size ceil(N / layers)
/// (the last may be short) and reports each chunk's score range.
std::vector<ChunkCoverage> cycle_coverage(const OrderingPlan& plan, std::span<const double> scores,
                                          std::size_t layers);

}  // namespace ordo
