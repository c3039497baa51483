// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ordo/types.hpp"

namespace ordo {

/// Stable sort of samples by score. Ties keep ascending original-index order.
/// Throws EmptyCorpus for empty input and InvalidScore on NaN/infinite scores.
RankIndex rank_by_score(std::span<const ScoredSample> samples, Direction direction);

/// Same as rank_by_score but over a bare score vector.
RankIndex rank_scores(std::span<const double> scores, Direction direction);

/// Top-K selection: K = floor(ratio * N) highest-scored sample indices, in
/// descending rank order. Requires a descending rank.
std::vector<std::size_t> select_top_k(const RankIndex& rank, double ratio);

/// Ascending-score curriculum: the permutation is the ascending rank order.
OrderingPlan cl_order(const RankIndex& rank);

/// Percentile-segment ordering: partition descending ranks into the given
/// interval segments, shuffle each segment, concatenate in interval order.
///
/// A rank covered by several intervals is assigned to one of them uniformly
/// at random. A rank covered by none is a hard UncoveredInterval error unless
/// allow_gaps is set, in which case the sample is dropped and the plan
/// shrinks to the retained subset. Intervals that discretize to an empty rank
/// range are reported through `warnings` when provided.
///
/// PRNG stream order (part of the reproducibility contract): one SplitMix64
/// seeded with `seed`; first a pass over descending ranks 0..N-1 drawing
/// below(#candidates) only for multiply-covered ranks, then one Fisher-Yates
/// per segment in interval order.
OrderingPlan seg_order(const RankIndex& rank, std::span<const PercentileInterval> intervals,
                       std::uint64_t seed, bool allow_gaps = false,
                       std::vector<std::string>* warnings = nullptr);

/// Strided folding: cycle l collects ascending ranks congruent to l modulo
/// layers, cycles concatenated in order. layers must be in [1, N].
OrderingPlan fold_order(const RankIndex& rank, std::size_t layers);

/// Folding with every odd-indexed cycle reversed, yielding a triangle-wave
/// score trajectory.
OrderingPlan zigzag_order(const RankIndex& rank, std::size_t layers);

/// Windowed local shuffle: positions are cut into contiguous buckets of size
/// `window` (last bucket may be short) and each bucket is Fisher-Yates
/// shuffled independently; bucket order is preserved.
OrderingPlan jitter(const OrderingPlan& plan, std::size_t window, std::uint64_t seed);

/// Stair/saw cross ordering: monotone stable regions between split points,
/// fold_order (Stair) or zigzag_order (Saw) inside each radius-wide
/// transition region, then an optional trailing jitter pass.
OrderingPlan cross_order(const RankIndex& rank, const CrossConfig& cfg, std::uint64_t seed);

/// Seeded full shuffle of [0, n) — the random baseline.
OrderingPlan random_order(std::size_t n, std::uint64_t seed);

/// Outcome of a bijection check. Reports the first duplicated and the first
/// missing index when the permutation is not a bijection on [0, n).
struct PlanValidation {
  bool ok = true;
  std::optional<std::size_t> first_duplicate;
  std::optional<std::size_t> first_missing;
  std::string message;
};

PlanValidation validate_plan(std::span<const std::size_t> permutation, std::size_t n);

inline PlanValidation validate_plan(const OrderingPlan& plan, std::size_t n) {
  return validate_plan(std::span<const std::size_t>(plan.permutation), n);
}

}  // namespace ordo
