// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ordo {

/// Byte range of one record inside its source file.
struct RecordSpan {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  friend bool operator==(const RecordSpan&, const RecordSpan&) = default;
};

/// Record payload: either a span into the source file or inline text.
using PayloadRef = std::variant<RecordSpan, std::string>;

/// One corpus record with its precomputed scalar score.
struct ScoredSample {
  std::string id;
  double score = 0.0;
  PayloadRef payload = RecordSpan{};
  std::optional<std::uint64_t> token_count;
};

enum class Direction { Ascending, Descending };

/// Permutation of [0, N) ordering samples by score.
///
/// order[r] is the original sample index holding rank r. Ties are broken by
/// ascending original index, so equal inputs produce identical ranks on any
/// conforming implementation.
struct RankIndex {
  std::vector<std::size_t> order;
  Direction direction = Direction::Ascending;
  std::size_t n = 0;
};

enum class Strategy { CL, SEG, FO, ZIG, JIT, STR, SAW, Random, External };

constexpr const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::CL: return "cl";
    case Strategy::SEG: return "seg";
    case Strategy::FO: return "fo";
    case Strategy::ZIG: return "zig";
    case Strategy::JIT: return "jit";
    case Strategy::STR: return "str";
    case Strategy::SAW: return "saw";
    case Strategy::Random: return "random";
    case Strategy::External: return "external";
  }
  return "unknown";
}

/// A strategy-tagged permutation: permutation[i] is the original sample index
/// placed at output position i. Equal (strategy, params, seed, input scores)
/// always reproduce the identical permutation.
struct OrderingPlan {
  Strategy strategy = Strategy::External;
  std::vector<std::size_t> permutation;
  std::map<std::string, std::string> params;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return permutation.size(); }
};

/// Half-open percentile interval [p_start, p_end) over descending-score rank;
/// percentile 0 is the highest-scored sample.
struct PercentileInterval {
  double p_start = 0.0;
  double p_end = 1.0;
};

enum class CrossMode { Stair, Saw };

/// Parameters for the cross-guidance orderings (stair / saw).
///
/// split_points are strictly increasing positions in (0, N); around each one a
/// transition region of the given radius is folded (Stair) or zig-zagged
/// (Saw) with folding_layers cycles. jit_window == 0 disables the final
/// windowed shuffle.
struct CrossConfig {
  std::vector<std::size_t> split_points;
  std::size_t radius = 1;
  std::size_t folding_layers = 2;
  CrossMode mode = CrossMode::Stair;
  std::size_t jit_window = 0;

  std::size_t section_count() const { return split_points.size() + 1; }
};

}  // namespace ordo
