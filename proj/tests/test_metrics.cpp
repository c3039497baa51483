// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "ordo/error.hpp"
#include "ordo/metrics.hpp"
#include "ordo/ordering.hpp"
#include "ordo/rng.hpp"

using ordo::Direction;
using ordo::ErrorCode;

namespace {

std::vector<double> ranks(std::size_t n) {
  std::vector<double> s(n);
  std::iota(s.begin(), s.end(), 0.0);
  return s;
}

ordo::OrderingPlan identity_plan(std::size_t n) {
  ordo::OrderingPlan plan;
  plan.permutation.resize(n);
  std::iota(plan.permutation.begin(), plan.permutation.end(), std::size_t{0});
  return plan;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ordo::Error& e) {
    return e.code();
  }
  FAIL("expected an ordo::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("trajectory reads scores through the permutation") {
  SUBCASE("cl on [3,1,2] is the sorted trajectory") {
    const std::vector<double> scores{3, 1, 2};
    const auto plan = ordo::cl_order(ordo::rank_scores(scores, Direction::Ascending));
    const auto traj = ordo::trajectory(plan, scores);
    REQUIRE(traj.size() == 3);
    CHECK(traj[0].position == 0);
    CHECK(traj[0].score == 1.0);
    CHECK(traj[1].score == 2.0);
    CHECK(traj[2].score == 3.0);
  }
  SUBCASE("identity plan keeps file order") {
    const std::vector<double> scores{5, 4, 9};
    const auto traj = ordo::trajectory(identity_plan(3), scores);
    CHECK(traj[0].score == 5.0);
    CHECK(traj[1].score == 4.0);
    CHECK(traj[2].score == 9.0);
  }
  SUBCASE("fold-2 on ranks gives the strided trajectory") {
    const auto scores = ranks(6);
    const auto plan = ordo::fold_order(ordo::rank_scores(scores, Direction::Ascending), 2);
    const auto traj = ordo::trajectory(plan, scores);
    const std::vector<double> expected{0, 2, 4, 1, 3, 5};
    for (std::size_t i = 0; i < 6; ++i) CHECK(traj[i].score == expected[i]);
  }
  SUBCASE("size mismatch") {
    const std::vector<double> scores{1, 2};
    CHECK(code_of([&] { ordo::trajectory(identity_plan(3), scores); }) == ErrorCode::DimensionError);
  }
}

TEST_CASE("continuity_stats over adjacent output gaps") {
  const auto scores = ranks(6);
  const auto asc = ordo::rank_scores(scores, Direction::Ascending);

  SUBCASE("cl has unit steps") {
    const auto stats = ordo::continuity_stats(ordo::cl_order(asc), scores);
    CHECK(stats.mean_abs_gap == doctest::Approx(1.0));
    CHECK(stats.max_gap == doctest::Approx(1.0));
  }
  SUBCASE("fold-2 gaps {2,2,3,2,2}") {
    const auto stats = ordo::continuity_stats(ordo::fold_order(asc, 2), scores);
    CHECK(stats.mean_abs_gap == doctest::Approx(2.2));
    CHECK(stats.max_gap == doctest::Approx(3.0));
  }
  SUBCASE("zigzag-2 gaps {2,2,1,2,2}") {
    const auto stats = ordo::continuity_stats(ordo::zigzag_order(asc, 2), scores);
    CHECK(stats.mean_abs_gap == doctest::Approx(1.8));
    CHECK(stats.max_gap == doctest::Approx(2.0));
  }
  SUBCASE("needs two samples") {
    const std::vector<double> one{1.0};
    CHECK(code_of([&] { ordo::continuity_stats(identity_plan(1), one); }) ==
          ErrorCode::DimensionError);
  }
}

TEST_CASE("local_diversity is the mean windowed population stddev") {
  SUBCASE("constant scores give zero") {
    const std::vector<double> scores(12, 3.5);
    for (std::size_t w : {std::size_t{1}, std::size_t{3}, std::size_t{12}}) {
      CHECK(ordo::local_diversity(identity_plan(12), scores, w).mean_window_stddev ==
            doctest::Approx(0.0));
    }
  }
  SUBCASE("cl on ranks 0..5 with w=2") {
    const auto scores = ranks(6);
    const auto plan = ordo::cl_order(ordo::rank_scores(scores, Direction::Ascending));
    const auto stats = ordo::local_diversity(plan, scores, 2);
    CHECK(stats.mean_window_stddev == doctest::Approx(0.5));
    CHECK(stats.window == 2);
  }
  SUBCASE("global jitter does not reduce diversity below cl") {
    const std::size_t n = 100;
    const auto scores = ranks(n);
    const auto cl = ordo::cl_order(ordo::rank_scores(scores, Direction::Ascending));
    const auto jit = ordo::jitter(cl, n, 42);
    const double base = ordo::local_diversity(cl, scores, 10).mean_window_stddev;
    const double jittered = ordo::local_diversity(jit, scores, 10).mean_window_stddev;
    CHECK(jittered >= base);
  }
  SUBCASE("shift invariance and linear scaling") {
    const std::size_t n = 40;
    ordo::SplitMix64 rng(5);
    std::vector<double> scores(n);
    for (auto& s : scores) s = static_cast<double>(rng.below(1000)) / 7.0;
    const auto plan = ordo::random_order(n, 9);
    const double base = ordo::local_diversity(plan, scores, 7).mean_window_stddev;
    std::vector<double> shifted(scores), scaled(scores);
    for (auto& s : shifted) s += 123.25;
    for (auto& s : scaled) s *= 3.0;
    CHECK(ordo::local_diversity(plan, shifted, 7).mean_window_stddev == doctest::Approx(base));
    CHECK(ordo::local_diversity(plan, scaled, 7).mean_window_stddev == doctest::Approx(3.0 * base));
  }
  SUBCASE("window bounds") {
    const auto scores = ranks(4);
    CHECK(code_of([&] { ordo::local_diversity(identity_plan(4), scores, 0); }) ==
          ErrorCode::InvalidWindow);
    CHECK(code_of([&] { ordo::local_diversity(identity_plan(4), scores, 5); }) ==
          ErrorCode::InvalidWindow);
  }
}

TEST_CASE("boundary_profile means over head and tail slices") {
  SUBCASE("cl on ranks 0..99 with q=0.1") {
    const auto scores = ranks(100);
    const auto plan = ordo::cl_order(ordo::rank_scores(scores, Direction::Ascending));
    const auto profile = ordo::boundary_profile(plan, scores, 0.1);
    CHECK(profile.head_mean == doctest::Approx(4.5));
    CHECK(profile.tail_mean == doctest::Approx(94.5));
  }
  SUBCASE("reversing the plan swaps head and tail") {
    const auto scores = ranks(50);
    auto plan = ordo::cl_order(ordo::rank_scores(scores, Direction::Ascending));
    auto reversed = plan;
    std::reverse(reversed.permutation.begin(), reversed.permutation.end());
    const auto fwd = ordo::boundary_profile(plan, scores, 0.2);
    const auto rev = ordo::boundary_profile(reversed, scores, 0.2);
    CHECK(fwd.head_mean == doctest::Approx(rev.tail_mean));
    CHECK(fwd.tail_mean == doctest::Approx(rev.head_mean));
  }
  SUBCASE("seg plan with first interval [0,0.1] has the exact top-decile head mean") {
    const std::size_t n = 200;
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = static_cast<double>(n - i);
    const auto rank = ordo::rank_scores(scores, Direction::Descending);
    const auto plan = ordo::seg_order(
        rank, std::vector<ordo::PercentileInterval>{{0.0, 0.1}, {0.1, 1.0}}, 6);
    const auto profile = ordo::boundary_profile(plan, scores, 0.1);
    double top_decile_mean = 0.0;
    for (std::size_t i = 0; i < n / 10; ++i) top_decile_mean += scores[i];
    top_decile_mean /= static_cast<double>(n / 10);
    CHECK(profile.head_mean == doctest::Approx(top_decile_mean).epsilon(1e-12));
  }
  SUBCASE("fraction bounds") {
    const auto scores = ranks(10);
    CHECK(code_of([&] { ordo::boundary_profile(identity_plan(10), scores, 0.0); }) ==
          ErrorCode::InvalidFraction);
    CHECK(code_of([&] { ordo::boundary_profile(identity_plan(10), scores, 0.6); }) ==
          ErrorCode::InvalidFraction);
    const auto tiny = ranks(3);
    CHECK(code_of([&] { ordo::boundary_profile(identity_plan(3), tiny, 0.2); }) ==
          ErrorCode::InvalidFraction);
  }
}

TEST_CASE("cycle_coverage reports per-chunk score ranges") {
  SUBCASE("fold-3 chunks each span nearly the full range") {
    const auto scores = ranks(9);
    const auto plan = ordo::fold_order(ordo::rank_scores(scores, Direction::Ascending), 3);
    const auto coverage = ordo::cycle_coverage(plan, scores, 3);
    REQUIRE(coverage.size() == 3);
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK(coverage[l].min_score == doctest::Approx(static_cast<double>(l)));
      CHECK(coverage[l].max_score == doctest::Approx(static_cast<double>(6 + l)));
    }
  }
  SUBCASE("cl chunks are disjoint") {
    const auto scores = ranks(9);
    const auto plan = ordo::cl_order(ordo::rank_scores(scores, Direction::Ascending));
    const auto coverage = ordo::cycle_coverage(plan, scores, 3);
    REQUIRE(coverage.size() == 3);
    CHECK(coverage[0].max_score < coverage[1].min_score);
    CHECK(coverage[1].max_score < coverage[2].min_score);
  }
  SUBCASE("zigzag chunks span the same ranges as fold chunks") {
    const auto scores = ranks(24);
    const auto asc = ordo::rank_scores(scores, Direction::Ascending);
    const auto fo = ordo::cycle_coverage(ordo::fold_order(asc, 2), scores, 2);
    const auto zig = ordo::cycle_coverage(ordo::zigzag_order(asc, 2), scores, 2);
    REQUIRE(fo.size() == zig.size());
    for (std::size_t i = 0; i < fo.size(); ++i) {
      CHECK(fo[i].min_score == zig[i].min_score);
      CHECK(fo[i].max_score == zig[i].max_score);
    }
  }
  SUBCASE("fold chunk span lower bound (divisible n)") {
    // every chunk spans at least range - layers * max spacing
    for (std::size_t layers : {std::size_t{2}, std::size_t{4}}) {
      const std::size_t n = 48;
      ordo::SplitMix64 rng(layers);
      std::vector<double> scores(n);
      double acc = 0.0;
      for (auto& s : scores) {
        acc += 1.0 + static_cast<double>(rng.below(100)) / 25.0;
        s = acc;
      }
      std::vector<double> sorted_scores(scores);
      std::sort(sorted_scores.begin(), sorted_scores.end());
      double max_spacing = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        max_spacing = std::max(max_spacing, sorted_scores[i + 1] - sorted_scores[i]);
      }
      const double range = sorted_scores.back() - sorted_scores.front();
      const auto plan =
          ordo::fold_order(ordo::rank_scores(scores, Direction::Ascending), layers);
      for (const auto& chunk : ordo::cycle_coverage(plan, scores, layers)) {
        CHECK(chunk.max_score - chunk.min_score >=
              range - static_cast<double>(layers) * max_spacing - 1e-9);
      }
    }
  }
  SUBCASE("layer bounds") {
    const auto scores = ranks(4);
    CHECK(code_of([&] { ordo::cycle_coverage(identity_plan(4), scores, 0); }) ==
          ErrorCode::InvalidLayerCount);
    CHECK(code_of([&] { ordo::cycle_coverage(identity_plan(4), scores, 5); }) ==
          ErrorCode::InvalidLayerCount);
  }
}
