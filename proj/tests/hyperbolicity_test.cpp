// Copyright 2026 The hglove Authors. All Rights Reserved.
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

#include "hglove/hyperbolicity.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "hglove/manifold.hpp"
#include "test_util.hpp"

namespace hglove {
namespace {

FourTupleDistances from_points(const std::array<std::array<double, 2>, 4>& p) {
  const auto d = [&](int a, int b) { return std::hypot(p[a][0] - p[b][0], p[a][1] - p[b][1]); };
  return {d(0, 1), d(2, 3), d(0, 2), d(1, 3), d(0, 3), d(1, 2)};
}

TEST(TupleDelta, Examples) {
  EXPECT_EQ(tuple_delta({1, 1, 2, 2, 3, 1}), 0.0);  // 0, 1, 2, 3 on a line
  const double s2 = std::numbers::sqrt2;
  const auto square = from_points({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  EXPECT_NEAR(tuple_delta(square), s2 - 1.0, 1e-12);
  EXPECT_NEAR(s2 - 1.0, 0.414214, 1e-6);
  EXPECT_EQ(tuple_delta(from_points({{{0, 0}, {0, 0}, {1, 0}, {2, 0}}})), 0.0);
  EXPECT_EQ(tuple_delta({0, 0, 0, 0, 0, 0}), 0.0);
}

TEST(TupleDelta, RelabelingInvariance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    std::array<std::array<double, 2>, 4> p;
    for (auto& q : p) q = {u(rng), u(rng)};
    const double ref = tuple_delta(from_points(p));
    std::array<int, 4> perm{0, 1, 2, 3};
    int count = 0;
    do {
      ASSERT_EQ(tuple_delta(from_points({p[perm[0]], p[perm[1]], p[perm[2]], p[perm[3]]})), ref);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    ASSERT_EQ(count, 24);
  }
}

TEST(InducedDistance, Examples) {
  const double e = std::numbers::e;
  // Words 0 and 1 with X_01 = 1; word 2 pads the row sums to e.
  const CoocMatrix m(3, {{0, 1, 1.0}, {0, 2, e - 1.0}, {1, 2, e - 1.0}});
  ASSERT_NEAR(m.row_sum(0), e, 1e-15);
  std::size_t clamps = 0;
  EXPECT_NEAR(*induced_distance(0, 1, m, HFunction::square(), Smoothing::none, &clamps), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(clamps, 0u);

  const CoocMatrix single(2, {{0, 1, 1.0}});
  EXPECT_EQ(*induced_distance(0, 1, single, HFunction::square(), Smoothing::none, &clamps), 0.0);
  EXPECT_EQ(clamps, 0u);

  // log(X_i X_j / X_ij) = 0.5 < 1 = cosh^2(0).
  const double x = std::exp(0.5);
  const CoocMatrix half(2, {{0, 1, x}});
  EXPECT_EQ(*induced_distance(0, 1, half, HFunction::cosh_pow(2), Smoothing::none, &clamps), 0.0);
  EXPECT_EQ(clamps, 1u);

  const CoocMatrix sparse(3, {{0, 1, 2.0}, {1, 2, 3.0}});
  EXPECT_FALSE(induced_distance(0, 2, sparse, HFunction::square(), Smoothing::none));
  const auto smoothed = induced_distance(0, 2, sparse, HFunction::square(), Smoothing::plus_one);
  ASSERT_TRUE(smoothed);
  EXPECT_NEAR(*smoothed, std::sqrt(std::log(3.0) + std::log(4.0)), 1e-12);
  EXPECT_EQ(*induced_distance(1, 1, sparse, HFunction::square(), Smoothing::none), 0.0);
  EXPECT_NEAR(*induced_distance(0, 1, sparse, HFunction::log(), Smoothing::none),
              std::exp(std::log(2.0) + std::log(5.0) - std::log(2.0)), 1e-12);
}

TEST(EstimateDelta, StarTreeIsZero) {
  // Hub 0 and leaves 1..5 with unit edges.
  const auto star = [](std::size_t i, std::size_t j, std::size_t&) -> std::optional<double> {
    if (i == j) return 0.0;
    return (i == 0 || j == 0) ? 1.0 : 2.0;
  };
  DeltaOptions opt;
  opt.n_tuples = 20000;
  opt.n_pairs = 20000;
  const auto est = estimate_delta(6, star, opt);
  EXPECT_EQ(est.delta_avg, 0.0);
  EXPECT_EQ(est.delta_max, 0.0);
  EXPECT_EQ(est.n_samples, 20000u);
  EXPECT_GT(est.d_avg, 1.0);
  EXPECT_EQ(est.ratio, 0.0);
}

TEST(EstimateDelta, PoincareDiskBound) {
  std::mt19937_64 rng(2);
  std::vector<Vector> pts;
  for (int n = 0; n < 2000; ++n) pts.push_back(testing::random_ball_point(rng, 2, 0.95));
  const auto dist = [&](std::size_t i, std::size_t j, std::size_t&) -> std::optional<double> {
    return ball_distance(pts[i], pts[j]);
  };
  DeltaOptions opt;
  opt.n_tuples = 50000;
  opt.n_pairs = 10000;
  opt.threads = 4;
  const auto est = estimate_delta(pts.size(), dist, opt);
  EXPECT_LE(est.delta_max, std::log(1.0 + std::numbers::sqrt2) + 0.05);
  EXPECT_GT(est.delta_avg, 0.0);
}

TEST(EstimateDelta, ScalingDeterminismAndThreads) {
  std::mt19937_64 rng(3);
  std::vector<Vector> pts;
  for (int n = 0; n < 300; ++n) pts.push_back(testing::random_ball_point(rng, 2, 0.9));
  const auto make = [&](double c) {
    return [&, c](std::size_t i, std::size_t j, std::size_t&) -> std::optional<double> {
      return c * ball_distance(pts[i], pts[j]);
    };
  };
  DeltaOptions opt;
  opt.n_tuples = 10000;
  opt.n_pairs = 10000;
  opt.batch = 1000;
  const auto base = estimate_delta(pts.size(), make(1.0), opt);
  for (double c : {0.25, 2.0, 8.0}) {
    const auto scaled = estimate_delta(pts.size(), make(c), opt);
    EXPECT_EQ(scaled.delta_avg, c * base.delta_avg);
    EXPECT_EQ(scaled.d_avg, c * base.d_avg);
    EXPECT_EQ(scaled.ratio, base.ratio);
  }
  const auto odd = estimate_delta(pts.size(), make(3.0), opt);
  EXPECT_NEAR(odd.ratio, base.ratio, 1e-12);

  const auto again = estimate_delta(pts.size(), make(1.0), opt);
  EXPECT_EQ(again.delta_avg, base.delta_avg);
  EXPECT_EQ(again.d_avg, base.d_avg);
  opt.threads = 3;
  const auto threaded = estimate_delta(pts.size(), make(1.0), opt);
  EXPECT_EQ(threaded.delta_avg, base.delta_avg);
  EXPECT_EQ(threaded.d_avg, base.d_avg);
  opt.seed = 77;
  EXPECT_NE(estimate_delta(pts.size(), make(1.0), opt).delta_avg, base.delta_avg);
}

TEST(EstimateDelta, RejectsUndefinedAndSmallSpaces) {
  const auto path3 = [](std::size_t i, std::size_t j, std::size_t&) -> std::optional<double> {
    return std::abs(static_cast<double>(i) - static_cast<double>(j));
  };
  EXPECT_THROW(estimate_delta(3, path3, DeltaOptions{}), StructuralError);

  // Only pairs of even ids are defined: no tuple of distinct points works.
  const auto even = [](std::size_t i, std::size_t j, std::size_t&) -> std::optional<double> {
    if ((i % 2) != 0 || (j % 2) != 0) return std::nullopt;
    return 1.0;
  };
  DeltaOptions opt;
  opt.n_tuples = 100;
  opt.n_pairs = 100;
  EXPECT_THROW(estimate_delta(5, even, opt), DataError);

  const CoocMatrix m(5, {{0, 1, 2.0}, {0, 2, 1.0}, {0, 3, 4.0}, {1, 2, 1.5}, {1, 3, 1.0}, {2, 3, 3.0},
                         {0, 4, 1.0}});
  InducedMetric metric{&m, HFunction::cosh_pow(2), Smoothing::none, 0};
  const auto est = estimate_delta(metric, opt);
  EXPECT_EQ(est.n_samples, 100u);
  EXPECT_GT(est.rejected, 0u);
  metric.max_words = 4;
  EXPECT_EQ(estimate_delta(metric, opt).rejected, 0u);
}

}  // namespace
}  // namespace hglove
