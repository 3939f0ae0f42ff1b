// Copyright 2026 The filterlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "filterlearn/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "filterlearn/errors.hpp"

namespace filterlearn {
namespace {

using Vec = std::vector<double>;

TEST(Spearman, HandExamples) {
  const Vec x{1, 2, 3, 4, 5};
  EXPECT_EQ(spearman(x, x), 1.0);
  Vec rev(x.rbegin(), x.rend());
  EXPECT_EQ(spearman(x, rev), -1.0);
  // 1 - 6 * 2 / (3 * 8) = 0.5
  EXPECT_NEAR(spearman(Vec{1, 2, 3}, Vec{1, 3, 2}), 0.5, 1e-12);
}

TEST(Spearman, TiesGetAverageRanks) {
  EXPECT_EQ(fractional_ranks(Vec{10, 20, 20, 5}), (Vec{2, 3.5, 3.5, 1}));
  EXPECT_EQ(fractional_ranks(Vec{1, 1, 1}), (Vec{2, 2, 2}));
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(30), y(30), x3(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = u(rng);
      y[i] = x[i] + u(rng);
      x3[i] = x[i] * x[i] * x[i];
    }
    EXPECT_NEAR(spearman(x, y), spearman(x3, y), 1e-12);
    EXPECT_NEAR(spearman(x, y), spearman(y, x), 1e-15);
    EXPECT_NEAR(pearson(x, y), pearson(y, x), 1e-15);
  }
}

TEST(Spearman, DegenerateAndMismatched) {
  EXPECT_THROW(spearman(Vec{1, 1, 1}, Vec{1, 2, 3}), DegenerateInputError);
  EXPECT_THROW(spearman(Vec{1, 2}, Vec{1, 2, 3}), ArgumentError);
  EXPECT_THROW(spearman(Vec{1}, Vec{1}), ArgumentError);
}

TEST(Pearson, AffineInvariance) {
  const Vec x{0.3, -1.0, 2.5, 7.0};
  Vec y;
  for (double v : x) y.push_back(2 * v + 1);
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-12);
  EXPECT_THROW(pearson(Vec{2, 2}, Vec{1, 3}), DegenerateInputError);
}

TEST(Rmse, HandValues) {
  const Vec x{1, 2, 3};
  EXPECT_EQ(rmse(x, x), 0.0);
  EXPECT_NEAR(rmse(Vec{0, 0}, Vec{3, 4}), std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(rmse(Vec{0, 0}, Vec{3, 4}), 3.5355, 1e-4);
}

TEST(OutlierRatio, Cases) {
  ScorePairs perfect{{1, 2, 3}, {1, 2, 3}, Vec{0.5, 0.5, 0.5}};
  EXPECT_EQ(outlier_ratio(perfect), 0.0);

  ScorePairs all_out{{4, 5}, {1, 2}, Vec{1, 1}};
  EXPECT_EQ(outlier_ratio(all_out), 1.0);

  ScorePairs mixed{{1, 5}, {0, 0}, Vec{1, 1}};
  EXPECT_EQ(outlier_ratio(mixed), 0.5);
}

TEST(OutlierRatio, FallsBackToTwiceRmse) {
  // errors {0, 0, 0, 10}: rmse = 5, threshold 10, 10 is not > 10.
  ScorePairs borderline{{0, 0, 0, 10}, {0, 0, 0, 0}, std::nullopt};
  EXPECT_EQ(outlier_ratio(borderline), 0.0);
  // errors {0 x 9, 10}: rmse = sqrt(10), threshold ~6.32.
  ScorePairs one{{0, 0, 0, 0, 0, 0, 0, 0, 0, 10}, Vec(10, 0.0), std::nullopt};
  EXPECT_EQ(outlier_ratio(one), 0.1);
}

TEST(Retrieval, PerfectRankings) {
  std::vector<RankedResult> results{{1, {1, 1, 2, 3}}, {2, {2, 2, 1, 3}}, {3, {3, 1, 2}}};
  EXPECT_EQ(precision_at_1(results), 1.0);
  EXPECT_EQ(mean_reciprocal_rank(results), 1.0);
  EXPECT_EQ(mean_average_precision(results), 1.0);
}

TEST(Retrieval, HandAveragePrecision) {
  const std::vector<RankedResult> results{{7, {7, 3, 7, 4}}};
  EXPECT_NEAR(mean_average_precision(results), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(mean_reciprocal_rank(results), 1.0);
  EXPECT_EQ(precision_at_1(results), 1.0);
}

TEST(Retrieval, FirstRelevantAtRankTwo) {
  const std::vector<RankedResult> results{{1, {2, 1, 3}}};
  EXPECT_EQ(mean_reciprocal_rank(results), 0.5);
  EXPECT_EQ(precision_at_1(results), 0.0);
}

TEST(Retrieval, BoundsAndEqualityCondition) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> labels{0, 0, 1, 1, 1, 2, 2, 3};
    std::shuffle(labels.begin(), labels.end(), rng);
    const RankedResult r{1, labels};
    const double ap = average_precision(r);
    EXPECT_GT(ap, 0.0);
    EXPECT_LE(ap, 1.0);
    // AP == 1 exactly when all relevant items lead.
    const bool leading = std::all_of(labels.begin(), labels.begin() + 3, [](int l) { return l == 1; });
    EXPECT_EQ(ap == 1.0, leading);
  }
}

TEST(Retrieval, QueryClassWithoutRelevantItemsThrows) {
  const std::vector<RankedResult> results{{9, {1, 2, 3}}};
  EXPECT_THROW(mean_average_precision(results), ArgumentError);
  EXPECT_THROW(precision_at_1(std::vector<RankedResult>{{1, {}}}), ArgumentError);
}

}  // namespace
}  // namespace filterlearn
