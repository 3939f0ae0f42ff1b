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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace filterlearn {

struct ScorePairs {
  std::vector<double> estimated;
  std::vector<double> subjective;
  std::optional<std::vector<double>> subjective_std;

  void validate() const;
};

/// Ordered retrieval output for one query; the query itself is excluded.
struct RankedResult {
  int query_label = 0;
  std::vector<int> ranked_labels;
  std::vector<std::string> ranked_ids;  // parallel to ranked_labels when known
  std::vector<double> scores;           // similarity used for the final order
};

/// Average fractional ranks (1-based); ties share the mean of their ranks.
std::vector<double> fractional_ranks(std::span<const double> x);

/// Throws DegenerateInputError when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of fractional ranks.
double spearman(std::span<const double> x, std::span<const double> y);

double rmse(std::span<const double> x, std::span<const double> y);
double rmse(const ScorePairs& pairs);

/// Fraction of items with |estimated - subjective| > 2 * subjective_std; when
/// per-item stds are absent the threshold is 2 * rmse(pairs).
double outlier_ratio(const ScorePairs& pairs);

double precision_at_1(std::span<const RankedResult> results);
double mean_reciprocal_rank(std::span<const RankedResult> results);
double average_precision(const RankedResult& result);
double mean_average_precision(std::span<const RankedResult> results);

struct RetrievalMetrics {
  double precision_at_1 = 0.0;
  double mrr = 0.0;
  double map = 0.0;
};

RetrievalMetrics retrieval_metrics(std::span<const RankedResult> results);

}  // namespace filterlearn
