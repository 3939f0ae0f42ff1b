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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "filterlearn/errors.hpp"

namespace filterlearn {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* who) {
  if (x.size() != y.size()) throw ArgumentError(std::string(who) + ": length mismatch");
  if (x.size() < 2) throw ArgumentError(std::string(who) + ": need at least 2 values");
}

void check_results(std::span<const RankedResult> results, const char* who) {
  if (results.empty()) throw ArgumentError(std::string(who) + ": no queries");
  for (const RankedResult& r : results) {
    if (r.ranked_labels.empty()) throw ArgumentError(std::string(who) + ": empty ranking");
    if (std::find(r.ranked_labels.begin(), r.ranked_labels.end(), r.query_label) ==
        r.ranked_labels.end())
      throw ArgumentError(std::string(who) + ": query class has no relevant items");
  }
}

}  // namespace

void ScorePairs::validate() const {
  check_pair(estimated, subjective, "ScorePairs");
  if (subjective_std && subjective_std->size() != estimated.size())
    throw ArgumentError("ScorePairs: subjective_std length mismatch");
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // positions i..j-1 hold ties; 1-based mean rank.
    const double rank = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "pearson");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("correlation of a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "spearman");
  const std::vector<double> rx = fractional_ranks(x);
  const std::vector<double> ry = fractional_ranks(y);
  return pearson(rx, ry);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double rmse(const ScorePairs& pairs) {
  pairs.validate();
  return rmse(pairs.estimated, pairs.subjective);
}

double outlier_ratio(const ScorePairs& pairs) {
  pairs.validate();
  const std::size_t n = pairs.estimated.size();
  const double fallback = 2.0 * rmse(pairs);
  std::size_t outliers = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double threshold = pairs.subjective_std ? 2.0 * (*pairs.subjective_std)[i] : fallback;
    if (std::abs(pairs.estimated[i] - pairs.subjective[i]) > threshold) ++outliers;
  }
  return static_cast<double>(outliers) / static_cast<double>(n);
}

double precision_at_1(std::span<const RankedResult> results) {
  check_results(results, "precision_at_1");
  double hits = 0.0;
  for (const RankedResult& r : results) hits += r.ranked_labels.front() == r.query_label ? 1.0 : 0.0;
  return hits / static_cast<double>(results.size());
}

double mean_reciprocal_rank(std::span<const RankedResult> results) {
  check_results(results, "mean_reciprocal_rank");
  double acc = 0.0;
  for (const RankedResult& r : results) {
    const auto it = std::find(r.ranked_labels.begin(), r.ranked_labels.end(), r.query_label);
    acc += 1.0 / static_cast<double>(it - r.ranked_labels.begin() + 1);
  }
  return acc / static_cast<double>(results.size());
}

double average_precision(const RankedResult& result) {
  check_results(std::span<const RankedResult>(&result, 1), "average_precision");
  double acc = 0.0;
  int relevant = 0;
  for (std::size_t k = 0; k < result.ranked_labels.size(); ++k) {
    if (result.ranked_labels[k] != result.query_label) continue;
    ++relevant;
    acc += static_cast<double>(relevant) / static_cast<double>(k + 1);
  }
  return acc / relevant;
}

double mean_average_precision(std::span<const RankedResult> results) {
  check_results(results, "mean_average_precision");
  double acc = 0.0;
  for (const RankedResult& r : results) acc += average_precision(r);
  return acc / static_cast<double>(results.size());
}

RetrievalMetrics retrieval_metrics(std::span<const RankedResult> results) {
  return {precision_at_1(results), mean_reciprocal_rank(results), mean_average_precision(results)};
}

}  // namespace filterlearn
