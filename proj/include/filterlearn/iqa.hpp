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

// Full-reference quality estimation from learned filter responses.
//
// UNIQUE: tile both images into non-overlapping 8x8x3 patches, whiten them,
// filter with an overcomplete (h = 400) filter set and compare the two
// response vectors with Spearman correlation.
//
// MS-UNIQUE: the same with several filter sets of different widths; each
// filter is labeled edge or color and edge responses are up-weighted before
// the comparison. The final score is the mean correlation over models.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "filterlearn/decoder.hpp"
#include "filterlearn/image.hpp"
#include "filterlearn/metrics.hpp"
#include "filterlearn/whitening.hpp"

namespace filterlearn {

using FeatureVector = Eigen::VectorXd;

inline constexpr int kIqaPatchSide = 8;
inline constexpr int kIqaPatchDim = 3 * kIqaPatchSide * kIqaPatchSide;

enum class WhiteningProtocol {
  kRefit,          // fit a fresh k = 1 chain on each test image's patches
  kReuseTraining,  // apply the chain fitted on the training patches
};

struct UniqueModel {
  FilterSet filter_set;
  WhiteningProtocol protocol = WhiteningProtocol::kRefit;
  std::optional<WhiteningChain> training_chain;
  Regularizer test_regularizer = Regularizer::standard();
  std::optional<double> activation_threshold;

  void validate() const;

  friend bool operator==(const UniqueModel&, const UniqueModel&) = default;
};

enum class FilterClass { kEdge, kColor };

struct MsUniqueMember {
  FilterSet filter_set;
  std::vector<FilterClass> classes;  // one per hidden unit

  friend bool operator==(const MsUniqueMember&, const MsUniqueMember&) = default;
};

struct MsUniqueModel {
  static constexpr int kModelCount = 5;

  std::vector<MsUniqueMember> members;
  double edge_weight = 2.0;
  WhiteningProtocol protocol = WhiteningProtocol::kRefit;
  std::optional<WhiteningChain> training_chain;
  Regularizer test_regularizer = Regularizer::standard();
  std::optional<double> activation_threshold;

  /// Shapes, label counts and edge_weight >= 1.
  void validate() const;
  /// At least one undercomplete (h < d) and one overcomplete (h > d) member.
  bool spans_both_regimes() const;

  friend bool operator==(const MsUniqueModel&, const MsUniqueModel&) = default;
};

struct ScoreResult {
  double value = 0.0;
  bool degenerate = false;  // a feature vector was constant; value is 0
};

/// Whitened 8x8x3 grid patches of an image (right/bottom remainder cropped).
PatchMatrix iqa_patches(const Image& img, WhiteningProtocol protocol,
                        const std::optional<WhiteningChain>& training_chain, Regularizer reg);

FeatureVector unique_features(const Image& img, const UniqueModel& model);

ScoreResult unique_score(const Image& ref, const Image& dist, const UniqueModel& model);

/// Edge iff E / (E + C) > 0.5, with E the squared first differences of the
/// channel-averaged plane and C the variance of the three channel means.
FilterClass classify_filter_sharpness(std::span<const double> filter);
std::vector<FilterClass> classify_filters(const FilterSet& filters);

ScoreResult msunique_score(const Image& ref, const Image& dist, const MsUniqueModel& model);

/// k = 1 whitening of raw training patches, then an h = 400 decoder.
UniqueModel train_unique(const PatchMatrix& raw_patches, const TrainingConfig& cfg, std::uint64_t seed,
                         int h = 400);

inline const std::vector<int> kDefaultMsUniqueWidths{81, 121, 169, 400, 625};

MsUniqueModel train_msunique(const PatchMatrix& raw_patches, const TrainingConfig& cfg, std::uint64_t seed,
                             const std::vector<int>& widths = kDefaultMsUniqueWidths,
                             double edge_weight = 2.0);

struct IqaSample {
  Image reference;
  Image distorted;
  double subjective = 0.0;
  std::optional<double> subjective_std;
};

struct MetricTable {
  double rmse = 0.0;
  double outlier_ratio = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
};

MetricTable evaluate_scores(const ScorePairs& pairs);

using QualityEstimator = std::function<double(const IqaSample&)>;

/// Scores every sample and validates the estimates against the subjective
/// scores. Correlation on a constant estimator raises DegenerateInputError.
MetricTable evaluate(std::span<const IqaSample> dataset, const QualityEstimator& estimator);
MetricTable evaluate(std::span<const IqaSample> dataset, const UniqueModel& model);
MetricTable evaluate(std::span<const IqaSample> dataset, const MsUniqueModel& model);

}  // namespace filterlearn
