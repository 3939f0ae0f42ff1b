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

#include "filterlearn/iqa.hpp"

#include <cmath>

#include "filterlearn/errors.hpp"
#include "filterlearn/random.hpp"

namespace filterlearn {
namespace {

FeatureVector flatten_activations(Eigen::MatrixXd s, const std::optional<double>& threshold) {
  if (threshold) s = (s.array() < *threshold).select(0.0, s);
  return Eigen::Map<const Eigen::VectorXd>(s.data(), s.size());
}

ScoreResult compare(const FeatureVector& a, const FeatureVector& b) {
  try {
    return {spearman(std::span<const double>(a.data(), a.size()), std::span<const double>(b.data(), b.size())),
            false};
  } catch (const DegenerateInputError&) {
    return {0.0, true};
  }
}

void check_same_size(const Image& ref, const Image& dist) {
  if (ref.width() != dist.width() || ref.height() != dist.height())
    throw ArgumentError("reference and distorted images differ in size");
}

FeatureVector weighted_features(const PatchMatrix& patches, const MsUniqueMember& member, double edge_weight,
                                const std::optional<double>& threshold) {
  Eigen::MatrixXd s = forward(member.filter_set, patches);
  if (threshold) s = (s.array() < *threshold).select(0.0, s);
  for (int j = 0; j < s.rows(); ++j)
    if (member.classes[j] == FilterClass::kEdge) s.row(j) *= edge_weight;
  return Eigen::Map<const Eigen::VectorXd>(s.data(), s.size());
}

void check_protocol(WhiteningProtocol protocol, const std::optional<WhiteningChain>& chain) {
  if (protocol == WhiteningProtocol::kReuseTraining && !chain)
    throw ArgumentError("reuse-training whitening requires a training chain");
}

}  // namespace

void UniqueModel::validate() const {
  filter_set.validate();
  if (filter_set.d() != kIqaPatchDim) throw ArgumentError("UniqueModel: filters must have d = 192");
  check_protocol(protocol, training_chain);
  if (activation_threshold && !(*activation_threshold >= 0.0 && *activation_threshold < 1.0))
    throw ArgumentError("UniqueModel: activation threshold must be in [0,1)");
}

void MsUniqueModel::validate() const {
  if (members.size() != kModelCount) throw ArgumentError("MsUniqueModel: exactly 5 models required");
  for (const MsUniqueMember& m : members) {
    m.filter_set.validate();
    if (m.filter_set.d() != kIqaPatchDim) throw ArgumentError("MsUniqueModel: filters must have d = 192");
    if (static_cast<int>(m.classes.size()) != m.filter_set.h())
      throw ArgumentError("MsUniqueModel: one class label per filter required");
  }
  if (!(edge_weight >= 1.0)) throw ArgumentError("MsUniqueModel: edge_weight must be >= 1");
  check_protocol(protocol, training_chain);
  if (activation_threshold && !(*activation_threshold >= 0.0 && *activation_threshold < 1.0))
    throw ArgumentError("MsUniqueModel: activation threshold must be in [0,1)");
}

bool MsUniqueModel::spans_both_regimes() const {
  bool under = false, over = false;
  for (const MsUniqueMember& m : members) {
    under |= m.filter_set.h() < m.filter_set.d();
    over |= m.filter_set.h() > m.filter_set.d();
  }
  return under && over;
}

PatchMatrix iqa_patches(const Image& img, WhiteningProtocol protocol,
                        const std::optional<WhiteningChain>& training_chain, Regularizer reg) {
  if (img.width() < kIqaPatchSide || img.height() < kIqaPatchSide)
    throw ArgumentError("image must be at least 8x8");
  const PatchMatrix raw = extract_grid_patches(crop_to_multiple(img, kIqaPatchSide), kIqaPatchSide);
  if (protocol == WhiteningProtocol::kReuseTraining) {
    check_protocol(protocol, training_chain);
    return apply_chain(*training_chain, raw);
  }
  // A single patch has no sample covariance; fall back to the training chain
  // when there is one and to the raw patch otherwise.
  if (raw.cols() < 2) return training_chain ? apply_chain(*training_chain, raw) : raw;
  return iterated_whiten(raw, 1, reg).first;
}

FeatureVector unique_features(const Image& img, const UniqueModel& model) {
  model.validate();
  const PatchMatrix patches = iqa_patches(img, model.protocol, model.training_chain, model.test_regularizer);
  return flatten_activations(forward(model.filter_set, patches), model.activation_threshold);
}

ScoreResult unique_score(const Image& ref, const Image& dist, const UniqueModel& model) {
  check_same_size(ref, dist);
  return compare(unique_features(ref, model), unique_features(dist, model));
}

FilterClass classify_filter_sharpness(std::span<const double> filter) {
  const int side = static_cast<int>(std::lround(std::sqrt(filter.size() / 3.0)));
  if (side < 1 || static_cast<std::size_t>(3 * side * side) != filter.size())
    throw ArgumentError("classify_filter_sharpness: length must be 3*side*side");
  const int plane = side * side;

  Eigen::VectorXd gray = Eigen::VectorXd::Zero(plane);
  double channel_mean[3];
  for (int c = 0; c < 3; ++c) {
    const Eigen::Map<const Eigen::VectorXd> ch(filter.data() + c * plane, plane);
    gray += ch / 3.0;
    channel_mean[c] = ch.mean();
  }

  double edge = 0.0;
  for (int r = 0; r < side; ++r)
    for (int col = 0; col < side; ++col) {
      if (col + 1 < side) edge += std::pow(gray[r * side + col + 1] - gray[r * side + col], 2);
      if (r + 1 < side) edge += std::pow(gray[(r + 1) * side + col] - gray[r * side + col], 2);
    }
  const double mean_of_means = (channel_mean[0] + channel_mean[1] + channel_mean[2]) / 3.0;
  double color = 0.0;
  for (double m : channel_mean) color += (m - mean_of_means) * (m - mean_of_means);
  color /= 3.0;

  if (edge + color <= 0.0) return FilterClass::kColor;
  return edge / (edge + color) > 0.5 ? FilterClass::kEdge : FilterClass::kColor;
}

std::vector<FilterClass> classify_filters(const FilterSet& filters) {
  std::vector<FilterClass> out;
  out.reserve(filters.h());
  for (int j = 0; j < filters.h(); ++j)
    out.push_back(classify_filter_sharpness(
        std::span<const double>(filters.w1.col(j).data(), static_cast<std::size_t>(filters.d()))));
  return out;
}

ScoreResult msunique_score(const Image& ref, const Image& dist, const MsUniqueModel& model) {
  model.validate();
  check_same_size(ref, dist);
  const PatchMatrix pr = iqa_patches(ref, model.protocol, model.training_chain, model.test_regularizer);
  const PatchMatrix pd = iqa_patches(dist, model.protocol, model.training_chain, model.test_regularizer);
  double total = 0.0;
  bool degenerate = false;
  for (const MsUniqueMember& member : model.members) {
    const ScoreResult r =
        compare(weighted_features(pr, member, model.edge_weight, model.activation_threshold),
                weighted_features(pd, member, model.edge_weight, model.activation_threshold));
    total += r.value;
    degenerate |= r.degenerate;
  }
  return {total / static_cast<double>(model.members.size()), degenerate};
}

UniqueModel train_unique(const PatchMatrix& raw_patches, const TrainingConfig& cfg, std::uint64_t seed, int h) {
  if (raw_patches.rows() != kIqaPatchDim) throw ArgumentError("train_unique: patches must be 8x8x3");
  const Regularizer reg = Regularizer::standard();
  auto [whitened, chain] = iterated_whiten(raw_patches, 1, reg);
  UniqueModel model;
  model.filter_set = train(whitened, h, cfg, seed);
  model.filter_set.provenance.k = 1;
  model.filter_set.provenance.epsilon = chain.stages.front().epsilon;
  model.training_chain = std::move(chain);
  return model;
}

MsUniqueModel train_msunique(const PatchMatrix& raw_patches, const TrainingConfig& cfg, std::uint64_t seed,
                             const std::vector<int>& widths, double edge_weight) {
  if (raw_patches.rows() != kIqaPatchDim) throw ArgumentError("train_msunique: patches must be 8x8x3");
  if (widths.size() != MsUniqueModel::kModelCount) throw ArgumentError("train_msunique: 5 widths required");
  auto [whitened, chain] = iterated_whiten(raw_patches, 1, Regularizer::standard());
  MsUniqueModel model;
  model.edge_weight = edge_weight;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    MsUniqueMember member;
    member.filter_set = train(whitened, widths[i], cfg, derive_seed(seed, i));
    member.filter_set.provenance.k = 1;
    member.filter_set.provenance.epsilon = chain.stages.front().epsilon;
    member.classes = classify_filters(member.filter_set);
    model.members.push_back(std::move(member));
  }
  model.training_chain = std::move(chain);
  if (!model.spans_both_regimes())
    throw ArgumentError("train_msunique: widths must include h < 192 and h > 192");
  model.validate();
  return model;
}

MetricTable evaluate_scores(const ScorePairs& pairs) {
  pairs.validate();
  MetricTable t;
  t.rmse = rmse(pairs);
  t.outlier_ratio = outlier_ratio(pairs);
  t.pearson = pearson(pairs.estimated, pairs.subjective);
  t.spearman = spearman(pairs.estimated, pairs.subjective);
  return t;
}

MetricTable evaluate(std::span<const IqaSample> dataset, const QualityEstimator& estimator) {
  if (dataset.size() < 2) throw ArgumentError("evaluate: need at least 2 samples");
  ScorePairs pairs;
  bool have_std = true;
  for (const IqaSample& s : dataset) have_std &= s.subjective_std.has_value();
  if (have_std) pairs.subjective_std.emplace();
  for (const IqaSample& s : dataset) {
    pairs.estimated.push_back(estimator(s));
    pairs.subjective.push_back(s.subjective);
    if (have_std) pairs.subjective_std->push_back(*s.subjective_std);
  }
  return evaluate_scores(pairs);
}

MetricTable evaluate(std::span<const IqaSample> dataset, const UniqueModel& model) {
  return evaluate(dataset, [&](const IqaSample& s) { return unique_score(s.reference, s.distorted, model).value; });
}

MetricTable evaluate(std::span<const IqaSample> dataset, const MsUniqueModel& model) {
  return evaluate(dataset,
                  [&](const IqaSample& s) { return msunique_score(s.reference, s.distorted, model).value; });
}

}  // namespace filterlearn
