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

// Hierarchical texture features and retrieval.
//
// Color: the image is box-resized to 8x8 and filtered, unwhitened, by a
// 400-filter set trained on centered raw patches.
//
// Structure: the image is box-resized to 72x72 and cut into a 9x9 grid of
// 8x8 patches (P2), whitened with a k = 1 chain. Each 24x24 tile (P3) concatenates
// the P2 responses of its nine patches and is filtered again; the 64 largest
// P3 responses of every tile are concatenated (9 x 64) and filtered by the
// final layer.
//
//   72x72 --8x8 grid--> 81 x P2 (h2) --3x3 groups--> 9 x P3 (h3)
//         --top 64--> 576 --final--> h_final
//
// Retrieval keeps the entries whose color features correlate best with the
// query and ranks those by structure correlation.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "filterlearn/decoder.hpp"
#include "filterlearn/image.hpp"
#include "filterlearn/metrics.hpp"
#include "filterlearn/synth.hpp"
#include "filterlearn/whitening.hpp"

namespace filterlearn {

using FeatureVector = Eigen::VectorXd;

inline constexpr int kColorSide = 8;
inline constexpr int kStructureSide = 72;
inline constexpr int kP2Side = 8;
inline constexpr int kP3Side = 24;
inline constexpr int kDefaultPoolSize = 64;

struct HierarchyDims {
  int color_h = 400;
  int h2 = 64;
  int h3 = 192;
  int h_final = 400;
  int pool_size = kDefaultPoolSize;
};

// 81 patches cannot support a 192-dimensional covariance: a per-image refit
// maps every image onto nearly the same whitened geometry, leaving only what
// the regularizer preserves. The shared training chain is the default.
enum class StructureWhitening {
  kTrainingChain,  // one k = 1 chain fitted on all training crop patches
  kRefit,          // fresh k = 1 chain on each image's 81 patches
  kNone,           // centering only, per image
};

/// eps = 1.0 * mean(L): damps the weak high-frequency directions instead of
/// amplifying them to unit variance; keeps structure features noise tolerant.
inline Regularizer default_structure_regularizer() { return {1.0, EpsilonMode::kRelative}; }

std::string to_string(StructureWhitening mode);
StructureWhitening structure_whitening_from_string(const std::string& name);

struct TextureModel {
  FilterSet color_filters;
  Eigen::VectorXd color_mean;  // subtracted from the 8x8 color patch
  FilterSet p2_filters;
  FilterSet p3_filters;
  FilterSet final_filters;
  int pool_size = kDefaultPoolSize;
  StructureWhitening whitening = StructureWhitening::kTrainingChain;
  Regularizer structure_regularizer = default_structure_regularizer();
  std::optional<WhiteningChain> structure_chain;

  /// Dimension chain: p3.d == 9 * p2.h, final.d == 9 * pool_size,
  /// p3.h >= pool_size, color and p2 filters take 8x8x3 inputs.
  void validate() const;
  HierarchyDims dims() const;

  friend bool operator==(const TextureModel& a, const TextureModel& b) {
    return a.color_filters == b.color_filters && exactly_equal(a.color_mean, b.color_mean) &&
           a.p2_filters == b.p2_filters && a.p3_filters == b.p3_filters && a.final_filters == b.final_filters &&
           a.pool_size == b.pool_size && a.whitening == b.whitening &&
           a.structure_regularizer == b.structure_regularizer && a.structure_chain == b.structure_chain;
  }
};

struct TextureTrainingConfig {
  TrainingConfig decoder;
  HierarchyDims dims;
  int color_patches = 10000;  // random raw 8x8 patches for the color layer
  int crops = 1000;           // random 72x72 crops feeding P2, P3 and final
  int max_samples_per_layer = 10000;
  int min_samples_per_layer = 1000;
  StructureWhitening whitening = StructureWhitening::kTrainingChain;
  Regularizer structure_regularizer = default_structure_regularizer();

  void validate() const;
};

/// Greedy layer-wise training (color, P2, P3, final), each layer frozen
/// before the next one's inputs are harvested. Images must be >= 72x72.
TextureModel train_texture_model(std::span<const Image> images, const TextureTrainingConfig& cfg,
                                 std::uint64_t seed);

FeatureVector color_feature(const Image& img, const TextureModel& m);

/// The k largest values of v, descending.
Eigen::VectorXd top_k_pool(const Eigen::VectorXd& v, int k);

FeatureVector structure_feature(const Image& img, const TextureModel& m);

/// Raw-pixel baseline: the 72x72 resized image flattened channel-major.
FeatureVector raw_pixel_feature(const Image& img);

enum class StructureMode { kLearned, kRawPixels };

struct IndexEntry {
  std::string id;
  int label = 0;
  FeatureVector color;
  FeatureVector structure;

  friend bool operator==(const IndexEntry& a, const IndexEntry& b) {
    return a.id == b.id && a.label == b.label && exactly_equal(a.color, b.color) &&
           exactly_equal(a.structure, b.structure);
  }
};

struct RetrievalIndex {
  std::vector<IndexEntry> entries;

  /// Unique ids, >= 2 entries, >= 2 classes, consistent feature lengths.
  void validate() const;
  int find(const std::string& id) const;  // -1 if absent
  int max_class_size() const;

  friend bool operator==(const RetrievalIndex&, const RetrievalIndex&) = default;
};

RetrievalIndex build_index(std::span<const LabeledImage> corpus, const TextureModel& m,
                           StructureMode mode = StructureMode::kLearned);

inline constexpr double kDefaultPrefilterFraction = 0.5;

/// Two-stage ranking of every other entry: color prefilter survivors by
/// structure correlation, then the rest in color order.
RankedResult query(const RetrievalIndex& index, const std::string& query_id,
                   double prefilter_fraction = kDefaultPrefilterFraction);

/// Queries every entry and summarizes P@1, MRR and MAP.
RetrievalMetrics evaluate_index(const RetrievalIndex& index,
                                double prefilter_fraction = kDefaultPrefilterFraction);

struct SweepRow {
  double sigma = 0.0;
  RetrievalMetrics metrics;
};

/// For each sigma, corrupts every image (seeded per sigma and image),
/// rebuilds the index and evaluates all queries.
std::vector<SweepRow> robustness_sweep(std::span<const LabeledImage> corpus, const TextureModel& m,
                                       std::span<const double> sigmas, std::uint64_t seed,
                                       double prefilter_fraction = kDefaultPrefilterFraction,
                                       StructureMode mode = StructureMode::kLearned);

/// Non-overlapping side x side tiles, left-to-right, top-to-bottom.
std::vector<Image> nonoverlapping_tiles(const Image& img, int side);

}  // namespace filterlearn
