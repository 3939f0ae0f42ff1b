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

#include "filterlearn/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "filterlearn/errors.hpp"
#include "filterlearn/random.hpp"

namespace filterlearn {
namespace {

constexpr int kGrid = kStructureSide / kP2Side;  // 9 P2 patches per row
constexpr int kTilesPerSide = kStructureSide / kP3Side;  // 3 P3 tiles per row
constexpr int kP2PerTile = kP3Side / kP2Side;  // 3 P2 patches per tile row
constexpr int kTiles = kTilesPerSide * kTilesPerSide;

// Stream ids for derive_seed.
enum : std::uint64_t { kColorStream = 1, kCropStream, kP2Stream, kP3Stream, kFinalStream, kSubsetStream };

std::span<const double> view(const FeatureVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Spearman with a constant vector counts as no correlation.
double similarity(const FeatureVector& a, const FeatureVector& b) {
  try {
    return spearman(view(a), view(b));
  } catch (const DegenerateInputError&) {
    return 0.0;
  }
}

PatchMatrix whiten_structure_patches(const PatchMatrix& raw, const TextureModel& m) {
  switch (m.whitening) {
    case StructureWhitening::kRefit:
      return iterated_whiten(raw, 1, m.structure_regularizer).first;
    case StructureWhitening::kTrainingChain:
      return apply_chain(*m.structure_chain, raw);
    case StructureWhitening::kNone:
      return iterated_whiten(raw, 0, Regularizer::none()).first;
  }
  throw ArgumentError("unknown structure whitening mode");
}

// Columns are P3 tiles in row-major tile order; each column stacks the P2
// responses of the tile's nine patches, also row-major.
Eigen::MatrixXd p3_inputs(const Eigen::MatrixXd& p2_responses) {
  const Eigen::Index h2 = p2_responses.rows();
  Eigen::MatrixXd out(9 * h2, kTiles);
  for (int ty = 0; ty < kTilesPerSide; ++ty)
    for (int tx = 0; tx < kTilesPerSide; ++tx) {
      const int tile = ty * kTilesPerSide + tx;
      int slot = 0;
      for (int r = 0; r < kP2PerTile; ++r)
        for (int c = 0; c < kP2PerTile; ++c, ++slot) {
          const int patch = (ty * kP2PerTile + r) * kGrid + tx * kP2PerTile + c;
          out.col(tile).segment(slot * h2, h2) = p2_responses.col(patch);
        }
    }
  return out;
}

Eigen::VectorXd pooled_tiles(const Eigen::MatrixXd& p3_responses, int pool_size) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(kTiles) * pool_size);
  for (int t = 0; t < kTiles; ++t) out.segment(t * pool_size, pool_size) = top_k_pool(p3_responses.col(t), pool_size);
  return out;
}

// Resized image -> whitened 8x8 grid patches (81 columns).
PatchMatrix structure_patches(const Image& img, const TextureModel& m) {
  const Image small = (img.width() == kStructureSide && img.height() == kStructureSide)
                          ? img
                          : resize_box(img, kStructureSide, kStructureSide);
  return whiten_structure_patches(extract_grid_patches(small, kP2Side), m);
}

// Up to `limit` columns chosen without replacement, in original order.
Eigen::MatrixXd subsample_columns(const Eigen::MatrixXd& x, int limit, Rng& rng) {
  if (x.cols() <= limit) return x;
  std::vector<Eigen::Index> idx(x.cols());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  Eigen::MatrixXd out(x.rows(), limit);
  for (int j = 0; j < limit; ++j) out.col(j) = x.col(idx[j]);
  return out;
}

FilterSet train_layer(const Eigen::MatrixXd& samples, int h, const TextureTrainingConfig& cfg, std::uint64_t seed,
                      const char* name) {
  if (samples.cols() < cfg.min_samples_per_layer)
    throw ArgumentError(std::string("train_texture_model: too few samples for the ") + name + " layer");
  return train(samples, h, cfg.decoder, seed);
}

}  // namespace

std::string to_string(StructureWhitening mode) {
  switch (mode) {
    case StructureWhitening::kRefit: return "refit";
    case StructureWhitening::kTrainingChain: return "training";
    case StructureWhitening::kNone: return "none";
  }
  return "unknown";
}

StructureWhitening structure_whitening_from_string(const std::string& name) {
  for (StructureWhitening m : {StructureWhitening::kRefit, StructureWhitening::kTrainingChain, StructureWhitening::kNone})
    if (to_string(m) == name) return m;
  throw ArgumentError("unknown structure whitening mode: " + name);
}

void TextureModel::validate() const {
  constexpr int kPatchDim = 3 * kP2Side * kP2Side;
  color_filters.validate();
  p2_filters.validate();
  p3_filters.validate();
  final_filters.validate();
  if (color_filters.d() != kPatchDim) throw ArgumentError("TextureModel: color filters must take 8x8x3 inputs");
  if (color_mean.size() != kPatchDim) throw ArgumentError("TextureModel: color mean must have 192 entries");
  if (p2_filters.d() != kPatchDim) throw ArgumentError("TextureModel: P2 filters must take 8x8x3 inputs");
  if (p3_filters.d() != 9 * p2_filters.h()) throw ArgumentError("TextureModel: P3 input must be 9 * h2");
  if (pool_size < 1 || p3_filters.h() < pool_size) throw ArgumentError("TextureModel: h3 must be >= pool size");
  if (final_filters.d() != 9 * pool_size) throw ArgumentError("TextureModel: final input must be 9 * pool size");
  if (whitening == StructureWhitening::kTrainingChain && !structure_chain)
    throw ArgumentError("TextureModel: training-chain whitening needs a stored chain");
}

HierarchyDims TextureModel::dims() const {
  return {color_filters.h(), p2_filters.h(), p3_filters.h(), final_filters.h(), pool_size};
}

void TextureTrainingConfig::validate() const {
  decoder.validate();
  if (dims.color_h < 1 || dims.h2 < 1 || dims.h_final < 1) throw ArgumentError("hierarchy widths must be >= 1");
  if (dims.pool_size < 1 || dims.h3 < dims.pool_size) throw ArgumentError("h3 must be >= pool size");
  if (color_patches < 1 || crops < 1) throw ArgumentError("patch and crop counts must be >= 1");
  if (max_samples_per_layer < min_samples_per_layer || min_samples_per_layer < 1)
    throw ArgumentError("sample limits inconsistent");
}

TextureModel train_texture_model(std::span<const Image> images, const TextureTrainingConfig& cfg,
                                 std::uint64_t seed) {
  cfg.validate();
  if (images.empty()) throw ArgumentError("train_texture_model: no training images");
  for (const Image& img : images)
    if (img.width() < kStructureSide || img.height() < kStructureSide)
      throw ArgumentError("train_texture_model: training images must be at least 72x72");
  // Per-layer sample counts: color patches, 81 P2 patches and 9 P3 tiles
  // per crop, one final-layer vector per crop.
  if (std::min({cfg.color_patches, cfg.crops}) < cfg.min_samples_per_layer)
    throw ArgumentError("train_texture_model: too few samples per layer (need color_patches and crops >= " +
                        std::to_string(cfg.min_samples_per_layer) + ")");

  TextureModel m;
  m.pool_size = cfg.dims.pool_size;
  m.whitening = cfg.whitening;
  m.structure_regularizer = cfg.structure_regularizer;
  const auto n_images = static_cast<int>(images.size());

  // Color layer: raw patches, centered only.
  {
    Rng rng(derive_seed(seed, kColorStream));
    PatchMatrix raw(3 * kColorSide * kColorSide, cfg.color_patches);
    for (int j = 0; j < cfg.color_patches; ++j)
      raw.col(j) = sample_random_patches(images[j % n_images], 1, kColorSide, rng).col(0);
    auto [centered, chain] = iterated_whiten(raw, 0, Regularizer::none());
    m.color_mean = chain.base_mean;
    m.color_filters = train_layer(centered, cfg.dims.color_h, cfg, derive_seed(seed, kColorStream + 100), "color");
    m.color_filters.provenance.k = 0;
  }

  // Random 72x72 crops, cycling through the images.
  std::vector<PatchMatrix> crop_patches;
  crop_patches.reserve(cfg.crops);
  {
    Rng rng(derive_seed(seed, kCropStream));
    for (int i = 0; i < cfg.crops; ++i) {
      const Image& img = images[i % n_images];
      std::uniform_int_distribution<int> xs(0, img.width() - kStructureSide);
      std::uniform_int_distribution<int> ys(0, img.height() - kStructureSide);
      const int x = xs(rng), y = ys(rng);
      crop_patches.push_back(extract_grid_patches(crop(img, x, y, kStructureSide, kStructureSide), kP2Side));
    }
  }
  const int per_crop = kGrid * kGrid;
  PatchMatrix all_raw(3 * kP2Side * kP2Side, static_cast<Eigen::Index>(cfg.crops) * per_crop);
  for (int i = 0; i < cfg.crops; ++i) all_raw.middleCols(static_cast<Eigen::Index>(i) * per_crop, per_crop) = crop_patches[i];
  m.structure_chain = iterated_whiten(all_raw, 1, cfg.structure_regularizer).second;
  all_raw.resize(0, 0);

  std::vector<PatchMatrix> whitened;
  whitened.reserve(cfg.crops);
  for (const PatchMatrix& p : crop_patches) whitened.push_back(whiten_structure_patches(p, m));
  crop_patches.clear();

  Rng subset(derive_seed(seed, kSubsetStream));

  // P2 layer.
  {
    PatchMatrix all(3 * kP2Side * kP2Side, static_cast<Eigen::Index>(cfg.crops) * per_crop);
    for (int i = 0; i < cfg.crops; ++i) all.middleCols(static_cast<Eigen::Index>(i) * per_crop, per_crop) = whitened[i];
    m.p2_filters = train_layer(subsample_columns(all, cfg.max_samples_per_layer, subset), cfg.dims.h2, cfg,
                               derive_seed(seed, kP2Stream), "P2");
    m.p2_filters.provenance.k = 1;
  }

  // P3 layer on frozen P2 responses.
  std::vector<Eigen::MatrixXd> p3_in;
  p3_in.reserve(cfg.crops);
  for (const PatchMatrix& p : whitened) p3_in.push_back(p3_inputs(forward(m.p2_filters, p)));
  whitened.clear();
  {
    Eigen::MatrixXd all(9 * cfg.dims.h2, static_cast<Eigen::Index>(cfg.crops) * kTiles);
    for (int i = 0; i < cfg.crops; ++i) all.middleCols(static_cast<Eigen::Index>(i) * kTiles, kTiles) = p3_in[i];
    m.p3_filters = train_layer(subsample_columns(all, cfg.max_samples_per_layer, subset), cfg.dims.h3, cfg,
                               derive_seed(seed, kP3Stream), "P3");
  }

  // Final layer on pooled P3 responses, one sample per crop.
  {
    Eigen::MatrixXd all(9 * m.pool_size, cfg.crops);
    for (int i = 0; i < cfg.crops; ++i) all.col(i) = pooled_tiles(forward(m.p3_filters, p3_in[i]), m.pool_size);
    m.final_filters = train_layer(subsample_columns(all, cfg.max_samples_per_layer, subset), cfg.dims.h_final, cfg,
                                  derive_seed(seed, kFinalStream), "final");
  }

  m.validate();
  return m;
}

FeatureVector color_feature(const Image& img, const TextureModel& m) {
  m.validate();
  const Image small = resize_box(img, kColorSide, kColorSide);
  Eigen::MatrixXd p = flatten_patch(small, 0, 0, kColorSide);
  p.col(0) -= m.color_mean;
  return forward(m.color_filters, p).col(0);
}

Eigen::VectorXd top_k_pool(const Eigen::VectorXd& v, int k) {
  if (k < 1) throw ArgumentError("top_k_pool: k must be >= 1");
  if (v.size() < k) throw ArgumentError("top_k_pool: vector shorter than k");
  std::vector<double> values(v.data(), v.data() + v.size());
  std::partial_sort(values.begin(), values.begin() + k, values.end(), std::greater<>());
  return Eigen::Map<const Eigen::VectorXd>(values.data(), k);
}

FeatureVector structure_feature(const Image& img, const TextureModel& m) {
  m.validate();
  const PatchMatrix patches = structure_patches(img, m);
  const Eigen::MatrixXd p3 = forward(m.p3_filters, p3_inputs(forward(m.p2_filters, patches)));
  Eigen::MatrixXd pooled = pooled_tiles(p3, m.pool_size);
  return forward(m.final_filters, pooled).col(0);
}

FeatureVector raw_pixel_feature(const Image& img) {
  return flatten_patch(resize_box(img, kStructureSide, kStructureSide), 0, 0, kStructureSide);
}

void RetrievalIndex::validate() const {
  if (entries.size() < 2) throw ArgumentError("RetrievalIndex: need at least 2 entries");
  std::set<std::string> ids;
  std::set<int> labels;
  for (const IndexEntry& e : entries) {
    if (!ids.insert(e.id).second) throw ArgumentError("RetrievalIndex: duplicate id " + e.id);
    labels.insert(e.label);
    if (e.color.size() != entries.front().color.size() || e.structure.size() != entries.front().structure.size())
      throw ArgumentError("RetrievalIndex: inconsistent feature lengths");
  }
  if (labels.size() < 2) throw ArgumentError("RetrievalIndex: need at least 2 classes");
}

int RetrievalIndex::find(const std::string& id) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].id == id) return static_cast<int>(i);
  return -1;
}

int RetrievalIndex::max_class_size() const {
  std::unordered_map<int, int> counts;
  int best = 0;
  for (const IndexEntry& e : entries) best = std::max(best, ++counts[e.label]);
  return best;
}

RetrievalIndex build_index(std::span<const LabeledImage> corpus, const TextureModel& m, StructureMode mode) {
  if (corpus.empty()) throw ArgumentError("build_index: empty corpus");
  std::set<std::string> ids;
  for (const LabeledImage& item : corpus)
    if (!ids.insert(item.id).second) throw ArgumentError("build_index: duplicate id " + item.id);
  RetrievalIndex index;
  index.entries.reserve(corpus.size());
  for (const LabeledImage& item : corpus)
    index.entries.push_back({item.id, item.label, color_feature(item.image, m),
                             mode == StructureMode::kLearned ? structure_feature(item.image, m)
                                                             : raw_pixel_feature(item.image)});
  index.validate();
  return index;
}

RankedResult query(const RetrievalIndex& index, const std::string& query_id, double prefilter_fraction) {
  if (!(prefilter_fraction > 0.0 && prefilter_fraction <= 1.0))
    throw ArgumentError("query: prefilter fraction must be in (0, 1]");
  const int q = index.find(query_id);
  if (q < 0) throw ArgumentError("query: unknown id " + query_id);
  const IndexEntry& qe = index.entries[q];

  struct Candidate {
    int entry;
    double color;
    double structure;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < static_cast<int>(index.entries.size()); ++i)
    if (i != q) cands.push_back({i, similarity(qe.color, index.entries[i].color), 0.0});
  const auto others = static_cast<int>(cands.size());

  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.color > b.color; });
  int keep = static_cast<int>(std::ceil(prefilter_fraction * others - 1e-9));
  keep = std::min(others, std::max(keep, 2 * index.max_class_size()));

  for (int i = 0; i < keep; ++i) cands[i].structure = similarity(qe.structure, index.entries[cands[i].entry].structure);
  std::stable_sort(cands.begin(), cands.begin() + keep,
                   [](const Candidate& a, const Candidate& b) { return a.structure > b.structure; });

  RankedResult r;
  r.query_label = qe.label;
  for (int i = 0; i < others; ++i) {
    const IndexEntry& e = index.entries[cands[i].entry];
    r.ranked_labels.push_back(e.label);
    r.ranked_ids.push_back(e.id);
    r.scores.push_back(i < keep ? cands[i].structure : cands[i].color);
  }
  return r;
}

RetrievalMetrics evaluate_index(const RetrievalIndex& index, double prefilter_fraction) {
  index.validate();
  std::vector<RankedResult> results;
  results.reserve(index.entries.size());
  for (const IndexEntry& e : index.entries) results.push_back(query(index, e.id, prefilter_fraction));
  return retrieval_metrics(results);
}

std::vector<SweepRow> robustness_sweep(std::span<const LabeledImage> corpus, const TextureModel& m,
                                       std::span<const double> sigmas, std::uint64_t seed, double prefilter_fraction,
                                       StructureMode mode) {
  for (double s : sigmas)
    if (!(s >= 0.0)) throw ArgumentError("robustness_sweep: sigma must be >= 0");
  std::vector<SweepRow> rows;
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    std::vector<LabeledImage> noisy;
    noisy.reserve(corpus.size());
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      Rng rng(derive_seed(derive_seed(seed, si), j));
      noisy.push_back({corpus[j].id, corpus[j].label, add_gaussian_noise(corpus[j].image, sigmas[si], rng)});
    }
    rows.push_back({sigmas[si], evaluate_index(build_index(noisy, m, mode), prefilter_fraction)});
  }
  return rows;
}

std::vector<Image> nonoverlapping_tiles(const Image& img, int side) {
  if (side < 1) throw ArgumentError("nonoverlapping_tiles: side must be >= 1");
  std::vector<Image> out;
  for (int y = 0; y + side <= img.height(); y += side)
    for (int x = 0; x + side <= img.width(); x += side) out.push_back(crop(img, x, y, side, side));
  return out;
}

}  // namespace filterlearn
