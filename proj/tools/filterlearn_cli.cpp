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


// filterlearn: one binary, one subcommand per operation. Numeric output is
// TSV on stdout; diagnostics go to stderr.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "filterlearn/decoder.hpp"
#include "filterlearn/errors.hpp"
#include "filterlearn/image.hpp"
#include "filterlearn/iqa.hpp"
#include "filterlearn/manifest.hpp"
#include "filterlearn/model_io.hpp"
#include "filterlearn/random.hpp"
#include "filterlearn/synth.hpp"
#include "filterlearn/texture.hpp"
#include "filterlearn/whitening.hpp"

namespace fl = filterlearn;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

const std::map<std::string, fl::MatrixEncoding> kEncodings{{"base64", fl::MatrixEncoding::kBase64},
                                                            {"decimal", fl::MatrixEncoding::kDecimal}};
const std::map<std::string, fl::EpsilonMode> kEpsilonModes{{"relative", fl::EpsilonMode::kRelative},
                                                            {"absolute", fl::EpsilonMode::kAbsolute}};

// Decoder hyperparameters shared by every training command.
struct DecoderFlags {
  fl::TrainingConfig cfg;

  void add(CLI::App* cmd) {
    cmd->add_option("--rho", cfg.rho, "Target mean activation")->capture_default_str()->check(
        CLI::Range(0.0, 1.0));
    cmd->add_option("--beta", cfg.beta, "Sparsity weight")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--lambda", cfg.lambda, "Weight decay")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iterations", cfg.max_iterations, "L-BFGS iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", cfg.tolerance, "Relative objective change to stop at")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  }
};

struct OutputFlags {
  fs::path out;
  fl::MatrixEncoding encoding = fl::MatrixEncoding::kBase64;

  void add(CLI::App* cmd) {
    cmd->add_option("--out", out, "Model file to write")->required();
    cmd->add_option("--encoding", encoding, "Matrix encoding")
        ->transform(CLI::CheckedTransformer(kEncodings))
        ->default_str("base64");
  }
};

void print_row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) std::printf(i ? "\t%.6f" : "%.6f", values[i]);
  std::printf("\n");
}

std::vector<fl::Image> load_all(const std::vector<fs::path>& paths) {
  std::vector<fl::Image> images;
  images.reserve(paths.size());
  for (const fs::path& p : paths) images.push_back(fl::load_image(p));
  return images;
}

std::vector<fs::path> require_images(const fs::path& dir) {
  auto paths = fl::list_images(dir);
  if (paths.empty()) throw fl::IoError("no .ppm or .png images in " + dir.string());
  return paths;
}

// `per_image` random side x side patches from every image, one stream each.
fl::PatchMatrix sample_directory(const std::vector<fs::path>& paths, int per_image, int side, std::uint64_t seed) {
  const int d = 3 * side * side;
  fl::PatchMatrix all(d, static_cast<Eigen::Index>(paths.size()) * per_image);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    fl::Rng rng = fl::make_rng(seed, i);
    all.middleCols(static_cast<Eigen::Index>(i) * per_image, per_image) =
        fl::sample_random_patches(fl::load_image(paths[i]), per_image, side, rng);
  }
  return all;
}

using IqaModel = std::variant<fl::UniqueModel, fl::MsUniqueModel>;

IqaModel load_iqa_model(const fs::path& path) {
  fl::ModelFile file = fl::load_model(path);
  if (auto* f = std::get_if<fl::FilterSet>(&file.model)) {
    if (f->d() != fl::kIqaPatchDim) throw fl::FormatError("filter set is not 8x8x3; cannot score images");
    fl::UniqueModel m;
    m.filter_set = std::move(*f);
    return m;
  }
  if (auto* u = std::get_if<fl::UniqueModel>(&file.model)) return std::move(*u);
  if (auto* m = std::get_if<fl::MsUniqueModel>(&file.model)) return std::move(*m);
  throw fl::FormatError(path.string() + ": expected a filterset, unique or msunique model");
}

template <class T>
T load_kind(const fs::path& path, const char* kind) {
  fl::ModelFile file = fl::load_model(path);
  if (auto* m = std::get_if<T>(&file.model)) return std::move(*m);
  throw fl::FormatError(path.string() + ": expected model kind '" + std::string(kind) + "', found '" +
                        fl::model_kind(file) + "'");
}

double psnr(const fl::Image& a, const fl::Image& b) {
  double sse = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) sse += std::pow(a.data()[i] - b.data()[i], 2);
  const double mse = sse / static_cast<double>(a.data().size());
  return mse <= 1e-12 ? 120.0 : 10.0 * std::log10(1.0 / mse);
}

// Texture samples of synthetic classes, ids "c<class>_s<sample>.ppm".
void synth_texture(const fs::path& out_dir, std::uint64_t seed, int classes, int samples, int size) {
  const auto corpus = fl::texture_corpus(fl::default_texture_specs(classes, seed), samples, size, seed);
  std::vector<fl::TextureManifestEntry> rows;
  for (const fl::LabeledImage& item : corpus) {
    const std::string name = item.id + ".ppm";
    fl::save_ppm(item.image, out_dir / name);
    rows.push_back({name, "class" + std::to_string(item.label)});
  }
  fl::write_texture_manifest(out_dir / "manifest.tsv", rows);
}

// Reference textures under blur, noise and contrast loss. The subjective
// column is a stand-in (PSNR of the pair) so the evaluation path can run
// end to end; it is not a perceptual score.
void synth_iqa(const fs::path& out_dir, std::uint64_t seed, int count, int size) {
  const auto specs = fl::default_texture_specs(count, seed);
  const std::vector<std::pair<fl::DistortionKind, std::vector<double>>> plan{
      {fl::DistortionKind::kGaussianBlur, {1.0, 2.0, 4.0}},
      {fl::DistortionKind::kGaussianNoise, {10.0, 25.0, 50.0}},
      {fl::DistortionKind::kContrastShift, {0.5, 1.0, 2.0}}};
  std::vector<fl::IqaManifestEntry> rows;
  for (int i = 0; i < count; ++i) {
    fl::Rng render_rng = fl::make_rng(seed, static_cast<std::uint64_t>(i));
    const fl::Image ref = fl::render_texture(specs[i], size, 0, render_rng);
    char ref_name[32];
    std::snprintf(ref_name, sizeof ref_name, "ref_%03d.ppm", i);
    fl::save_ppm(ref, out_dir / ref_name);
    for (std::size_t k = 0; k < plan.size(); ++k) {
      for (std::size_t l = 0; l < plan[k].second.size(); ++l) {
        const double level = plan[k].second[l];
        fl::Rng rng = fl::make_rng(fl::derive_seed(seed, 1000 + i), k * 16 + l);
        const fl::Image dist = fl::make_distorted_pair(ref, plan[k].first, level, rng).second;
        char name[64];
        std::snprintf(name, sizeof name, "ref_%03d_%s_%g.ppm", i, fl::to_string(plan[k].first).c_str(), level);
        fl::save_ppm(dist, out_dir / name);
        rows.push_back({ref_name, name, psnr(ref, dist), std::nullopt});
      }
    }
  }
  fl::write_iqa_manifest(out_dir / "manifest.tsv", rows);
}

void synth_natural(const fs::path& out_dir, std::uint64_t seed, int count, int size) {
  for (int i = 0; i < count; ++i) {
    fl::Rng rng = fl::make_rng(seed, static_cast<std::uint64_t>(i));
    char name[32];
    std::snprintf(name, sizeof name, "natural_%04d.ppm", i);
    fl::save_ppm(fl::natural_like_image(size, rng), out_dir / name);
  }
}

// CUReT layout: <in>/<sample>/<nn>-<view>.<ext>; only view 55 is used and
// each image is cut into non-overlapping 128x128 tiles labeled by <sample>.
bool is_view_55(const fs::path& p) {
  const std::string stem = p.stem().string();
  return stem.size() > 4 && stem.ends_with("055") && (stem[stem.size() - 4] == '-' || stem[stem.size() - 4] == '_');
}

void curet_prepare(const fs::path& in_dir, const fs::path& out_dir, int tile) {
  std::vector<fl::TextureManifestEntry> rows;
  for (const fs::path& p : fl::list_images(in_dir, true)) {
    if (!is_view_55(p)) continue;
    const std::string label = p.parent_path().filename().string();
    const auto tiles = fl::nonoverlapping_tiles(fl::load_image(p), tile);
    for (std::size_t t = 0; t < tiles.size(); ++t) {
      const std::string name = label + "_" + p.stem().string() + "_t" + std::to_string(t) + ".ppm";
      fl::save_ppm(tiles[t], out_dir / name);
      rows.push_back({name, label});
    }
  }
  if (rows.empty()) throw fl::IoError("no view-55 images (stem ending -055 or _055) under " + in_dir.string());
  fl::write_texture_manifest(out_dir / "manifest.tsv", rows);
  std::fprintf(stderr, "wrote %zu tiles\n", rows.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned filter sets for image quality estimation and texture retrieval"};
  // "-h" is left free: --h is the hidden-unit count.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  std::function<void()> run;

  // train-filters
  struct {
    fs::path input_dir;
    int patches_per_image = 100;
    int side = 8;
    int k = 1;
    double epsilon = 0.01;
    fl::EpsilonMode epsilon_mode = fl::EpsilonMode::kRelative;
    int h = 400;
    std::uint64_t seed = 1;
    std::string kind = "filterset";
    DecoderFlags decoder;
    OutputFlags output;
  } tf;
  auto* train_filters = app.add_subcommand("train-filters", "Whiten sampled patches and train a filter set");
  train_filters->add_option("--input-dir", tf.input_dir, "Directory of .ppm/.png training images")->required();
  train_filters->add_option("--patches-per-image", tf.patches_per_image)->capture_default_str()->check(
      CLI::PositiveNumber);
  train_filters->add_option("--side", tf.side, "Patch side in pixels")->capture_default_str()->check(
      CLI::PositiveNumber);
  train_filters->add_option("--k", tf.k, "Whitening iterations (0 = centering only)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train_filters->add_option("--epsilon", tf.epsilon, "Whitening regularizer")->capture_default_str()->check(
      CLI::NonNegativeNumber);
  train_filters->add_option("--epsilon-mode", tf.epsilon_mode, "relative: scaled by the mean eigenvalue")
      ->transform(CLI::CheckedTransformer(kEpsilonModes))
      ->default_str("relative");
  train_filters->add_option("--h", tf.h, "Hidden units")->capture_default_str()->check(CLI::PositiveNumber);
  train_filters->add_option("--seed", tf.seed)->capture_default_str();
  train_filters->add_option("--kind", tf.kind, "filterset, or unique to keep the whitening chain")
      ->capture_default_str()
      ->check(CLI::IsMember({"filterset", "unique"}));
  tf.decoder.add(train_filters);
  tf.output.add(train_filters);
  train_filters->callback([&] {
    run = [&] {
      const auto paths = require_images(tf.input_dir);
      const fl::PatchMatrix raw = sample_directory(paths, tf.patches_per_image, tf.side, fl::derive_seed(tf.seed, 0));
      auto [p, chain] = fl::iterated_whiten(raw, tf.k, {tf.epsilon, tf.epsilon_mode});
      fl::FilterSet f = fl::train(p, tf.h, tf.decoder.cfg, fl::derive_seed(tf.seed, 1));
      f.provenance.k = tf.k;
      f.provenance.epsilon = chain.stages.empty() ? 0.0 : chain.stages.front().epsilon;
      const double objective = [&] {
        Eigen::VectorXd grad;
        return fl::objective_and_gradient(fl::pack_parameters(f), p, tf.h, tf.decoder.cfg, grad);
      }();
      const double mean_rho = fl::mean_activation(f, p).mean();
      fl::ModelFile file{tf.decoder.cfg, f};
      if (tf.kind == "unique") {
        if (tf.side != fl::kIqaPatchSide) throw fl::ArgumentError("--kind unique requires --side 8");
        fl::UniqueModel m;
        m.filter_set = std::move(f);
        m.training_chain = std::move(chain);
        file.model = std::move(m);
      }
      fl::save_model(file, tf.output.out, tf.output.encoding);
      std::printf("final_objective\tmean_activation\n");
      std::printf("%.9g\t%.9g\n", objective, mean_rho);
    };
  });

  // train-msunique
  struct {
    fs::path input_dir;
    int patches_per_image = 100;
    std::vector<int> widths = fl::kDefaultMsUniqueWidths;
    double edge_weight = 2.0;
    std::uint64_t seed = 1;
    DecoderFlags decoder;
    OutputFlags output;
  } tm;
  auto* train_ms = app.add_subcommand("train-msunique", "Train the five filter sets of a multi-model estimator");
  train_ms->add_option("--input-dir", tm.input_dir)->required();
  train_ms->add_option("--patches-per-image", tm.patches_per_image)->capture_default_str()->check(
      CLI::PositiveNumber);
  train_ms->add_option("--widths", tm.widths, "Five hidden sizes")
      ->delimiter(',')
      ->expected(fl::MsUniqueModel::kModelCount)
      ->default_str("81,121,169,400,625")
      ->check(CLI::PositiveNumber);
  train_ms->add_option("--edge-weight", tm.edge_weight)->capture_default_str()->check(CLI::Range(1.0, 1e9));
  train_ms->add_option("--seed", tm.seed)->capture_default_str();
  tm.decoder.add(train_ms);
  tm.output.add(train_ms);
  train_ms->callback([&] {
    run = [&] {
      const auto paths = require_images(tm.input_dir);
      const fl::PatchMatrix raw =
          sample_directory(paths, tm.patches_per_image, fl::kIqaPatchSide, fl::derive_seed(tm.seed, 0));
      fl::MsUniqueModel m = fl::train_msunique(raw, tm.decoder.cfg, fl::derive_seed(tm.seed, 1), tm.widths,
                                               tm.edge_weight);
      if (!m.spans_both_regimes()) std::fprintf(stderr, "warning: widths do not span both regimes\n");
      fl::save_model({tm.decoder.cfg, std::move(m)}, tm.output.out, tm.output.encoding);
    };
  });

  // iqa-score
  struct {
    fs::path model, ref, dist;
  } is;
  auto* iqa_score = app.add_subcommand("iqa-score", "Quality of a distorted image relative to its reference");
  iqa_score->add_option("--model", is.model)->required();
  iqa_score->add_option("--ref", is.ref)->required();
  iqa_score->add_option("--dist", is.dist)->required();
  iqa_score->callback([&] {
    run = [&] {
      const IqaModel model = load_iqa_model(is.model);
      const fl::Image ref = fl::load_image(is.ref);
      const fl::Image dist = fl::load_image(is.dist);
      const fl::ScoreResult r = std::visit(
          [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, fl::UniqueModel>)
              return fl::unique_score(ref, dist, m);
            else
              return fl::msunique_score(ref, dist, m);
          },
          model);
      if (r.degenerate) std::fprintf(stderr, "warning: constant feature vector; score set to 0\n");
      std::printf("%.17g\n", r.value);
    };
  });

  // iqa-eval
  struct {
    fs::path model, manifest;
  } ie;
  auto* iqa_eval = app.add_subcommand("iqa-eval", "Validate quality scores against subjective scores");
  iqa_eval->add_option("--model", ie.model)->required();
  iqa_eval->add_option("--manifest", ie.manifest, "TSV: ref, dist, subjective[, std]")->required();
  iqa_eval->callback([&] {
    run = [&] {
      const IqaModel model = load_iqa_model(ie.model);
      std::vector<fl::IqaSample> samples;
      for (const auto& row : fl::read_iqa_manifest(ie.manifest)) samples.push_back(fl::load_iqa_sample(row));
      const fl::MetricTable t = std::visit([&](const auto& m) { return fl::evaluate(samples, m); }, model);
      std::printf("rmse\toutlier_ratio\tpearson\tspearman\n");
      print_row({t.rmse, t.outlier_ratio, t.pearson, t.spearman});
    };
  });

  // train-texture
  struct {
    fs::path input_dir;
    fl::TextureTrainingConfig cfg;
    std::string whitening = "training";
    double structure_epsilon = fl::default_structure_regularizer().epsilon;
    std::uint64_t seed = 1;
    DecoderFlags decoder;
    OutputFlags output;
  } tt;
  auto* train_texture = app.add_subcommand("train-texture", "Train the color and structure hierarchy");
  train_texture->add_option("--input-dir", tt.input_dir, "Training images, at least 72x72")->required();
  train_texture->add_option("--color-h", tt.cfg.dims.color_h)->capture_default_str()->check(CLI::PositiveNumber);
  train_texture->add_option("--h2", tt.cfg.dims.h2)->capture_default_str()->check(CLI::PositiveNumber);
  train_texture->add_option("--h3", tt.cfg.dims.h3)->capture_default_str()->check(CLI::PositiveNumber);
  train_texture->add_option("--h-final", tt.cfg.dims.h_final)->capture_default_str()->check(CLI::PositiveNumber);
  train_texture->add_option("--pool-size", tt.cfg.dims.pool_size)->capture_default_str()->check(
      CLI::PositiveNumber);
  train_texture->add_option("--color-patches", tt.cfg.color_patches)->capture_default_str()->check(
      CLI::PositiveNumber);
  train_texture->add_option("--crops", tt.cfg.crops, "Random 72x72 crops")->capture_default_str()->check(
      CLI::PositiveNumber);
  train_texture->add_option("--max-samples", tt.cfg.max_samples_per_layer)->capture_default_str()->check(
      CLI::PositiveNumber);
  train_texture->add_option("--min-samples", tt.cfg.min_samples_per_layer)->capture_default_str()->check(
      CLI::PositiveNumber);
  train_texture->add_option("--whitening", tt.whitening, "Structure whitening: training, refit or none")
      ->capture_default_str()
      ->check(CLI::IsMember({"training", "refit", "none"}));
  train_texture->add_option("--structure-epsilon", tt.structure_epsilon, "Relative regularizer for P2 whitening")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train_texture->add_option("--seed", tt.seed)->capture_default_str();
  tt.decoder.add(train_texture);
  tt.output.add(train_texture);
  train_texture->callback([&] {
    run = [&] {
      tt.cfg.decoder = tt.decoder.cfg;
      tt.cfg.whitening = fl::structure_whitening_from_string(tt.whitening);
      tt.cfg.structure_regularizer = {tt.structure_epsilon, fl::EpsilonMode::kRelative};
      const auto images = load_all(require_images(tt.input_dir));
      fl::TextureModel m = fl::train_texture_model(images, tt.cfg, tt.seed);
      fl::save_model({tt.cfg.decoder, std::move(m)}, tt.output.out, tt.output.encoding);
    };
  });

  // texture-index
  struct {
    fs::path model, manifest;
    bool raw_pixels = false;
    OutputFlags output;
  } ti;
  auto* texture_index = app.add_subcommand("texture-index", "Compute color and structure features for a corpus");
  texture_index->add_option("--model", ti.model)->required();
  texture_index->add_option("--manifest", ti.manifest, "TSV: image_path, class_label")->required();
  texture_index->add_flag("--raw-pixels", ti.raw_pixels, "Use resized pixels as structure features (baseline)");
  ti.output.add(texture_index);
  texture_index->callback([&] {
    run = [&] {
      const auto model = load_kind<fl::TextureModel>(ti.model, "texture");
      const auto corpus = fl::load_texture_corpus(ti.manifest);
      auto index = fl::build_index(corpus, model, ti.raw_pixels ? fl::StructureMode::kRawPixels
                                                                : fl::StructureMode::kLearned);
      fl::save_model({std::nullopt, std::move(index)}, ti.output.out, ti.output.encoding);
    };
  });

  // texture-query
  struct {
    fs::path index;
    std::string query_id;
    double prefilter = fl::kDefaultPrefilterFraction;
  } tq;
  auto* texture_query = app.add_subcommand("texture-query", "Rank the corpus against one indexed image");
  texture_query->add_option("--index", tq.index)->required();
  texture_query->add_option("--query-id", tq.query_id, "Image path as written in the manifest")->required();
  texture_query->add_option("--prefilter", tq.prefilter, "Fraction kept by the color stage")
      ->capture_default_str()
      ->check(CLI::Range(1e-9, 1.0));
  texture_query->callback([&] {
    run = [&] {
      const auto index = load_kind<fl::RetrievalIndex>(tq.index, "index");
      if (index.find(tq.query_id) < 0) throw fl::ArgumentError("query id not in index: " + tq.query_id);
      const fl::RankedResult r = fl::query(index, tq.query_id, tq.prefilter);
      std::printf("rank\tid\tlabel\tscore\n");
      for (std::size_t i = 0; i < r.ranked_ids.size(); ++i)
        std::printf("%zu\t%s\t%d\t%.6f\n", i + 1, r.ranked_ids[i].c_str(), r.ranked_labels[i], r.scores[i]);
    };
  });

  // texture-eval
  struct {
    fs::path index;
    double prefilter = fl::kDefaultPrefilterFraction;
  } tv;
  auto* texture_eval = app.add_subcommand("texture-eval", "Query every indexed image; print P@1, MRR and MAP");
  texture_eval->add_option("--index", tv.index)->required();
  texture_eval->add_option("--prefilter", tv.prefilter)->capture_default_str()->check(CLI::Range(1e-9, 1.0));
  texture_eval->callback([&] {
    run = [&] {
      const fl::RetrievalMetrics m = fl::evaluate_index(load_kind<fl::RetrievalIndex>(tv.index, "index"), tv.prefilter);
      std::printf("P@1\tMRR\tMAP\n");
      print_row({m.precision_at_1, m.mrr, m.map});
    };
  });

  // robustness
  struct {
    fs::path model, manifest;
    std::vector<double> sigmas{0, 5, 25, 50, 75, 100};
    std::uint64_t seed = 1;
    double prefilter = fl::kDefaultPrefilterFraction;
    bool raw_pixels = false;
  } rb;
  auto* robustness = app.add_subcommand("robustness", "Retrieval metrics under additive Gaussian noise");
  robustness->add_option("--model", rb.model)->required();
  robustness->add_option("--manifest", rb.manifest)->required();
  robustness->add_option("--sigmas", rb.sigmas, "Noise standard deviations on the 8-bit scale")
      ->delimiter(',')
      ->default_str("0,5,25,50,75,100")
      ->check(CLI::NonNegativeNumber);
  robustness->add_option("--seed", rb.seed)->capture_default_str();
  robustness->add_option("--prefilter", rb.prefilter)->capture_default_str()->check(CLI::Range(1e-9, 1.0));
  robustness->add_flag("--raw-pixels", rb.raw_pixels, "Raw-pixel structure baseline");
  robustness->callback([&] {
    run = [&] {
      const auto model = load_kind<fl::TextureModel>(rb.model, "texture");
      const auto corpus = fl::load_texture_corpus(rb.manifest);
      const auto rows = fl::robustness_sweep(corpus, model, rb.sigmas, rb.seed, rb.prefilter,
                                             rb.raw_pixels ? fl::StructureMode::kRawPixels
                                                           : fl::StructureMode::kLearned);
      std::printf("sigma\tP@1\tMRR\tMAP\n");
      for (const fl::SweepRow& r : rows) {
        std::printf("%g\t", r.sigma);
        print_row({r.metrics.precision_at_1, r.metrics.mrr, r.metrics.map});
      }
    };
  });

  // synth
  struct {
    std::string kind;
    fs::path out_dir;
    std::uint64_t seed = 1;
    int count = 0;
    int size = 0;
    int samples = 3;
  } sy;
  auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic corpus");
  synth->add_option("--kind", sy.kind, "natural, texture or iqa")->required()->check(
      CLI::IsMember({"natural", "texture", "iqa"}));
  synth->add_option("--out-dir", sy.out_dir)->required();
  synth->add_option("--seed", sy.seed)->capture_default_str();
  synth->add_option("--count", sy.count, "Images (natural), classes (texture) or references (iqa)")
      ->check(CLI::PositiveNumber);
  synth->add_option("--size", sy.size, "Image side in pixels")->check(CLI::Range(16, 4096));
  synth->add_option("--samples", sy.samples, "Samples per texture class")->capture_default_str()->check(
      CLI::PositiveNumber);
  synth->callback([&] {
    run = [&] {
      fs::create_directories(sy.out_dir);
      if (sy.kind == "natural") synth_natural(sy.out_dir, sy.seed, sy.count ? sy.count : 20, sy.size ? sy.size : 256);
      if (sy.kind == "texture")
        synth_texture(sy.out_dir, sy.seed, sy.count ? sy.count : 12, sy.samples, sy.size ? sy.size : 128);
      if (sy.kind == "iqa") synth_iqa(sy.out_dir, sy.seed, sy.count ? sy.count : 10, sy.size ? sy.size : 128);
    };
  });

  // curet-prepare
  struct {
    fs::path in_dir, out_dir;
    int tile = 128;
  } cp;
  auto* curet = app.add_subcommand("curet-prepare", "Tile view-55 images of a CUReT-style tree into a corpus");
  curet->add_option("--in-dir", cp.in_dir, "One subdirectory per class")->required();
  curet->add_option("--out-dir", cp.out_dir)->required();
  curet->add_option("--tile", cp.tile)->capture_default_str()->check(CLI::PositiveNumber);
  curet->callback([&] {
    run = [&] {
      fs::create_directories(cp.out_dir);
      curet_prepare(cp.in_dir, cp.out_dir, cp.tile);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    run();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return 0;
}
