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


// Acceptance suite: one PASS/FAIL line per criterion, with the measured value,
// the threshold and the wall time. Exit status is the number of failures.
//
// Seeds here differ from the ones used while choosing the texture defaults.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "filterlearn/decoder.hpp"
#include "filterlearn/errors.hpp"
#include "filterlearn/iqa.hpp"
#include "filterlearn/lbfgs.hpp"
#include "filterlearn/metrics.hpp"
#include "filterlearn/model_io.hpp"
#include "filterlearn/random.hpp"
#include "filterlearn/synth.hpp"
#include "filterlearn/texture.hpp"
#include "filterlearn/whitening.hpp"
#include "oracles.hpp"

namespace filterlearn {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [miss]");
    pass = pass && ok;
  }
  Outcome done() const { return {pass, detail.str()}; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Eigen::MatrixXd sample_covariance(const PatchMatrix& p) {
  const PatchMatrix c = p.colwise() - p.rowwise().mean();
  return c * c.transpose() / static_cast<double>(p.cols() - 1);
}

// Gaussian data through a fixed mixing with singular values spanning one
// decade: full rank and well conditioned.
PatchMatrix well_conditioned(int d, int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(d, d, [&](Eigen::Index, Eigen::Index) { return normal(rng); });
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  const Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(d, 0.0, -1.0).unaryExpr([](double e) { return std::pow(10.0, e); });
  const Eigen::MatrixXd z = Eigen::MatrixXd::NullaryExpr(d, n, [&](Eigen::Index, Eigen::Index) { return normal(rng); });
  return q * s.asDiagonal() * z;
}

Outcome whitening_identity() {
  Check c;
  Rng rng(101);
  const PatchMatrix natural = natural_like_patches(10000, 8, rng);
  const auto [white, chain] = iterated_whiten(natural, 10, Regularizer::high_k());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(natural.rows(), natural.rows());
  const double max_dev = (sample_covariance(white) - id).cwiseAbs().maxCoeff();
  c.require(max_dev < 0.05, "k=10 natural d=192 n=10000 max|cov-I|=" + fmt("%.4g", max_dev) + " < 0.05");

  const PatchMatrix good = well_conditioned(192, 10000, rng);
  const auto [white1, chain1] = iterated_whiten(good, 1, Regularizer::none());
  const double rel = (sample_covariance(white1) - id).norm() / id.norm();
  c.require(rel < 1e-6, "k=1 eps=0 relative Frobenius error=" + fmt("%.3g", rel) + " < 1e-6");
  return c.done();
}

Outcome gradient_correctness() {
  Rng rng(102);
  std::uniform_int_distribution<int> dims(2, 16), hidden(1, 8), count(1, 32);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = dims(rng), h = hidden(rng), n = count(rng);
    const Eigen::MatrixXd p = Eigen::MatrixXd::NullaryExpr(d, n, [&](Eigen::Index, Eigen::Index) { return normal(rng); });
    const Eigen::VectorXd params =
        Eigen::VectorXd::NullaryExpr(parameter_count(d, h), [&](Eigen::Index) { return 0.5 * normal(rng); });
    const TrainingConfig cfg;
    Eigen::VectorXd analytic;
    objective_and_gradient(params, p, h, cfg, analytic);
    const Eigen::VectorXd numeric = oracle::central_difference(
        [&](const Eigen::VectorXd& x) {
          Eigen::VectorXd unused;
          return objective_and_gradient(x, p, h, cfg, unused);
        },
        params);
    worst = std::max(worst, oracle::gradient_relative_error(analytic, numeric));
  }
  return {worst < 1e-6, "20 instances, max relative error=" + fmt("%.3g", worst) + " < 1e-6"};
}

Outcome optimizer_sanity() {
  Check c;
  const Objective quadratic = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    g[0] = 2.0 * (x[0] - 3.0);
    return (x[0] - 3.0) * (x[0] - 3.0);
  };
  const LbfgsResult q = minimize(quadratic, Eigen::VectorXd::Zero(1), {});
  c.require(std::abs(q.x[0] - 3.0) < 1e-6, "quadratic |x-3|=" + fmt("%.3g", std::abs(q.x[0] - 3.0)) + " < 1e-6");

  const Objective rosenbrock = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g.resize(2);
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  LbfgsOptions opts;
  opts.max_iterations = 200;
  const LbfgsResult r = minimize(rosenbrock, Eigen::Vector2d(-1.2, 1.0), opts);
  const double err = (r.x - Eigen::Vector2d(1.0, 1.0)).lpNorm<Eigen::Infinity>();
  c.require(err < 1e-4 && r.iterations <= 200,
            "Rosenbrock err=" + fmt("%.3g", err) + " < 1e-4 in " + std::to_string(r.iterations) + " <= 200 iterations");
  return c.done();
}

Outcome training_sanity() {
  Check c;
  Rng rng(104);
  const auto [p, chain] = iterated_whiten(natural_like_patches(5000, 4, rng), 1, Regularizer::standard());
  TrainingConfig cfg;
  cfg.max_iterations = 200;
  TrainingReport report;
  const FilterSet f = train(p, 25, cfg, 104, &report);
  const double ratio = report.final_objective / report.initial_objective;
  c.require(ratio < 0.5, "d=48 h=25 n=5000: J/J0=" + fmt("%.4f", ratio) + " < 0.5");
  const double rho_hat = mean_activation(f, p).mean();
  c.require(rho_hat >= cfg.rho / 3 && rho_hat <= 3 * cfg.rho,
            "mean rho_hat=" + fmt("%.4f", rho_hat) + " in [" + fmt("%.4f", cfg.rho / 3) + ", " +
                fmt("%.3f", 3 * cfg.rho) + "]");
  return c.done();
}

// Shared by criteria 5 and 6: a UNIQUE-configured model (k = 1, h = 400)
// trained at desk scale.
const UniqueModel& desk_unique_model() {
  static const UniqueModel model = [] {
    Rng rng(105);
    TrainingConfig cfg;
    cfg.max_iterations = 150;
    return train_unique(natural_like_patches(10000, 8, rng), cfg, 105);
  }();
  return model;
}

Outcome iqa_monotonicity() {
  Check c;
  const UniqueModel& model = desk_unique_model();
  const auto specs = default_texture_specs(10, 205);
  int ok = 0, pairs = 0;
  bool reflexive = true;
  for (int i = 0; i < 10; ++i) {
    Rng rng = make_rng(205, i);
    const Image img = render_texture(specs[i], 128, 0, rng);
    reflexive = reflexive && unique_score(img, img, model).value == 1.0;
    double previous = std::numeric_limits<double>::infinity();
    for (double sigma : {0.0, 1.0, 2.0, 4.0}) {
      const double s = unique_score(img, gaussian_blur(img, sigma), model).value;
      if (sigma > 0.0) {
        ++pairs;
        ok += s <= previous;
      }
      previous = s;
    }
  }
  c.require(reflexive, "unique_score(x,x) == 1.0 on all 10 images");
  const double frac = static_cast<double>(ok) / pairs;
  c.require(frac >= 0.9, "non-increasing in blur for " + std::to_string(ok) + "/" + std::to_string(pairs) + " = " +
                             fmt("%.3f", frac) + " >= 0.9 of pairs");
  return c.done();
}

Outcome msunique_reduction() {
  Check c;
  const UniqueModel& unique = desk_unique_model();
  MsUniqueModel ms;
  ms.edge_weight = 1.0;
  ms.protocol = unique.protocol;
  ms.training_chain = unique.training_chain;
  ms.test_regularizer = unique.test_regularizer;
  for (int i = 0; i < MsUniqueModel::kModelCount; ++i)
    ms.members.push_back({unique.filter_set, classify_filters(unique.filter_set)});

  Rng rng(106);
  double worst = 0.0;
  bool reflexive = true;
  for (int i = 0; i < 5; ++i) {
    const Image ref = natural_like_image(96, rng);
    Rng noise = make_rng(106, i);
    const Image dist = add_gaussian_noise(gaussian_blur(ref, 0.5 * i), 5.0 * i, noise);
    worst = std::max(worst, std::abs(msunique_score(ref, dist, ms).value - unique_score(ref, dist, unique).value));
    reflexive = reflexive && msunique_score(ref, ref, ms).value == 1.0;
  }
  c.require(worst <= 1e-12, "5 identical models, edge_weight 1: max|ms - unique|=" + fmt("%.3g", worst) + " <= 1e-12");
  c.require(reflexive, "msunique_score(x,x) == 1.0");
  return c.done();
}

// Criteria 7 and 8 share one trained model and corpus.
struct TextureSetup {
  TextureModel model;
  std::vector<LabeledImage> corpus;
};

constexpr std::uint64_t kTextureTrainSeed = 11;
constexpr std::uint64_t kCorpusSeed = 31;

const TextureSetup& texture_setup() {
  static const TextureSetup setup = [] {
    Rng rng(kTextureTrainSeed);
    std::vector<Image> images;
    for (int i = 0; i < 40; ++i) images.push_back(natural_like_image(128, rng));
    TextureTrainingConfig cfg;
    cfg.color_patches = 5000;
    cfg.crops = 1000;
    cfg.max_samples_per_layer = 5000;
    cfg.decoder.max_iterations = 100;
    TextureSetup s;
    s.model = train_texture_model(images, cfg, kTextureTrainSeed);
    s.corpus = texture_corpus(default_texture_specs(12, kCorpusSeed), 3, 128, kCorpusSeed);
    return s;
  }();
  return setup;
}

Outcome texture_retrieval() {
  Check c;
  const TextureSetup& s = texture_setup();
  const RetrievalMetrics m = evaluate_index(build_index(s.corpus, s.model));
  c.require(m.precision_at_1 >= 0.8, "12x3 corpus P@1=" + fmt("%.4f", m.precision_at_1) + " >= 0.8");
  c.require(m.map >= 0.7, "MAP=" + fmt("%.4f", m.map) + " >= 0.7 (MRR=" + fmt("%.4f", m.mrr) + ")");
  return c.done();
}

Outcome robustness() {
  Check c;
  const TextureSetup& s = texture_setup();
  const std::vector<double> sigmas{0, 5, 25, 50, 75, 100};
  const auto learned = robustness_sweep(s.corpus, s.model, sigmas, 208);
  std::ostringstream table;
  for (const SweepRow& r : learned) table << (r.sigma ? " " : "") << r.sigma << ":" << fmt("%.3f", r.metrics.map);
  const double drop = learned.front().metrics.map - learned.back().metrics.map;
  c.require(drop <= 0.25, "MAP by sigma {" + table.str() + "}, drop at 100=" + fmt("%.4f", drop) + " <= 0.25");

  const std::vector<double> fifty{50};
  const auto raw = robustness_sweep(s.corpus, s.model, fifty, 208, kDefaultPrefilterFraction,
                                    StructureMode::kRawPixels);
  const double learned50 = learned[3].metrics.map, raw50 = raw.front().metrics.map;
  c.require(learned50 > raw50, "sigma=50 learned MAP=" + fmt("%.4f", learned50) + " > raw-pixel MAP=" +
                                   fmt("%.4f", raw50));
  return c.done();
}

Outcome metric_oracles() {
  Check c;
  using V = std::vector<double>;
  const V x{1, 2, 3, 4, 5}, rev{5, 4, 3, 2, 1};
  const double tol = 1e-12;
  const auto near = [&](double got, double want) { return std::abs(got - want) <= tol; };
  c.require(near(spearman(x, x), 1.0) && near(spearman(x, rev), -1.0) && near(spearman(V{1, 2, 3}, V{1, 3, 2}), 0.5),
            "spearman 1, -1, 0.5");
  V affine;
  for (double v : x) affine.push_back(2 * v + 1);
  c.require(near(pearson(x, affine), 1.0), "pearson(x, 2x+1)=1");
  c.require(near(rmse(std::span<const double>(x), std::span<const double>(x)), 0.0) &&
                near(rmse(V{0, 0}, V{3, 4}), std::sqrt(12.5)),
            "rmse 0, sqrt(12.5)");
  const std::vector<RankedResult> perfect{{1, {1, 1, 2}}, {2, {2, 1, 1}}};
  const std::vector<RankedResult> ap{{7, {7, 3, 7, 4}}};
  const std::vector<RankedResult> second{{1, {2, 1, 3}}};
  c.require(near(precision_at_1(perfect), 1.0) && near(mean_reciprocal_rank(perfect), 1.0) &&
                near(mean_average_precision(perfect), 1.0),
            "perfect rankings 1/1/1");
  c.require(near(mean_average_precision(ap), 5.0 / 6.0) && near(mean_reciprocal_rank(ap), 1.0) &&
                near(precision_at_1(ap), 1.0),
            "AP=5/6, MRR=1, P@1=1");
  c.require(near(mean_reciprocal_rank(second), 0.5) && near(precision_at_1(second), 0.0), "MRR=0.5, P@1=0");
  return c.done();
}

Outcome serialization() {
  Check c;
  Rng rng(110);
  const PatchMatrix raw = natural_like_patches(2000, 8, rng);
  TrainingConfig cfg;
  cfg.max_iterations = 30;
  const auto train_file = [&] {
    const auto [p, chain] = iterated_whiten(raw, 1, Regularizer::standard());
    return ModelFile{cfg, train(p, 64, cfg, 110)};
  };
  const ModelFile a = train_file();
  const std::string text = serialize_model(a, MatrixEncoding::kBase64);
  c.require(deserialize_model(text) == a, "filterset base64 round trip bit-exact");
  c.require(serialize_model(train_file(), MatrixEncoding::kBase64) == text, "same seed and flags give identical files");

  const TextureSetup& s = texture_setup();
  const ModelFile texture{std::nullopt, s.model};
  c.require(deserialize_model(serialize_model(texture)) == texture, "texture model round trip bit-exact");
  const ModelFile index{std::nullopt, build_index(s.corpus, s.model)};
  c.require(deserialize_model(serialize_model(index)) == index, "retrieval index round trip bit-exact");
  const ModelFile decimal = deserialize_model(serialize_model(a, MatrixEncoding::kDecimal));
  c.require(decimal == a, "decimal round trip exact");
  return c.done();
}

}  // namespace
}  // namespace filterlearn

int main() {
  using namespace filterlearn;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  // Budgets (0 = none stated) include any shared training a criterion
  // triggers first.
  const std::vector<Criterion> criteria{
      {1, "whitening identity", 60, whitening_identity},
      {2, "gradient correctness", 10, gradient_correctness},
      {3, "optimizer sanity", 5, optimizer_sanity},
      {4, "training sanity", 180, training_sanity},
      {5, "IQA reflexivity and monotonicity", 120, iqa_monotonicity},
      {6, "MS-UNIQUE reduction", 0, msunique_reduction},
      {7, "texture retrieval", 300, texture_retrieval},
      {8, "noise robustness", 600, robustness},
      {9, "metric oracles", 0, metric_oracles},
      {10, "serialization", 0, serialization},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0 || secs < c.budget_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    char budget[48] = "no budget";
    if (c.budget_s > 0) std::snprintf(budget, sizeof budget, "budget %.0f s%s", c.budget_s, in_time ? "" : ", exceeded");
    std::printf("criterion %d %s: %s | %s | %.1f s (%s)\n", c.id, c.name, pass ? "PASS" : "FAIL", out.detail.c_str(),
                secs, budget);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
