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


// Python bindings. Images cross the boundary as (height, width, 3) float64
// arrays in [0, 1]; patch matrices as (d, n) arrays, one patch per column.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "filterlearn/decoder.hpp"
#include "filterlearn/errors.hpp"
#include "filterlearn/image.hpp"
#include "filterlearn/iqa.hpp"
#include "filterlearn/metrics.hpp"
#include "filterlearn/model_io.hpp"
#include "filterlearn/synth.hpp"
#include "filterlearn/texture.hpp"
#include "filterlearn/whitening.hpp"

namespace py = pybind11;
namespace fl = filterlearn;

namespace {

using ImageArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

fl::Image to_image(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw fl::ArgumentError("image must have shape (height, width, 3)");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  std::vector<double> data(a.data(), a.data() + a.size());
  return fl::Image(w, h, std::move(data));
}

ImageArray to_array(const fl::Image& img) {
  ImageArray out({img.height(), img.width(), 3});
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size() * sizeof(double));
  return out;
}

std::vector<fl::LabeledImage> to_corpus(const std::vector<std::tuple<std::string, int, ImageArray>>& items) {
  std::vector<fl::LabeledImage> corpus;
  for (const auto& [id, label, img] : items) corpus.push_back({id, label, to_image(img)});
  return corpus;
}

fl::Regularizer regularizer(double epsilon, const std::string& mode) {
  if (mode == "relative") return {epsilon, fl::EpsilonMode::kRelative};
  if (mode == "absolute") return {epsilon, fl::EpsilonMode::kAbsolute};
  throw fl::ArgumentError("epsilon mode must be 'relative' or 'absolute'");
}

fl::MatrixEncoding encoding(const std::string& name) {
  if (name == "base64") return fl::MatrixEncoding::kBase64;
  if (name == "decimal") return fl::MatrixEncoding::kDecimal;
  throw fl::ArgumentError("encoding must be 'base64' or 'decimal'");
}

py::object payload_to_python(fl::ModelPayload payload) {
  return std::visit([](auto&& m) { return py::cast(std::move(m)); }, std::move(payload));
}

fl::ModelPayload payload_from_python(const py::object& obj) {
  if (py::isinstance<fl::FilterSet>(obj)) return obj.cast<fl::FilterSet>();
  if (py::isinstance<fl::UniqueModel>(obj)) return obj.cast<fl::UniqueModel>();
  if (py::isinstance<fl::MsUniqueModel>(obj)) return obj.cast<fl::MsUniqueModel>();
  if (py::isinstance<fl::TextureModel>(obj)) return obj.cast<fl::TextureModel>();
  if (py::isinstance<fl::RetrievalIndex>(obj)) return obj.cast<fl::RetrievalIndex>();
  throw fl::ArgumentError("not a serializable model");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Learned filter sets for image quality estimation and texture retrieval";

  static py::exception<fl::FormatError> format_error(m, "FormatError", PyExc_ValueError);
  static py::exception<fl::NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
  static py::exception<fl::DegenerateInputError> degenerate_error(m, "DegenerateInputError", PyExc_ValueError);
  static py::exception<fl::OptimizationError> optimization_error(m, "OptimizationError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const fl::ArgumentError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const fl::IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const fl::FormatError& e) {
      PyErr_SetString(format_error.ptr(), e.what());
    } catch (const fl::NumericError& e) {
      PyErr_SetString(numeric_error.ptr(), e.what());
    } catch (const fl::DegenerateInputError& e) {
      PyErr_SetString(degenerate_error.ptr(), e.what());
    } catch (const fl::OptimizationError& e) {
      PyErr_SetString(optimization_error.ptr(), e.what());
    }
  });

  // Images and patches.
  m.def("load_image", [](const std::filesystem::path& p) { return to_array(fl::load_image(p)); });
  m.def("save_ppm", [](const ImageArray& a, const std::filesystem::path& p) { fl::save_ppm(to_image(a), p); });
  m.def("resize_box", [](const ImageArray& a, int w, int h) { return to_array(fl::resize_box(to_image(a), w, h)); },
        py::arg("image"), py::arg("width"), py::arg("height"));
  m.def("flatten_patch", [](const ImageArray& a, int x, int y, int side) {
    return fl::flatten_patch(to_image(a), x, y, side);
  });
  m.def("extract_grid_patches", [](const ImageArray& a, int side) {
    return fl::extract_grid_patches(to_image(a), side);
  });
  m.def("sample_random_patches", [](const ImageArray& a, int count, int side, std::uint64_t seed) {
    fl::Rng rng(seed);
    return fl::sample_random_patches(to_image(a), count, side, rng);
  });
  m.def("add_gaussian_noise", [](const ImageArray& a, double sigma, std::uint64_t seed) {
    fl::Rng rng(seed);
    return to_array(fl::add_gaussian_noise(to_image(a), sigma, rng));
  });
  m.def("gaussian_blur", [](const ImageArray& a, double sigma) { return to_array(fl::gaussian_blur(to_image(a), sigma)); });

  // Whitening.
  py::class_<fl::WhiteningTransform>(m, "WhiteningTransform")
      .def_readonly("w", &fl::WhiteningTransform::w)
      .def_readonly("epsilon", &fl::WhiteningTransform::epsilon)
      .def_readonly("mean", &fl::WhiteningTransform::mean)
      .def_readonly("eigvals", &fl::WhiteningTransform::eigvals)
      .def_readonly("eigvecs", &fl::WhiteningTransform::eigvecs);
  py::class_<fl::WhiteningChain>(m, "WhiteningChain")
      .def_readonly("base_mean", &fl::WhiteningChain::base_mean)
      .def_readonly("stages", &fl::WhiteningChain::stages)
      .def_property_readonly("k", &fl::WhiteningChain::k)
      .def("apply", [](const fl::WhiteningChain& c, const fl::PatchMatrix& p) { return fl::apply_chain(c, p); });
  m.def("iterated_whiten",
        [](const fl::PatchMatrix& p, int k, double epsilon, const std::string& mode) {
          return fl::iterated_whiten(p, k, regularizer(epsilon, mode));
        },
        py::arg("patches"), py::arg("k") = 1, py::arg("epsilon") = 0.01, py::arg("epsilon_mode") = "relative");

  // Decoder.
  py::class_<fl::TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("rho", &fl::TrainingConfig::rho)
      .def_readwrite("beta", &fl::TrainingConfig::beta)
      .def_readwrite("lambda_", &fl::TrainingConfig::lambda)
      .def_readwrite("max_iterations", &fl::TrainingConfig::max_iterations)
      .def_readwrite("tolerance", &fl::TrainingConfig::tolerance)
      .def_readwrite("memory", &fl::TrainingConfig::memory)
      .def("digest", &fl::TrainingConfig::digest);
  py::class_<fl::FilterSet>(m, "FilterSet")
      .def_readonly("w1", &fl::FilterSet::w1)
      .def_readonly("b1", &fl::FilterSet::b1)
      .def_readonly("w2", &fl::FilterSet::w2)
      .def_readonly("b2", &fl::FilterSet::b2)
      .def_property_readonly("d", &fl::FilterSet::d)
      .def_property_readonly("h", &fl::FilterSet::h)
      .def_property_readonly("k", [](const fl::FilterSet& f) { return f.provenance.k; })
      .def_property_readonly("seed", [](const fl::FilterSet& f) { return f.provenance.seed; })
      .def("__eq__", [](const fl::FilterSet& a, const fl::FilterSet& b) { return a == b; });
  m.def("train",
        [](const fl::PatchMatrix& p, int h, const fl::TrainingConfig& cfg, std::uint64_t seed) {
          fl::TrainingReport report;
          fl::FilterSet f;
          {
            py::gil_scoped_release release;
            f = fl::train(p, h, cfg, seed, &report);
          }
          return py::make_tuple(std::move(f), report.initial_objective, report.final_objective, report.iterations);
        },
        py::arg("patches"), py::arg("h"), py::arg("config") = fl::TrainingConfig{}, py::arg("seed") = 0,
        "Returns (filter_set, initial_objective, final_objective, iterations).");
  m.def("objective_and_gradient", [](const Eigen::VectorXd& params, const fl::PatchMatrix& p, int h,
                                     const fl::TrainingConfig& cfg) {
    Eigen::VectorXd grad;
    const double j = fl::objective_and_gradient(params, p, h, cfg, grad);
    return py::make_tuple(j, grad);
  });
  m.def("pack_parameters", &fl::pack_parameters);
  m.def("forward", &fl::forward);
  m.def("mean_activation", &fl::mean_activation);

  // Metrics.
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return fl::spearman(x, y); });
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return fl::pearson(x, y); });
  m.def("rmse", [](const std::vector<double>& x, const std::vector<double>& y) {
    return fl::rmse(std::span<const double>(x), std::span<const double>(y));
  });
  m.def("fractional_ranks", [](const std::vector<double>& x) { return fl::fractional_ranks(x); });

  // Quality estimation.
  py::class_<fl::UniqueModel>(m, "UniqueModel")
      .def_readonly("filter_set", &fl::UniqueModel::filter_set)
      .def_property(
          "reuse_training_chain",
          [](const fl::UniqueModel& u) { return u.protocol == fl::WhiteningProtocol::kReuseTraining; },
          [](fl::UniqueModel& u, bool reuse) {
            u.protocol = reuse ? fl::WhiteningProtocol::kReuseTraining : fl::WhiteningProtocol::kRefit;
          })
      .def("__eq__", [](const fl::UniqueModel& a, const fl::UniqueModel& b) { return a == b; });
  py::class_<fl::MsUniqueModel>(m, "MsUniqueModel")
      .def_readwrite("edge_weight", &fl::MsUniqueModel::edge_weight)
      .def_property_readonly("h_values",
                             [](const fl::MsUniqueModel& ms) {
                               std::vector<int> hs;
                               for (const auto& mem : ms.members) hs.push_back(mem.filter_set.h());
                               return hs;
                             })
      .def("spans_both_regimes", &fl::MsUniqueModel::spans_both_regimes)
      .def("__eq__", [](const fl::MsUniqueModel& a, const fl::MsUniqueModel& b) { return a == b; });
  m.def("train_unique",
        [](const fl::PatchMatrix& raw, const fl::TrainingConfig& cfg, std::uint64_t seed, int h) {
          py::gil_scoped_release release;
          return fl::train_unique(raw, cfg, seed, h);
        },
        py::arg("raw_patches"), py::arg("config") = fl::TrainingConfig{}, py::arg("seed") = 0, py::arg("h") = 400);
  m.def("train_msunique",
        [](const fl::PatchMatrix& raw, const fl::TrainingConfig& cfg, std::uint64_t seed, const std::vector<int>& widths,
           double edge_weight) {
          py::gil_scoped_release release;
          return fl::train_msunique(raw, cfg, seed, widths, edge_weight);
        },
        py::arg("raw_patches"), py::arg("config") = fl::TrainingConfig{}, py::arg("seed") = 0,
        py::arg("widths") = fl::kDefaultMsUniqueWidths, py::arg("edge_weight") = 2.0);
  m.def("unique_score", [](const ImageArray& ref, const ImageArray& dist, const fl::UniqueModel& model) {
    const auto r = fl::unique_score(to_image(ref), to_image(dist), model);
    return py::make_tuple(r.value, r.degenerate);
  }, "Returns (score, degenerate).");
  m.def("msunique_score", [](const ImageArray& ref, const ImageArray& dist, const fl::MsUniqueModel& model) {
    const auto r = fl::msunique_score(to_image(ref), to_image(dist), model);
    return py::make_tuple(r.value, r.degenerate);
  }, "Returns (score, degenerate).");

  // Texture retrieval.
  py::class_<fl::TextureTrainingConfig>(m, "TextureTrainingConfig")
      .def(py::init<>())
      .def_readwrite("decoder", &fl::TextureTrainingConfig::decoder)
      .def_property(
          "dims",
          [](const fl::TextureTrainingConfig& c) {
            return py::make_tuple(c.dims.color_h, c.dims.h2, c.dims.h3, c.dims.h_final, c.dims.pool_size);
          },
          [](fl::TextureTrainingConfig& c, const std::tuple<int, int, int, int, int>& d) {
            std::tie(c.dims.color_h, c.dims.h2, c.dims.h3, c.dims.h_final, c.dims.pool_size) = d;
          },
          "(color_h, h2, h3, h_final, pool_size)")
      .def_readwrite("color_patches", &fl::TextureTrainingConfig::color_patches)
      .def_readwrite("crops", &fl::TextureTrainingConfig::crops)
      .def_readwrite("max_samples_per_layer", &fl::TextureTrainingConfig::max_samples_per_layer)
      .def_readwrite("min_samples_per_layer", &fl::TextureTrainingConfig::min_samples_per_layer);
  py::class_<fl::TextureModel>(m, "TextureModel")
      .def_readonly("color_filters", &fl::TextureModel::color_filters)
      .def_readonly("p2_filters", &fl::TextureModel::p2_filters)
      .def_readonly("p3_filters", &fl::TextureModel::p3_filters)
      .def_readonly("final_filters", &fl::TextureModel::final_filters)
      .def_readonly("pool_size", &fl::TextureModel::pool_size)
      .def("__eq__", [](const fl::TextureModel& a, const fl::TextureModel& b) { return a == b; });
  py::class_<fl::RetrievalIndex>(m, "RetrievalIndex")
      .def_property_readonly("ids",
                             [](const fl::RetrievalIndex& idx) {
                               std::vector<std::string> ids;
                               for (const auto& e : idx.entries) ids.push_back(e.id);
                               return ids;
                             })
      .def("__len__", [](const fl::RetrievalIndex& idx) { return idx.entries.size(); })
      .def("__eq__", [](const fl::RetrievalIndex& a, const fl::RetrievalIndex& b) { return a == b; });
  m.def("train_texture_model",
        [](const std::vector<ImageArray>& images, const fl::TextureTrainingConfig& cfg, std::uint64_t seed) {
          std::vector<fl::Image> imgs;
          for (const auto& a : images) imgs.push_back(to_image(a));
          py::gil_scoped_release release;
          return fl::train_texture_model(imgs, cfg, seed);
        },
        py::arg("images"), py::arg("config") = fl::TextureTrainingConfig{}, py::arg("seed") = 0);
  m.def("color_feature", [](const ImageArray& a, const fl::TextureModel& tm) { return fl::color_feature(to_image(a), tm); });
  m.def("structure_feature",
        [](const ImageArray& a, const fl::TextureModel& tm) { return fl::structure_feature(to_image(a), tm); });
  m.def("top_k_pool", &fl::top_k_pool);
  m.def("build_index",
        [](const std::vector<std::tuple<std::string, int, ImageArray>>& items, const fl::TextureModel& tm,
           bool raw_pixels) {
          return fl::build_index(to_corpus(items), tm,
                                 raw_pixels ? fl::StructureMode::kRawPixels : fl::StructureMode::kLearned);
        },
        py::arg("corpus"), py::arg("model"), py::arg("raw_pixels") = false,
        "corpus: list of (id, label, image).");
  m.def("query",
        [](const fl::RetrievalIndex& idx, const std::string& id, double fraction) {
          const auto r = fl::query(idx, id, fraction);
          return py::make_tuple(r.ranked_ids, r.ranked_labels, r.scores);
        },
        py::arg("index"), py::arg("query_id"), py::arg("prefilter") = fl::kDefaultPrefilterFraction,
        "Returns (ids, labels, scores) in rank order.");
  m.def("evaluate_index",
        [](const fl::RetrievalIndex& idx, double fraction) {
          const auto r = fl::evaluate_index(idx, fraction);
          return py::dict(py::arg("p_at_1") = r.precision_at_1, py::arg("mrr") = r.mrr, py::arg("map") = r.map);
        },
        py::arg("index"), py::arg("prefilter") = fl::kDefaultPrefilterFraction);

  // Synthetic data.
  m.def("natural_like_image", [](int size, std::uint64_t seed) {
    fl::Rng rng(seed);
    return to_array(fl::natural_like_image(size, rng));
  });
  m.def("natural_like_patches", [](int count, int side, std::uint64_t seed) {
    fl::Rng rng(seed);
    return fl::natural_like_patches(count, side, rng);
  });
  m.def("texture_corpus",
        [](int classes, int samples, int size, std::uint64_t seed) {
          std::vector<py::tuple> out;
          for (auto& item : fl::texture_corpus(fl::default_texture_specs(classes, seed), samples, size, seed))
            out.push_back(py::make_tuple(item.id, item.label, to_array(item.image)));
          return out;
        },
        py::arg("classes") = 12, py::arg("samples") = 3, py::arg("size") = 128, py::arg("seed") = 0,
        "List of (id, label, image).");

  // Model files.
  m.def("serialize_model",
        [](const py::object& model, const std::string& enc) {
          return fl::serialize_model({std::nullopt, payload_from_python(model)}, encoding(enc));
        },
        py::arg("model"), py::arg("encoding") = "base64");
  m.def("deserialize_model", [](const std::string& text) { return payload_to_python(fl::deserialize_model(text).model); });
  m.def("save_model",
        [](const py::object& model, const std::filesystem::path& path, const std::string& enc) {
          fl::save_model({std::nullopt, payload_from_python(model)}, path, encoding(enc));
        },
        py::arg("model"), py::arg("path"), py::arg("encoding") = "base64");
  m.def("load_model", [](const std::filesystem::path& path) { return payload_to_python(fl::load_model(path).model); });
}
