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

#include "filterlearn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "filterlearn/errors.hpp"

namespace filterlearn {
namespace {

using Complex = std::complex<double>;
using ComplexField = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kPi = std::numbers::pi;

// Signed frequency (cycles/pixel) of FFT bin i for length n.
double bin_frequency(int i, int n) { return (i <= n / 2 ? i : i - n) / static_cast<double>(n); }

// Real part of the 2-D inverse DFT, computed as row then column 1-D passes.
Eigen::MatrixXd inverse_fft2(const ComplexField& spectrum) {
  Eigen::FFT<double> fft;
  const int rows = static_cast<int>(spectrum.rows());
  const int cols = static_cast<int>(spectrum.cols());
  ComplexField tmp(rows, cols);
  std::vector<Complex> in, out;
  for (int r = 0; r < rows; ++r) {
    in.assign(cols, Complex{});
    for (int c = 0; c < cols; ++c) in[c] = spectrum(r, c);
    fft.inv(out, in);
    for (int c = 0; c < cols; ++c) tmp(r, c) = out[c];
  }
  Eigen::MatrixXd result(rows, cols);
  for (int c = 0; c < cols; ++c) {
    in.assign(rows, Complex{});
    for (int r = 0; r < rows; ++r) in[r] = tmp(r, c);
    fft.inv(out, in);
    for (int r = 0; r < rows; ++r) result(r, c) = out[r].real();
  }
  return result;
}

// White complex Gaussian noise shaped by `gain(fx, fy)`, normalized to zero
// mean and unit standard deviation.
template <class Gain>
Eigen::MatrixXd shaped_noise(int size, Rng& rng, Gain gain) {
  std::normal_distribution<double> normal;
  ComplexField spectrum(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      const double g = gain(bin_frequency(c, size), bin_frequency(r, size));
      spectrum(r, c) = g * Complex(normal(rng), normal(rng));
    }
  spectrum(0, 0) = 0.0;
  Eigen::MatrixXd field = inverse_fft2(spectrum);
  field.array() -= field.mean();
  const double sd = std::sqrt(field.squaredNorm() / static_cast<double>(field.size()));
  if (sd > 0.0) field /= sd;
  return field;
}

Eigen::MatrixXd pink_field(int size, Rng& rng) {
  return shaped_noise(size, rng, [size](double fx, double fy) {
    const double f = std::max(std::hypot(fx, fy), 1.0 / size);
    return 1.0 / f;
  });
}

double triangle(double t) {
  const double frac = t - std::floor(t);
  return 4.0 * std::abs(frac - 0.5) - 1.0;  // in [-1, 1], period 1
}

}  // namespace

Image natural_like_image(int size, Rng& rng) {
  if (size < 2) throw ArgumentError("natural_like_image: size must be >= 2");
  const Eigen::MatrixXd lum = pink_field(size, rng);
  const Eigen::MatrixXd chroma_a = pink_field(size, rng);
  const Eigen::MatrixXd chroma_b = pink_field(size, rng);

  std::uniform_real_distribution<double> mean_dist(0.3, 0.7);
  std::uniform_real_distribution<double> contrast_dist(0.08, 0.16);
  const std::array<double, 3> mean{mean_dist(rng), mean_dist(rng), mean_dist(rng)};
  const double contrast = contrast_dist(rng);
  // Opponent-style chroma axes: (R-G) and (R+G-2B), weaker than luminance.
  constexpr double kChroma = 0.3;
  const double axis_a[3] = {1.0, -1.0, 0.0};
  const double axis_b[3] = {0.5, 0.5, -1.0};

  std::normal_distribution<double> sensor(0.0, 0.004);
  Image img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = mean[c] + contrast * (lum(y, x) + kChroma * (axis_a[c] * chroma_a(y, x) +
                                                                      axis_b[c] * chroma_b(y, x)));
        img.at(x, y, c) = std::clamp(v + sensor(rng), 0.0, 1.0);
      }
  return img;
}

PatchMatrix natural_like_patches(int count, int side, Rng& rng) {
  if (count < 1) throw ArgumentError("natural_like_patches: count must be >= 1");
  if (side < 1) throw ArgumentError("natural_like_patches: side must be >= 1");
  constexpr int kPerImage = 100;
  const int size = std::max(64, 4 * side);
  PatchMatrix out(3 * side * side, count);
  int filled = 0;
  while (filled < count) {
    const int take = std::min(kPerImage, count - filled);
    const Image img = natural_like_image(size, rng);
    out.middleCols(filled, take) = sample_random_patches(img, take, side, rng);
    filled += take;
  }
  return out;
}

std::string to_string(TextureKind kind) {
  switch (kind) {
    case TextureKind::kGrating: return "grating";
    case TextureKind::kCheckerboard: return "checkerboard";
    case TextureKind::kFilteredNoise: return "filtered_noise";
    case TextureKind::kGradientBlend: return "gradient_blend";
  }
  return "unknown";
}

TextureKind texture_kind_from_string(const std::string& name) {
  for (TextureKind k : {TextureKind::kGrating, TextureKind::kCheckerboard, TextureKind::kFilteredNoise,
                        TextureKind::kGradientBlend})
    if (to_string(k) == name) return k;
  throw ArgumentError("unknown texture kind: " + name);
}

void TextureSpec::validate() const {
  if (!(frequency > 0.0 && frequency <= 0.5)) throw ArgumentError("TextureSpec: frequency must be in (0, 0.5]");
  if (!(contrast >= 0.0 && contrast <= 0.5)) throw ArgumentError("TextureSpec: contrast must be in [0, 0.5]");
  for (double c : base_color)
    if (!(c >= 0.0 && c <= 1.0)) throw ArgumentError("TextureSpec: base color outside [0,1]");
  if (!std::isfinite(orientation)) throw ArgumentError("TextureSpec: orientation must be finite");
}

Image render_texture(const TextureSpec& spec, int size, int sample_index, Rng& rng) {
  spec.validate();
  if (size < 16) throw ArgumentError("render_texture: size must be >= 16");
  if (sample_index < 0) throw ArgumentError("render_texture: sample_index must be >= 0");

  Rng local(derive_seed(rng(), static_cast<std::uint64_t>(sample_index)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double phase_u = unit(local);
  const double phase_v = unit(local);
  const double ox = unit(local) * size;
  const double oy = unit(local) * size;

  const double ct = std::cos(spec.orientation);
  const double st = std::sin(spec.orientation);
  const double f = spec.frequency;

  Eigen::MatrixXd field(size, size);
  if (spec.kind == TextureKind::kFilteredNoise) {
    // Oriented band-pass noise centered on (f cos, f sin) and its mirror.
    const double bandwidth = std::max(0.25 * f, 0.01);
    field = shaped_noise(size, local, [&](double fx, double fy) {
      const double a = std::hypot(fx - f * ct, fy - f * st);
      const double b = std::hypot(fx + f * ct, fy + f * st);
      return std::exp(-0.5 * a * a / (bandwidth * bandwidth)) +
             std::exp(-0.5 * b * b / (bandwidth * bandwidth));
    });
    field /= std::max(field.cwiseAbs().maxCoeff(), 1e-12);
  } else {
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double xs = x + ox, ys = y + oy;
        const double u = xs * ct + ys * st;
        const double v = -xs * st + ys * ct;
        double value = 0.0;
        switch (spec.kind) {
          case TextureKind::kGrating:
            value = std::sin(2.0 * kPi * (f * u + phase_u));
            break;
          case TextureKind::kCheckerboard: {
            const double s = std::sin(2.0 * kPi * (f * u + phase_u)) * std::sin(2.0 * kPi * (f * v + phase_v));
            value = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
            break;
          }
          case TextureKind::kGradientBlend:
            value = triangle(f * u + phase_u);
            break;
          case TextureKind::kFilteredNoise:
            break;
        }
        field(y, x) = value;
      }
  }

  Image img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = std::clamp(spec.base_color[c] + spec.contrast * field(y, x), 0.0, 1.0);
  return img;
}

std::vector<TextureSpec> default_texture_specs(int classes, std::uint64_t seed) {
  if (classes < 1) throw ArgumentError("default_texture_specs: classes must be >= 1");
  constexpr TextureKind kKinds[] = {TextureKind::kGrating, TextureKind::kCheckerboard,
                                    TextureKind::kFilteredNoise, TextureKind::kGradientBlend};
  Rng rng(derive_seed(seed, 0x7e47));
  std::uniform_real_distribution<double> color(0.25, 0.75);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<TextureSpec> specs;
  specs.reserve(classes);
  for (int i = 0; i < classes; ++i) {
    TextureSpec s;
    s.class_id = i;
    s.kind = kKinds[i % 4];
    // Orientation and frequency cycle on periods coprime with the kind cycle.
    s.orientation = kPi * ((i % 3) / 3.0 + 0.05 * jitter(rng));
    s.frequency = std::array{0.06, 0.11, 0.18, 0.25, 0.08}[i % 5] * (1.0 + jitter(rng));
    s.base_color = {color(rng), color(rng), color(rng)};
    s.contrast = 0.2 + std::abs(jitter(rng));
    specs.push_back(s);
  }
  return specs;
}

std::vector<LabeledImage> texture_corpus(const std::vector<TextureSpec>& specs, int samples_per_class,
                                         int size, std::uint64_t seed) {
  if (specs.empty()) throw ArgumentError("texture_corpus: no classes");
  if (samples_per_class < 1) throw ArgumentError("texture_corpus: samples_per_class must be >= 1");
  std::vector<LabeledImage> out;
  out.reserve(specs.size() * samples_per_class);
  for (const TextureSpec& spec : specs)
    for (int s = 0; s < samples_per_class; ++s) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(spec.class_id) * 1000 + s));
      out.push_back({"c" + std::to_string(spec.class_id) + "_s" + std::to_string(s), spec.class_id,
                     render_texture(spec, size, s, rng)});
    }
  return out;
}

std::string to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kGaussianBlur: return "blur";
    case DistortionKind::kGaussianNoise: return "noise";
    case DistortionKind::kContrastShift: return "contrast";
  }
  return "unknown";
}

DistortionKind distortion_kind_from_string(const std::string& name) {
  for (DistortionKind k : {DistortionKind::kGaussianBlur, DistortionKind::kGaussianNoise,
                           DistortionKind::kContrastShift})
    if (to_string(k) == name) return k;
  throw ArgumentError("unknown distortion: " + name);
}

std::pair<Image, Image> make_distorted_pair(const Image& img, DistortionKind kind, double level, Rng& rng) {
  if (!(level >= 0.0)) throw ArgumentError("make_distorted_pair: level must be >= 0");
  if (level == 0.0) return {img, img};
  switch (kind) {
    case DistortionKind::kGaussianBlur:
      return {img, gaussian_blur(img, level)};
    case DistortionKind::kGaussianNoise:
      return {img, add_gaussian_noise(img, level, rng)};
    case DistortionKind::kContrastShift: {
      double mean = 0.0;
      for (double v : img.data()) mean += v;
      mean /= static_cast<double>(img.data().size());
      Image out = img;
      for (double& v : out.data()) v = std::clamp(mean + (v - mean) / (1.0 + level), 0.0, 1.0);
      return {img, out};
    }
  }
  throw ArgumentError("make_distorted_pair: unknown distortion");
}

}  // namespace filterlearn
