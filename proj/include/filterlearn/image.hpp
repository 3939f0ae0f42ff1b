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

// Image ingestion: PPM/PNG decoding, box resizing, patch extraction and
// noise injection.
//
// Patch flattening order (stable, serialized filters depend on it):
//
//   index(c, row, col) = c * side * side + row * side + col
//
// i.e. all red samples first (row-major), then green, then blue.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "filterlearn/random.hpp"

namespace filterlearn {

/// d x n matrix; column j is one flattened patch.
using PatchMatrix = Eigen::MatrixXd;

/// Shape and entries identical (Eigen's operator== requires equal shapes).
template <class A, class B>
bool exactly_equal(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.derived().array() == b.derived().array()).all();
}

/// RGB image with intensities in [0,1], stored row-major with interleaved
/// channels: data[(y * width + x) * 3 + c].
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  double at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  double& at(int x, int y, int c) { return data_[index(x, y, c)]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Reads a binary PPM (P6, maxval 255) or, when built with libpng, a PNG.
/// Throws IoError when the file cannot be read and FormatError on a bad header.
Image load_image(const std::filesystem::path& path);

/// Writes a binary P6 file; intensities are rounded to the nearest 8-bit code.
void save_ppm(const Image& img, const std::filesystem::path& path);

/// Area-weighted box filter resize.
Image resize_box(const Image& img, int width, int height);

Image crop(const Image& img, int x, int y, int width, int height);

/// Flattens the side x side window whose top-left corner is (x, y).
Eigen::VectorXd flatten_patch(const Image& img, int x, int y, int side);

/// Inverse of flatten_patch for a length 3*side*side vector.
Image unflatten_patch(std::span<const double> values, int side);

/// `count` windows fully inside the image, uniform top-left corners.
PatchMatrix sample_random_patches(const Image& img, int count, int side, Rng& rng);

/// Non-overlapping tiling, left-to-right then top-to-bottom. Dimensions must
/// be exact multiples of `side`; see crop_to_multiple.
PatchMatrix extract_grid_patches(const Image& img, int side);

/// Discards the right/bottom remainder so both dimensions divide `side`.
Image crop_to_multiple(const Image& img, int side);

/// x -> clamp(x + v / 255, 0, 1) with v ~ N(0, sigma^2); sigma is on the
/// 8-bit scale.
Image add_gaussian_noise(const Image& img, double sigma, Rng& rng);

/// Separable Gaussian blur with standard deviation `sigma` pixels, kernel
/// radius ceil(3 sigma), edges replicated. sigma == 0 is the identity.
Image gaussian_blur(const Image& img, double sigma);

}  // namespace filterlearn
