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

// Deterministic desk-scale corpora: 1/f colored noise standing in for natural
// images, procedural texture classes, and distorted reference/test pairs.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "filterlearn/image.hpp"
#include "filterlearn/random.hpp"

namespace filterlearn {

/// Colored noise with a 1/f amplitude (1/f^2 power) spectrum, mapped into
/// [0,1]. Channels share a luminance field plus weaker chroma fields.
Image natural_like_image(int size, Rng& rng);

/// `count` random side x side patches from freshly generated natural-like
/// images, at most 100 patches per image.
PatchMatrix natural_like_patches(int count, int side, Rng& rng);

enum class TextureKind { kGrating, kCheckerboard, kFilteredNoise, kGradientBlend };

std::string to_string(TextureKind kind);
TextureKind texture_kind_from_string(const std::string& name);

struct TextureSpec {
  TextureKind kind = TextureKind::kGrating;
  double orientation = 0.0;  // radians
  double frequency = 0.1;    // cycles per pixel, in (0, 0.5]
  std::array<double, 3> base_color{0.5, 0.5, 0.5};
  double contrast = 0.3;  // modulation amplitude, in [0, 0.5]
  int class_id = 0;

  void validate() const;
};

/// Renders one sample of a texture class. `sample_index` and `rng` vary the
/// phase/offset (and the noise realization for filtered noise) so samples of
/// one class are different crops of the same texture.
Image render_texture(const TextureSpec& spec, int size, int sample_index, Rng& rng);

/// A fixed, varied list of texture classes (kinds, orientations, frequencies
/// and colors), deterministic in `seed`.
std::vector<TextureSpec> default_texture_specs(int classes, std::uint64_t seed);

struct LabeledImage {
  std::string id;
  int label = 0;
  Image image;
};

/// classes x samples_per_class rendered textures, ids "c<class>_s<sample>".
std::vector<LabeledImage> texture_corpus(const std::vector<TextureSpec>& specs, int samples_per_class,
                                         int size, std::uint64_t seed);

enum class DistortionKind { kGaussianBlur, kGaussianNoise, kContrastShift };

DistortionKind distortion_kind_from_string(const std::string& name);
std::string to_string(DistortionKind kind);

/// Returns (reference, distorted). Level is the blur sigma in pixels, the
/// noise sigma on the 8-bit scale, or the contrast reduction x -> m + (x - m)
/// / (1 + level) around the image mean m. Level 0 returns two equal images.
std::pair<Image, Image> make_distorted_pair(const Image& img, DistortionKind kind, double level, Rng& rng);

}  // namespace filterlearn
