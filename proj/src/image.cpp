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

#include "filterlearn/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#ifdef FILTERLEARN_HAVE_PNG
#include <png.h>
#endif

#include "filterlearn/errors.hpp"

namespace filterlearn {

Image::Image(int width, int height, double fill) {
  if (width < 1 || height < 1) throw ArgumentError("image dimensions must be positive");
  width_ = width;
  height_ = height;
  data_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
}

Image::Image(int width, int height, std::vector<double> data) {
  if (width < 1 || height < 1) throw ArgumentError("image dimensions must be positive");
  if (data.size() != static_cast<std::size_t>(width) * height * kChannels)
    throw ArgumentError("image data length does not match width*height*3");
  width_ = width;
  height_ = height;
  data_ = std::move(data);
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

int parse_header_int(std::istream& in, const char* what) {
  const std::string token = next_token(in);
  if (token.empty() || !std::all_of(token.begin(), token.end(), ::isdigit))
    throw FormatError(std::string("PPM header: bad ") + what);
  return std::stoi(token);
}

Image load_ppm(std::istream& in) {
  if (next_token(in) != "P6") throw FormatError("not a binary PPM (P6)");
  const int width = parse_header_int(in, "width");
  const int height = parse_header_int(in, "height");
  const int maxval = parse_header_int(in, "maxval");
  if (width < 1 || height < 1) throw FormatError("PPM header: zero dimension");
  if (maxval != 255) throw FormatError("PPM: only maxval 255 is supported");

  std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height * 3);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size())
    throw FormatError("PPM: truncated pixel data");

  std::vector<double> data(bytes.size());
  std::transform(bytes.begin(), bytes.end(), data.begin(),
                 [](unsigned char b) { return b / 255.0; });
  return Image(width, height, std::move(data));
}

#ifdef FILTERLEARN_HAVE_PNG
Image load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw FormatError("PNG: " + std::string(image.message));
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError("PNG: " + std::string(image.message));
  }
  std::vector<double> data(bytes.size());
  std::transform(bytes.begin(), bytes.end(), data.begin(),
                 [](unsigned char b) { return b / 255.0; });
  return Image(static_cast<int>(image.width), static_cast<int>(image.height), std::move(data));
}
#endif

// Integer overlap weights of a 1-D box resample from `src` to `dst` samples.
// Output sample o covers [o*src, (o+1)*src) and input sample i covers
// [i*dst, (i+1)*dst), both in units of 1/(src*dst).
struct Tap {
  int index;
  long long weight;
};

std::vector<std::vector<Tap>> box_taps(int src, int dst) {
  std::vector<std::vector<Tap>> taps(dst);
  for (int o = 0; o < dst; ++o) {
    const long long lo = static_cast<long long>(o) * src;
    const long long hi = lo + src;
    const int first = static_cast<int>(lo / dst);
    const int last = static_cast<int>((hi - 1) / dst);
    for (int i = first; i <= last; ++i) {
      const long long a = std::max(lo, static_cast<long long>(i) * dst);
      const long long b = std::min(hi, static_cast<long long>(i + 1) * dst);
      taps[o].push_back({i, b - a});
    }
  }
  return taps;
}

// Weighted mean accumulated around the first sample so that a constant
// window reproduces its value exactly.
template <class Get>
double weighted_mean(const std::vector<Tap>& taps, Get get) {
  const double base = get(taps.front().index);
  double acc = 0.0;
  long long total = 0;
  for (const Tap& t : taps) {
    acc += static_cast<double>(t.weight) * (get(t.index) - base);
    total += t.weight;
  }
  return base + acc / static_cast<double>(total);
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof magic);
  in.clear();
  in.seekg(0);
  if (magic[0] == 'P' && magic[1] == '6') return load_ppm(in);
  if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P' && magic[2] == 'N' &&
      magic[3] == 'G') {
#ifdef FILTERLEARN_HAVE_PNG
    return load_png(path);
#else
    throw FormatError("PNG support not compiled in: " + path.string());
#endif
  }
  throw FormatError("unsupported image format: " + path.string());
}

void save_ppm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), [](double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Image resize_box(const Image& img, int width, int height) {
  if (width < 1 || height < 1) throw ArgumentError("resize_box: zero target dimension");
  if (img.empty()) throw ArgumentError("resize_box: empty image");
  if (width == img.width() && height == img.height()) return img;

  const auto xtaps = box_taps(img.width(), width);
  const auto ytaps = box_taps(img.height(), height);

  Image horiz(width, img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < Image::kChannels; ++c)
        horiz.at(x, y, c) = weighted_mean(xtaps[x], [&](int i) { return img.at(i, y, c); });

  Image out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < Image::kChannels; ++c)
        out.at(x, y, c) = weighted_mean(ytaps[y], [&](int j) { return horiz.at(x, j, c); });
  return out;
}

Image crop(const Image& img, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width < 1 || height < 1 || x + width > img.width() ||
      y + height > img.height())
    throw ArgumentError("crop window outside image");
  Image out(width, height);
  for (int r = 0; r < height; ++r)
    for (int col = 0; col < width; ++col)
      for (int c = 0; c < Image::kChannels; ++c) out.at(col, r, c) = img.at(x + col, y + r, c);
  return out;
}

Eigen::VectorXd flatten_patch(const Image& img, int x, int y, int side) {
  if (side < 1 || x < 0 || y < 0 || x + side > img.width() || y + side > img.height())
    throw ArgumentError("patch window outside image");
  Eigen::VectorXd v(Image::kChannels * side * side);
  for (int c = 0; c < Image::kChannels; ++c)
    for (int r = 0; r < side; ++r)
      for (int col = 0; col < side; ++col)
        v[(c * side + r) * side + col] = img.at(x + col, y + r, c);
  return v;
}

Image unflatten_patch(std::span<const double> values, int side) {
  if (side < 1 || values.size() != static_cast<std::size_t>(Image::kChannels * side * side))
    throw ArgumentError("unflatten_patch: length is not 3*side*side");
  Image out(side, side);
  for (int c = 0; c < Image::kChannels; ++c)
    for (int r = 0; r < side; ++r)
      for (int col = 0; col < side; ++col) out.at(col, r, c) = values[(c * side + r) * side + col];
  return out;
}

PatchMatrix sample_random_patches(const Image& img, int count, int side, Rng& rng) {
  if (count < 1) throw ArgumentError("sample_random_patches: count must be >= 1");
  if (side < 1 || img.width() < side || img.height() < side)
    throw ArgumentError("sample_random_patches: image smaller than patch");
  std::uniform_int_distribution<int> xs(0, img.width() - side);
  std::uniform_int_distribution<int> ys(0, img.height() - side);
  PatchMatrix p(Image::kChannels * side * side, count);
  for (int j = 0; j < count; ++j) {
    const int x = xs(rng);
    const int y = ys(rng);
    p.col(j) = flatten_patch(img, x, y, side);
  }
  return p;
}

PatchMatrix extract_grid_patches(const Image& img, int side) {
  if (side < 1 || img.empty() || img.width() % side != 0 || img.height() % side != 0)
    throw ArgumentError("extract_grid_patches: dimensions must be multiples of side");
  const int cols = img.width() / side;
  const int rows = img.height() / side;
  PatchMatrix p(Image::kChannels * side * side, cols * rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) p.col(r * cols + c) = flatten_patch(img, c * side, r * side, side);
  return p;
}

Image crop_to_multiple(const Image& img, int side) {
  if (side < 1 || img.width() < side || img.height() < side)
    throw ArgumentError("crop_to_multiple: image smaller than side");
  const int w = img.width() / side * side;
  const int h = img.height() / side * side;
  if (w == img.width() && h == img.height()) return img;
  return crop(img, 0, 0, w, h);
}

Image add_gaussian_noise(const Image& img, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ArgumentError("add_gaussian_noise: sigma must be >= 0");
  Image out = img;
  if (sigma == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : out.data()) v = std::clamp(v + noise(rng) / 255.0, 0.0, 1.0);
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma >= 0.0)) throw ArgumentError("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& k : kernel) k /= norm;

  const int w = img.width();
  const int h = img.height();
  Image tmp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < Image::kChannels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * img.at(std::clamp(x + i, 0, w - 1), y, c);
        tmp.at(x, y, c) = acc;
      }
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < Image::kChannels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * tmp.at(x, std::clamp(y + i, 0, h - 1), c);
        out.at(x, y, c) = acc;
      }
  return out;
}

}  // namespace filterlearn
