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

#include "filterlearn/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "filterlearn/errors.hpp"

namespace filterlearn {
namespace {

namespace fs = std::filesystem;

struct Line {
  int number;
  std::vector<std::string> fields;
};

std::vector<Line> read_rows(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  std::vector<Line> rows;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text[0] == '#') continue;
    Line line{number, {}};
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = text.find('\t', start);
      line.fields.push_back(text.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(line));
  }
  return rows;
}

[[noreturn]] void bad_line(const fs::path& manifest, int number, const std::string& why) {
  throw FormatError(manifest.string() + ":" + std::to_string(number) + ": " + why);
}

double parse_number(const std::string& s, const fs::path& manifest, int number) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    bad_line(manifest, number, "not a number: '" + s + "'");
  return v;
}

fs::path resolve(const fs::path& manifest, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : manifest.parent_path() / path;
}

std::ofstream open_for_writing(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<IqaManifestEntry> read_iqa_manifest(const fs::path& manifest) {
  std::vector<IqaManifestEntry> out;
  for (const Line& line : read_rows(manifest)) {
    if (line.fields.size() != 3 && line.fields.size() != 4)
      bad_line(manifest, line.number, "expected 3 or 4 tab-separated fields");
    IqaManifestEntry e;
    e.reference = resolve(manifest, line.fields[0]);
    e.distorted = resolve(manifest, line.fields[1]);
    e.subjective = parse_number(line.fields[2], manifest, line.number);
    if (line.fields.size() == 4 && !line.fields[3].empty())
      e.subjective_std = parse_number(line.fields[3], manifest, line.number);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TextureManifestEntry> read_texture_manifest(const fs::path& manifest) {
  std::vector<TextureManifestEntry> out;
  for (const Line& line : read_rows(manifest)) {
    if (line.fields.size() != 2 || line.fields[0].empty() || line.fields[1].empty())
      bad_line(manifest, line.number, "expected image_path<TAB>class_label");
    out.push_back({line.fields[0], line.fields[1]});
  }
  return out;
}

void write_iqa_manifest(const fs::path& manifest, const std::vector<IqaManifestEntry>& entries) {
  std::ofstream out = open_for_writing(manifest);
  out.precision(17);
  for (const IqaManifestEntry& e : entries) {
    out << e.reference.string() << '\t' << e.distorted.string() << '\t' << e.subjective;
    if (e.subjective_std) out << '\t' << *e.subjective_std;
    out << '\n';
  }
}

void write_texture_manifest(const fs::path& manifest, const std::vector<TextureManifestEntry>& entries) {
  std::ofstream out = open_for_writing(manifest);
  for (const TextureManifestEntry& e : entries) out << e.path << '\t' << e.label << '\n';
}

std::vector<LabeledImage> load_texture_corpus(const fs::path& manifest) {
  std::map<std::string, int> labels;
  std::vector<LabeledImage> corpus;
  for (const TextureManifestEntry& e : read_texture_manifest(manifest)) {
    const auto [it, inserted] = labels.try_emplace(e.label, static_cast<int>(labels.size()));
    corpus.push_back({e.path, it->second, load_image(resolve(manifest, e.path))});
  }
  return corpus;
}

IqaSample load_iqa_sample(const IqaManifestEntry& entry) {
  return {load_image(entry.reference), load_image(entry.distorted), entry.subjective, entry.subjective_std};
}

std::vector<fs::path> list_images(const fs::path& dir, bool recursive) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  auto consider = [&](const fs::directory_entry& e) {
    if (!e.is_regular_file()) return;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".ppm" || ext == ".png") out.push_back(e.path());
  };
  if (recursive) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) consider(e);
  } else {
    for (const auto& e : fs::directory_iterator(dir)) consider(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace filterlearn
