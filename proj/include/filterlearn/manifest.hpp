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

// Tab-separated dataset manifests. Blank lines and lines starting with '#'
// are ignored; relative paths resolve against the manifest's directory.
//
//   IQA:      ref_path <TAB> dist_path <TAB> subjective [<TAB> std]
//   texture:  image_path <TAB> class_label

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "filterlearn/iqa.hpp"
#include "filterlearn/synth.hpp"

namespace filterlearn {

struct IqaManifestEntry {
  std::filesystem::path reference;
  std::filesystem::path distorted;
  double subjective = 0.0;
  std::optional<double> subjective_std;
};

struct TextureManifestEntry {
  std::string path;  // as written; doubles as the image id
  std::string label;
};

std::vector<IqaManifestEntry> read_iqa_manifest(const std::filesystem::path& manifest);
std::vector<TextureManifestEntry> read_texture_manifest(const std::filesystem::path& manifest);

void write_iqa_manifest(const std::filesystem::path& manifest, const std::vector<IqaManifestEntry>& entries);
void write_texture_manifest(const std::filesystem::path& manifest, const std::vector<TextureManifestEntry>& entries);

/// Loads every image; labels become integers in order of first appearance.
std::vector<LabeledImage> load_texture_corpus(const std::filesystem::path& manifest);

IqaSample load_iqa_sample(const IqaManifestEntry& entry);

/// Regular files with a .ppm or .png extension (any case), sorted by path.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir, bool recursive = false);

}  // namespace filterlearn
