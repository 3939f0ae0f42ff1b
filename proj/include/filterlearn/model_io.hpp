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

// Model files: one JSON document per model.
//
//   {
//     "format": "filterlearn-model", "version": 1,
//     "kind": "filterset" | "unique" | "msunique" | "texture" | "index",
//     "encoding": "base64" | "decimal",
//     "training": {"rho": .., "beta": .., "lambda": .., ...},   (optional)
//     "model": { ... }
//   }
//
// Every matrix is {"rows": r, "cols": c, "data": ...} stored row-major;
// "data" is a base64 string of little-endian float64 values or an array of
// decimal numbers (shortest round-trip form). Both encodings reproduce the
// doubles bit for bit; base64 is the compact default.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "filterlearn/decoder.hpp"
#include "filterlearn/iqa.hpp"
#include "filterlearn/texture.hpp"

namespace filterlearn {

inline constexpr int kModelFormatVersion = 1;

enum class MatrixEncoding { kBase64, kDecimal };

using ModelPayload = std::variant<FilterSet, UniqueModel, MsUniqueModel, TextureModel, RetrievalIndex>;

struct ModelFile {
  std::optional<TrainingConfig> training;
  ModelPayload model;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

/// "filterset", "unique", "msunique", "texture" or "index".
std::string model_kind(const ModelFile& file);

std::string serialize_model(const ModelFile& file, MatrixEncoding encoding = MatrixEncoding::kBase64);
/// Throws FormatError on malformed documents or mismatched dimensions.
ModelFile deserialize_model(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path,
                MatrixEncoding encoding = MatrixEncoding::kBase64);
ModelFile load_model(const std::filesystem::path& path);

std::string base64_encode(std::span<const unsigned char> bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

}  // namespace filterlearn
