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

#include "filterlearn/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "filterlearn/errors.hpp"

namespace filterlearn {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "filterlearn-model";
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

[[noreturn]] void fail(const std::string& what) { throw FormatError("model file: " + what); }

// --- matrices -------------------------------------------------------------

json encode_matrix(const Eigen::MatrixXd& m, MatrixEncoding enc) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) row_major.push_back(m(r, c));
  if (enc == MatrixEncoding::kDecimal) {
    j["data"] = row_major;
    return j;
  }
  std::vector<unsigned char> bytes(row_major.size() * 8);
  for (std::size_t i = 0; i < row_major.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(row_major[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  j["data"] = base64_encode(bytes);
  return j;
}

Eigen::MatrixXd decode_matrix(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) fail("malformed matrix");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 0 || cols < 0) fail("negative matrix dimension");
  std::vector<double> values;
  const json& data = j.at("data");
  if (data.is_string()) {
    const std::vector<unsigned char> bytes = base64_decode(data.get<std::string>());
    if (bytes.size() % 8 != 0) fail("binary matrix length is not a multiple of 8");
    values.resize(bytes.size() / 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
      values[i] = std::bit_cast<double>(bits);
    }
  } else if (data.is_array()) {
    values = data.get<std::vector<double>>();
  } else {
    fail("matrix data must be a string or an array");
  }
  if (static_cast<Eigen::Index>(values.size()) != rows * cols)
    fail("matrix declares " + std::to_string(rows) + "x" + std::to_string(cols) + " but holds " +
         std::to_string(values.size()) + " values");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return m;
}

json encode_vector(const Eigen::VectorXd& v, MatrixEncoding enc) { return encode_matrix(v, enc); }

Eigen::VectorXd decode_vector(const json& j) {
  Eigen::MatrixXd m = decode_matrix(j);
  if (m.cols() != 1) fail("expected a column vector");
  return m.col(0);
}

// --- building blocks --------------------------------------------------------

json encode_regularizer(const Regularizer& r) {
  return {{"epsilon", r.epsilon}, {"mode", r.mode == EpsilonMode::kRelative ? "relative" : "absolute"}};
}

Regularizer decode_regularizer(const json& j) {
  Regularizer r;
  r.epsilon = j.at("epsilon").get<double>();
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "relative") r.mode = EpsilonMode::kRelative;
  else if (mode == "absolute") r.mode = EpsilonMode::kAbsolute;
  else fail("unknown epsilon mode " + mode);
  return r;
}

json encode_training(const TrainingConfig& c) {
  return {{"rho", c.rho},           {"beta", c.beta},           {"lambda", c.lambda},
          {"max_iterations", c.max_iterations}, {"tolerance", c.tolerance}, {"memory", c.memory}};
}

TrainingConfig decode_training(const json& j) {
  TrainingConfig c;
  c.rho = j.at("rho").get<double>();
  c.beta = j.at("beta").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.tolerance = j.at("tolerance").get<double>();
  c.memory = j.at("memory").get<int>();
  return c;
}

json encode_filters(const FilterSet& f, MatrixEncoding enc) {
  return {{"d", f.d()},
          {"h", f.h()},
          {"provenance",
           {{"k", f.provenance.k},
            {"epsilon", f.provenance.epsilon},
            {"seed", f.provenance.seed},
            {"config_digest", f.provenance.config_digest}}},
          {"w1", encode_matrix(f.w1, enc)},
          {"b1", encode_vector(f.b1, enc)},
          {"w2", encode_matrix(f.w2, enc)},
          {"b2", encode_vector(f.b2, enc)}};
}

FilterSet decode_filters(const json& j) {
  FilterSet f;
  f.w1 = decode_matrix(j.at("w1"));
  f.b1 = decode_vector(j.at("b1"));
  f.w2 = decode_matrix(j.at("w2"));
  f.b2 = decode_vector(j.at("b2"));
  if (f.d() != j.at("d").get<int>() || f.h() != j.at("h").get<int>()) fail("filter set dimensions disagree");
  const json& p = j.at("provenance");
  f.provenance.k = p.at("k").get<int>();
  f.provenance.epsilon = p.at("epsilon").get<double>();
  f.provenance.seed = p.at("seed").get<std::uint64_t>();
  f.provenance.config_digest = p.at("config_digest").get<std::string>();
  try {
    f.validate();
  } catch (const ArgumentError& e) {
    fail(e.what());
  }
  return f;
}

json encode_chain(const WhiteningChain& c, MatrixEncoding enc) {
  json stages = json::array();
  for (const WhiteningTransform& t : c.stages)
    stages.push_back({{"w", encode_matrix(t.w, enc)},
                      {"epsilon", t.epsilon},
                      {"mean", encode_vector(t.mean, enc)},
                      {"eigvals", encode_vector(t.eigvals, enc)},
                      {"eigvecs", encode_matrix(t.eigvecs, enc)}});
  return {{"k", c.k()}, {"base_mean", encode_vector(c.base_mean, enc)}, {"stages", stages}};
}

WhiteningChain decode_chain(const json& j) {
  WhiteningChain c;
  c.base_mean = decode_vector(j.at("base_mean"));
  for (const json& s : j.at("stages")) {
    WhiteningTransform t;
    t.w = decode_matrix(s.at("w"));
    t.epsilon = s.at("epsilon").get<double>();
    t.mean = decode_vector(s.at("mean"));
    t.eigvals = decode_vector(s.at("eigvals"));
    t.eigvecs = decode_matrix(s.at("eigvecs"));
    const Eigen::Index d = c.base_mean.size();
    if (t.w.rows() != d || t.w.cols() != d || t.mean.size() != d || t.eigvals.size() != d ||
        t.eigvecs.rows() != d || t.eigvecs.cols() != d)
      fail("whitening stage dimensions disagree");
    c.stages.push_back(std::move(t));
  }
  if (c.k() != j.at("k").get<int>()) fail("whitening chain length disagrees with k");
  return c;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

std::optional<double> get_optional_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

const char* protocol_name(WhiteningProtocol p) { return p == WhiteningProtocol::kRefit ? "refit" : "training"; }

WhiteningProtocol decode_protocol(const std::string& s) {
  if (s == "refit") return WhiteningProtocol::kRefit;
  if (s == "training") return WhiteningProtocol::kReuseTraining;
  fail("unknown whitening protocol " + s);
}

void encode_iqa_common(json& j, WhiteningProtocol protocol, const std::optional<WhiteningChain>& chain,
                       const Regularizer& reg, const std::optional<double>& threshold, MatrixEncoding enc) {
  j["whitening"] = protocol_name(protocol);
  j["test_regularizer"] = encode_regularizer(reg);
  put_optional(j, "activation_threshold", threshold);
  j["training_chain"] = chain ? encode_chain(*chain, enc) : json(nullptr);
}

template <class Model>
void decode_iqa_common(const json& j, Model& m) {
  m.protocol = decode_protocol(j.at("whitening").get<std::string>());
  m.test_regularizer = decode_regularizer(j.at("test_regularizer"));
  m.activation_threshold = get_optional_double(j, "activation_threshold");
  if (j.contains("training_chain") && !j.at("training_chain").is_null())
    m.training_chain = decode_chain(j.at("training_chain"));
}

json encode_payload(const FilterSet& f, MatrixEncoding enc) { return encode_filters(f, enc); }

json encode_payload(const UniqueModel& m, MatrixEncoding enc) {
  json j{{"filters", encode_filters(m.filter_set, enc)}};
  encode_iqa_common(j, m.protocol, m.training_chain, m.test_regularizer, m.activation_threshold, enc);
  return j;
}

json encode_payload(const MsUniqueModel& m, MatrixEncoding enc) {
  json members = json::array();
  json widths = json::array();
  for (const MsUniqueMember& member : m.members) {
    std::string classes;
    for (FilterClass c : member.classes) classes.push_back(c == FilterClass::kEdge ? 'e' : 'c');
    members.push_back({{"filters", encode_filters(member.filter_set, enc)}, {"classes", classes}});
    widths.push_back(member.filter_set.h());
  }
  json j{{"h_values", widths}, {"edge_weight", m.edge_weight}, {"members", members}};
  encode_iqa_common(j, m.protocol, m.training_chain, m.test_regularizer, m.activation_threshold, enc);
  return j;
}

json encode_payload(const TextureModel& m, MatrixEncoding enc) {
  const HierarchyDims dims = m.dims();
  return {{"dims", {{"color_h", dims.color_h}, {"h2", dims.h2}, {"h3", dims.h3}, {"h_final", dims.h_final}}},
          {"pool_size", m.pool_size},
          {"color_filters", encode_filters(m.color_filters, enc)},
          {"color_mean", encode_vector(m.color_mean, enc)},
          {"p2_filters", encode_filters(m.p2_filters, enc)},
          {"p3_filters", encode_filters(m.p3_filters, enc)},
          {"final_filters", encode_filters(m.final_filters, enc)},
          {"structure_whitening", to_string(m.whitening)},
          {"structure_regularizer", encode_regularizer(m.structure_regularizer)},
          {"structure_chain", m.structure_chain ? encode_chain(*m.structure_chain, enc) : json(nullptr)}};
}

json encode_payload(const RetrievalIndex& index, MatrixEncoding enc) {
  json entries = json::array();
  for (const IndexEntry& e : index.entries)
    entries.push_back({{"id", e.id},
                       {"label", e.label},
                       {"color", encode_vector(e.color, enc)},
                       {"structure", encode_vector(e.structure, enc)}});
  return {{"entries", entries}};
}

UniqueModel decode_unique(const json& j) {
  UniqueModel m;
  m.filter_set = decode_filters(j.at("filters"));
  decode_iqa_common(j, m);
  return m;
}

MsUniqueModel decode_msunique(const json& j) {
  MsUniqueModel m;
  m.edge_weight = j.at("edge_weight").get<double>();
  for (const json& member_json : j.at("members")) {
    MsUniqueMember member;
    member.filter_set = decode_filters(member_json.at("filters"));
    for (char c : member_json.at("classes").get<std::string>()) {
      if (c != 'e' && c != 'c') fail("filter classes must be 'e' or 'c'");
      member.classes.push_back(c == 'e' ? FilterClass::kEdge : FilterClass::kColor);
    }
    m.members.push_back(std::move(member));
  }
  const auto widths = j.at("h_values").get<std::vector<int>>();
  if (widths.size() != m.members.size()) fail("h_values disagree with members");
  for (std::size_t i = 0; i < widths.size(); ++i)
    if (widths[i] != m.members[i].filter_set.h()) fail("h_values disagree with members");
  decode_iqa_common(j, m);
  return m;
}

TextureModel decode_texture(const json& j) {
  TextureModel m;
  m.pool_size = j.at("pool_size").get<int>();
  m.color_filters = decode_filters(j.at("color_filters"));
  m.color_mean = decode_vector(j.at("color_mean"));
  m.p2_filters = decode_filters(j.at("p2_filters"));
  m.p3_filters = decode_filters(j.at("p3_filters"));
  m.final_filters = decode_filters(j.at("final_filters"));
  m.whitening = structure_whitening_from_string(j.at("structure_whitening").get<std::string>());
  m.structure_regularizer = decode_regularizer(j.at("structure_regularizer"));
  if (!j.at("structure_chain").is_null()) m.structure_chain = decode_chain(j.at("structure_chain"));
  const json& dims = j.at("dims");
  const HierarchyDims got = m.dims();
  if (dims.at("color_h").get<int>() != got.color_h || dims.at("h2").get<int>() != got.h2 ||
      dims.at("h3").get<int>() != got.h3 || dims.at("h_final").get<int>() != got.h_final)
    fail("texture dims disagree with filter shapes");
  return m;
}

RetrievalIndex decode_index(const json& j) {
  RetrievalIndex index;
  for (const json& e : j.at("entries"))
    index.entries.push_back({e.at("id").get<std::string>(), e.at("label").get<int>(), decode_vector(e.at("color")),
                             decode_vector(e.at("structure"))});
  return index;
}

}  // namespace

std::string base64_encode(std::span<const unsigned char> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = i;
  if (text.size() % 4 != 0) fail("base64 length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char ch = text[i + k];
      if (ch == '=' && i + 4 == text.size() && k >= 2) {
        vals[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) fail("base64 padding in the middle of a group");
      vals[k] = lookup[static_cast<unsigned char>(ch)];
      if (vals[k] < 0) fail("invalid base64 character");
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back(static_cast<unsigned char>(v >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>(v >> 8));
    if (pad < 1) out.push_back(static_cast<unsigned char>(v));
  }
  return out;
}

std::string model_kind(const ModelFile& file) {
  constexpr const char* kKinds[] = {"filterset", "unique", "msunique", "texture", "index"};
  return kKinds[file.model.index()];
}

std::string serialize_model(const ModelFile& file, MatrixEncoding encoding) {
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kModelFormatVersion;
  doc["kind"] = model_kind(file);
  doc["encoding"] = encoding == MatrixEncoding::kBase64 ? "base64" : "decimal";
  doc["training"] = file.training ? encode_training(*file.training) : json(nullptr);
  doc["model"] = std::visit([&](const auto& m) { return encode_payload(m, encoding); }, file.model);
  return doc.dump(1) + "\n";
}

ModelFile deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatName) fail("missing format tag");
    if (!doc.contains("version")) fail("missing version");
    if (doc.at("version").get<int>() != kModelFormatVersion)
      fail("unsupported version " + doc.at("version").dump());
    ModelFile file;
    if (doc.contains("training") && !doc.at("training").is_null()) file.training = decode_training(doc.at("training"));
    const auto kind = doc.at("kind").get<std::string>();
    const json& m = doc.at("model");
    if (kind == "filterset") file.model = decode_filters(m);
    else if (kind == "unique") file.model = decode_unique(m);
    else if (kind == "msunique") file.model = decode_msunique(m);
    else if (kind == "texture") file.model = decode_texture(m);
    else if (kind == "index") file.model = decode_index(m);
    else fail("unknown kind " + kind);
    return file;
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

void save_model(const ModelFile& file, const std::filesystem::path& path, MatrixEncoding encoding) {
  const std::string text = serialize_model(file, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace filterlearn
