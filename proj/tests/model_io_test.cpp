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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "filterlearn/errors.hpp"
#include "filterlearn/synth.hpp"

namespace filterlearn {
namespace {

// Values that stress a text round-trip: subnormals, extremes, negative zero
// and numbers without short decimal forms.
FilterSet awkward_filters(int d, int h, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  FilterSet f;
  f.w1.resize(d, h);
  f.w2.resize(h, d);
  for (Eigen::Index i = 0; i < f.w1.size(); ++i) f.w1.data()[i] = normal(rng) / 3.0;
  for (Eigen::Index i = 0; i < f.w2.size(); ++i) f.w2.data()[i] = std::exp(normal(rng) * 20.0);
  f.b1 = Eigen::VectorXd::Zero(h);
  f.b2 = Eigen::VectorXd::Zero(d);
  f.w1(0, 0) = std::numeric_limits<double>::denorm_min();
  f.w1(1, 0) = -0.0;
  f.w1(0, 1 % h) = std::numeric_limits<double>::max();
  f.b1[0] = 0.1;
  f.provenance = {1, 0.0123, 18446744073709551615ull, "0123456789abcdef"};
  return f;
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a.data()[i]) != std::bit_cast<std::uint64_t>(b.data()[i])) return false;
  return true;
}

TEST(Base64, KnownVectors) {
  auto enc = [](const std::string& s) {
    return base64_encode(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
  const auto dec = base64_decode("Zm9vYg==");
  EXPECT_EQ(std::string(dec.begin(), dec.end()), "foob");
}

TEST(Base64, RejectsMalformed) {
  EXPECT_THROW(base64_decode("abc"), FormatError);
  EXPECT_THROW(base64_decode("ab!d"), FormatError);
  EXPECT_THROW(base64_decode("a=bc"), FormatError);
  EXPECT_THROW(base64_decode("ab=c"), FormatError);
}

TEST(Base64, AllByteValuesRoundTrip) {
  std::vector<unsigned char> bytes;
  for (int rep = 0; rep < 3; ++rep)
    for (int b = 0; b < 256; ++b) bytes.push_back(static_cast<unsigned char>(b));
  for (std::size_t len : {bytes.size(), bytes.size() - 1, bytes.size() - 2})
    EXPECT_EQ(base64_decode(base64_encode(std::span(bytes.data(), len))),
              std::vector<unsigned char>(bytes.begin(), bytes.begin() + static_cast<long>(len)));
}

TEST(ModelFile, FilterSetBinaryRoundTripIsBitExact) {
  ModelFile file{TrainingConfig{}, awkward_filters(7, 5, 1)};
  const ModelFile back = deserialize_model(serialize_model(file));
  ASSERT_TRUE(std::holds_alternative<FilterSet>(back.model));
  const FilterSet& a = std::get<FilterSet>(file.model);
  const FilterSet& b = std::get<FilterSet>(back.model);
  EXPECT_TRUE(bitwise_equal(a.w1, b.w1));
  EXPECT_TRUE(bitwise_equal(a.w2, b.w2));
  EXPECT_TRUE(bitwise_equal(a.b1, b.b1));
  EXPECT_TRUE(bitwise_equal(a.b2, b.b2));
  EXPECT_EQ(a.provenance, b.provenance);
  EXPECT_EQ(file, back);
}

TEST(ModelFile, DecimalRoundTripIsExactToo) {
  ModelFile file{std::nullopt, awkward_filters(6, 4, 2)};
  const std::string text = serialize_model(file, MatrixEncoding::kDecimal);
  EXPECT_NE(text.find("\"decimal\""), std::string::npos);
  const ModelFile back = deserialize_model(text);
  EXPECT_TRUE(bitwise_equal(std::get<FilterSet>(file.model).w2, std::get<FilterSet>(back.model).w2));
  EXPECT_EQ(file, back);
}

TEST(ModelFile, SerializationIsDeterministic) {
  ModelFile file{TrainingConfig{}, awkward_filters(5, 3, 3)};
  EXPECT_EQ(serialize_model(file), serialize_model(file));
}

TEST(ModelFile, RowMajorLayout) {
  FilterSet f;
  f.w1.resize(2, 3);
  f.w1 << 1, 2, 3, 4, 5, 6;
  f.b1 = Eigen::VectorXd::Zero(3);
  f.w2 = Eigen::MatrixXd::Zero(3, 2);
  f.b2 = Eigen::VectorXd::Zero(2);
  const std::string text = serialize_model({std::nullopt, f}, MatrixEncoding::kDecimal);
  const auto pos = text.find("\"w1\"");
  ASSERT_NE(pos, std::string::npos);
  const std::string tail = text.substr(pos);
  // Values appear row by row: 1, 2, 3 then 4, 5, 6.
  EXPECT_LT(tail.find("2.0"), tail.find("4.0"));
  EXPECT_LT(tail.find("3.0"), tail.find("4.0"));
}

TEST(ModelFile, UniqueAndMsUniqueRoundTrip) {
  Rng rng(4);
  const PatchMatrix patches = natural_like_patches(300, 8, rng);
  UniqueModel u;
  u.filter_set = awkward_filters(192, 6, 5);
  u.filter_set.w2.setConstant(0.25);
  u.training_chain = iterated_whiten(patches, 1, Regularizer::standard()).second;
  u.activation_threshold = 0.2;
  u.protocol = WhiteningProtocol::kReuseTraining;
  EXPECT_EQ(deserialize_model(serialize_model({TrainingConfig{}, u})), (ModelFile{TrainingConfig{}, u}));

  MsUniqueModel m;
  m.edge_weight = 1.5;
  for (int i = 0; i < 5; ++i) {
    MsUniqueMember member{awkward_filters(192, 2 + i, 10 + i), {}};
    member.filter_set.w2.setConstant(1.0);
    for (int j = 0; j < member.filter_set.h(); ++j)
      member.classes.push_back(j % 2 ? FilterClass::kEdge : FilterClass::kColor);
    m.members.push_back(member);
  }
  const ModelFile file{std::nullopt, m};
  const ModelFile back = deserialize_model(serialize_model(file));
  EXPECT_EQ(model_kind(back), "msunique");
  EXPECT_EQ(back, file);
}

TEST(ModelFile, TextureAndIndexRoundTrip) {
  Rng rng(6);
  auto filters = [&](int d, int h) {
    FilterSet f = awkward_filters(d, h, rng());
    f.w2.setConstant(0.5);
    return f;
  };
  TextureModel t;
  t.color_filters = filters(192, 10);
  t.color_mean = Eigen::VectorXd::Constant(192, 0.5);
  t.p2_filters = filters(192, 4);
  t.p3_filters = filters(36, 8);
  t.pool_size = 8;
  t.final_filters = filters(72, 5);
  t.structure_chain = iterated_whiten(natural_like_patches(300, 8, rng), 1, Regularizer::standard()).second;
  const ModelFile tf{TrainingConfig{}, t};
  EXPECT_EQ(deserialize_model(serialize_model(tf)), tf);

  RetrievalIndex index;
  index.entries.push_back({"a", 0, Eigen::VectorXd::LinSpaced(4, 0, 1), Eigen::VectorXd::LinSpaced(6, 1, 2)});
  index.entries.push_back({"b", 1, Eigen::VectorXd::LinSpaced(4, 1, 0), Eigen::VectorXd::LinSpaced(6, 2, 1)});
  const ModelFile xf{std::nullopt, index};
  EXPECT_EQ(deserialize_model(serialize_model(xf, MatrixEncoding::kDecimal)), xf);
}

TEST(ModelFile, SaveLoadThroughDisk) {
  const auto path = std::filesystem::temp_directory_path() / "filterlearn_model_io_test.json";
  const ModelFile file{TrainingConfig{}, awkward_filters(4, 3, 7)};
  save_model(file, path);
  EXPECT_EQ(load_model(path), file);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), IoError);
  EXPECT_THROW(save_model(file, "/nonexistent-dir/x.json"), IoError);
}

TEST(ModelFile, RejectsMalformedDocuments) {
  const std::string good = serialize_model({std::nullopt, awkward_filters(3, 2, 8)}, MatrixEncoding::kDecimal);
  EXPECT_THROW(deserialize_model("not json"), FormatError);
  EXPECT_THROW(deserialize_model("{}"), FormatError);

  std::string no_version = good;
  no_version.replace(no_version.find("\"version\""), 9, "\"vers1on\"");
  EXPECT_THROW(deserialize_model(no_version), FormatError);

  std::string future = good;
  future.replace(future.find("\"version\": 1"), 12, "\"version\": 9");
  EXPECT_THROW(deserialize_model(future), FormatError);

  std::string wrong_rows = good;
  const auto pos = wrong_rows.find("\"rows\": 3");
  ASSERT_NE(pos, std::string::npos);
  wrong_rows.replace(pos, 9, "\"rows\": 4");
  EXPECT_THROW(deserialize_model(wrong_rows), FormatError);

  std::string bad_kind = good;
  bad_kind.replace(bad_kind.find("\"filterset\""), 11, "\"convnet00\"");
  EXPECT_THROW(deserialize_model(bad_kind), FormatError);
}

}  // namespace
}  // namespace filterlearn
