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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "filterlearn/errors.hpp"

namespace filterlearn {
namespace {

namespace fs = std::filesystem;

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("filterlearn_manifest_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const fs::path& rel, const std::string& text) {
    std::ofstream(dir_ / rel) << text;
  }

  fs::path dir_;
};

TEST_F(ManifestTest, IqaSkipsCommentsAndResolvesRelativePaths) {
  write("m.tsv", "# ref\tdist\tmos\n\na.ppm\tb.ppm\t3.5\n/abs/c.ppm\td.ppm\t-1\t0.25\r\n");
  const auto rows = read_iqa_manifest(dir_ / "m.tsv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].reference, dir_ / "a.ppm");
  EXPECT_EQ(rows[0].distorted, dir_ / "b.ppm");
  EXPECT_EQ(rows[0].subjective, 3.5);
  EXPECT_FALSE(rows[0].subjective_std.has_value());
  EXPECT_EQ(rows[1].reference, fs::path("/abs/c.ppm"));
  EXPECT_EQ(rows[1].subjective, -1.0);
  EXPECT_EQ(rows[1].subjective_std, 0.25);
}

TEST_F(ManifestTest, IqaRejectsBadRows) {
  write("two.tsv", "a.ppm\tb.ppm\n");
  EXPECT_THROW(read_iqa_manifest(dir_ / "two.tsv"), FormatError);
  write("nan.tsv", "a.ppm\tb.ppm\tabc\n");
  EXPECT_THROW(read_iqa_manifest(dir_ / "nan.tsv"), FormatError);
  write("trail.tsv", "a.ppm\tb.ppm\t1.0x\n");
  EXPECT_THROW(read_iqa_manifest(dir_ / "trail.tsv"), FormatError);
  EXPECT_THROW(read_iqa_manifest(dir_ / "missing.tsv"), IoError);
}

TEST_F(ManifestTest, IqaWriteReadRoundTrip) {
  const std::vector<IqaManifestEntry> rows{{"r.ppm", "d.ppm", 0.1 + 0.2, std::nullopt},
                                           {"r.ppm", "e.ppm", 1.0 / 3.0, 0.125}};
  write_iqa_manifest(dir_ / "m.tsv", rows);
  const auto back = read_iqa_manifest(dir_ / "m.tsv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].distorted, dir_ / "d.ppm");
  EXPECT_EQ(back[0].subjective, 0.1 + 0.2);
  EXPECT_EQ(back[1].subjective, 1.0 / 3.0);
  EXPECT_EQ(back[1].subjective_std, 0.125);
}

TEST_F(ManifestTest, TextureLabelsNumberedByFirstAppearance) {
  Rng rng(1);
  for (const char* name : {"x.ppm", "y.ppm", "z.ppm"}) save_ppm(natural_like_image(16, rng), dir_ / name);
  write_texture_manifest(dir_ / "t.tsv", {{"x.ppm", "wood"}, {"y.ppm", "cork"}, {"z.ppm", "wood"}});
  const auto corpus = load_texture_corpus(dir_ / "t.tsv");
  ASSERT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus[0].id, "x.ppm");
  EXPECT_EQ(corpus[0].label, 0);
  EXPECT_EQ(corpus[1].label, 1);
  EXPECT_EQ(corpus[2].label, 0);
  EXPECT_EQ(corpus[1].image.width(), 16);
}

TEST_F(ManifestTest, TextureRejectsMissingLabel) {
  write("t.tsv", "x.ppm\n");
  EXPECT_THROW(read_texture_manifest(dir_ / "t.tsv"), FormatError);
  write("u.tsv", "x.ppm\t\n");
  EXPECT_THROW(read_texture_manifest(dir_ / "u.tsv"), FormatError);
}

TEST_F(ManifestTest, ListImagesFiltersAndSorts) {
  fs::create_directories(dir_ / "sub");
  for (const char* name : {"b.ppm", "a.PNG", "c.txt", "sub/d.ppm"}) write(name, "");
  const auto flat = list_images(dir_);
  ASSERT_EQ(flat.size(), 2u);
  EXPECT_EQ(flat[0].filename(), "a.PNG");
  EXPECT_EQ(flat[1].filename(), "b.ppm");
  EXPECT_EQ(list_images(dir_, true).size(), 3u);
  EXPECT_THROW(list_images(dir_ / "nope"), IoError);
}

}  // namespace
}  // namespace filterlearn
