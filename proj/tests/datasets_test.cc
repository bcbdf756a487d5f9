/*
 * Copyright 2026 The FusionDetect Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fusiondetect/backbone.h"
#include "fusiondetect/composition.h"
#include "fusiondetect/error.h"
#include "fusiondetect/feature_cache.h"
#include "fusiondetect/feature_pipeline.h"
#include "fusiondetect/manifest.h"
#include "fusiondetect/rng.h"
#include "support/test_support.h"

namespace fd = fusiondetect;
namespace ds = fusiondetect::datasets;
namespace hd = fusiondetect::head;
using fdtest::TempDir;

namespace {

fd::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const fd::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return fd::ErrorCode::kInvalidArgument;
}

std::vector<ds::ManifestEntry> parse(const std::string& text) {
  std::istringstream in(text);
  return ds::parse_manifest(in, "m.jsonl");
}

std::vector<ds::ManifestEntry> pool(int generators, int per_generator, int reals) {
  std::vector<ds::ManifestEntry> out;
  for (int g = 0; g < generators; ++g) {
    for (int i = 0; i < per_generator; ++i) {
      out.push_back({"g" + std::to_string(g) + "/" + std::to_string(i), fd::Label::kFake,
                     "gen" + std::to_string(g), "ds", ds::Split::kTest});
    }
  }
  for (int i = 0; i < reals; ++i) {
    out.push_back({"r/" + std::to_string(i), fd::Label::kReal, "real", "ds", ds::Split::kTest});
  }
  return out;
}

hd::FeaturePipeline toy_pipeline(int a = 8, int b = 12) {
  return hd::FeaturePipeline(fd::backbone::open_backbone("toy:" + std::to_string(a) + ":1"),
                             fd::backbone::open_backbone("toy:" + std::to_string(b) + ":2"));
}

}  // namespace

TEST(Manifest, EmptyFileIsEmptyList) { EXPECT_TRUE(parse("").empty()); }

TEST(Manifest, ParsesRowsAndRoundTrips) {
  const auto e = parse(
      R"({"path":"a.png","label":"fake","generator_id":"flux","dataset_id":"omnigen","split":"test"})"
      "\n\n"
      R"({"path":"b.png","label":"real","generator_id":"real","dataset_id":"omnigen","split":"train","extra":1})"
      "\n");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].generator_id, "flux");
  EXPECT_EQ(e[1].split, ds::Split::kTrain);
  std::string text;
  for (const auto& x : e) text += ds::to_json_line(x) + "\n";
  EXPECT_EQ(parse(text), e);
}

TEST(Manifest, RealWithGeneratorIsInvariantViolation) {
  try {
    parse("\n" R"({"path":"a","label":"real","generator_id":"flux","dataset_id":"d","split":"test"})");
    FAIL();
  } catch (const fd::Error& e) {
    EXPECT_EQ(e.code(), fd::ErrorCode::kInvariantViolation);
    EXPECT_NE(std::string(e.what()).find("m.jsonl:2"), std::string::npos);
  }
}

TEST(Manifest, MalformedAndDuplicateRows) {
  EXPECT_EQ(code_of([] { parse("{not json}\n"); }), fd::ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse(R"({"path":"a","label":"maybe","generator_id":"g","dataset_id":"d","split":"test"})"); }),
            fd::ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse(R"({"label":"fake","generator_id":"g","dataset_id":"d","split":"test"})"); }),
            fd::ErrorCode::kParseError);
  const std::string row = R"({"path":"a","label":"fake","generator_id":"g","dataset_id":"d","split":"test"})";
  EXPECT_EQ(code_of([&] { parse(row + "\n" + row + "\n"); }), fd::ErrorCode::kInvariantViolation);
  EXPECT_EQ(code_of([] { parse(R"({"path":"","label":"fake","generator_id":"g","dataset_id":"d","split":"test"})"); }),
            fd::ErrorCode::kInvariantViolation);
}

TEST(Manifest, AcceptedEntriesSatisfyInvariants) {
  fd::Rng rng(8);
  const char* gens[] = {"real", "flux", "sd"};
  for (int t = 0; t < 300; ++t) {
    const std::string gen = gens[rng.below(3)];
    const std::string label = rng.bernoulli(0.5) ? "real" : "fake";
    const std::string path = rng.bernoulli(0.1) ? "" : "p" + std::to_string(t);
    const std::string line = R"({"path":")" + path + R"(","label":")" + label +
                             R"(","generator_id":")" + gen + R"(","dataset_id":"d","split":"test"})";
    try {
      const auto e = parse(line);
      ASSERT_EQ(e.size(), 1u);
      EXPECT_FALSE(e[0].path.empty());
      EXPECT_EQ(e[0].label == fd::Label::kReal, e[0].generator_id == "real");
    } catch (const fd::Error&) {
    }
  }
}

TEST(BalancedSample, ArithmeticOfTheContract) {
  const auto entries = pool(3, 100, 400);
  const auto out = ds::balanced_sample(entries, {50, true, 1});
  std::map<std::string, int> counts;
  for (const auto& e : out) counts[e.generator_id]++;
  EXPECT_EQ(counts["gen0"], 50);
  EXPECT_EQ(counts["gen1"], 50);
  EXPECT_EQ(counts["gen2"], 50);
  EXPECT_EQ(counts["real"], 150);
  std::set<std::string> paths;
  for (const auto& e : out) EXPECT_TRUE(paths.insert(e.path).second);
}

TEST(BalancedSample, DeterministicAndSeedSensitive) {
  const auto entries = pool(2, 80, 200);
  EXPECT_EQ(ds::balanced_sample(entries, {10, true, 4}), ds::balanced_sample(entries, {10, true, 4}));
  EXPECT_NE(ds::balanced_sample(entries, {10, true, 4}), ds::balanced_sample(entries, {10, true, 5}));
}

TEST(BalancedSample, KeepsManifestOrderAndAllRealsWhenUnbalanced) {
  const auto entries = pool(2, 20, 7);
  const auto out = ds::balanced_sample(entries, {5, false, 0});
  EXPECT_EQ(out.size(), 17u);
  size_t cursor = 0;
  for (const auto& e : out) {
    while (cursor < entries.size() && !(entries[cursor] == e)) ++cursor;
    ASSERT_LT(cursor, entries.size());
  }
}

TEST(BalancedSample, InsufficientImagesNamesGenerators) {
  auto entries = pool(1, 100, 100);
  const auto small = pool(2, 10, 0);
  entries.insert(entries.end(), small.begin() + 10, small.end());
  try {
    ds::balanced_sample(entries, {50, true, 0});
    FAIL();
  } catch (const fd::Error& e) {
    EXPECT_EQ(e.code(), fd::ErrorCode::kInsufficientImages);
    EXPECT_NE(std::string(e.what()).find("gen1"), std::string::npos);
  }
}

TEST(FeatureCache, RoundTripIsExact) {
  ds::FeatureCache c;
  c.backbone_hash = 0x1234;
  c.features = hd::FeatureMatrix(3);
  fd::Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    const std::vector<float> row = {float(rng.normal()), float(rng.normal() * 1e-20), float(i)};
    c.features.append(row);
    c.labels.push_back(i % 2 ? fd::Label::kFake : fd::Label::kReal);
    c.indices.push_back(static_cast<uint64_t>(10 * i));
  }
  TempDir dir;
  ds::write_feature_cache(dir / "c.fdc", c);
  const auto back = ds::read_feature_cache(dir / "c.fdc", 0x1234);
  EXPECT_EQ(back.features.values, c.features.values);
  EXPECT_EQ(back.labels, c.labels);
  EXPECT_EQ(back.indices, c.indices);
  EXPECT_EQ(code_of([&] { ds::read_feature_cache(dir / "c.fdc", 0x9999); }), fd::ErrorCode::kHashMismatch);
  const auto bytes = ds::serialize_feature_cache(c);
  std::vector<char> cut(bytes.begin(), bytes.end() - 1);
  EXPECT_EQ(code_of([&] { ds::deserialize_feature_cache(cut); }), fd::ErrorCode::kTruncatedCache);
}

TEST(FeatureCache, DifferentToyDimsGiveHashMismatch) {
  TempDir dir;
  const auto manifest_path = fdtest::write_dataset(dir.path(), {{"d", {"g"}, 2, 2}}, 1, 32);
  const auto manifest = ds::load_manifest(manifest_path);
  const auto p8 = hd::FeaturePipeline(fd::backbone::open_backbone("toy:8:0"), nullptr,
                                      {hd::BackboneMask::kSemantic});
  const auto p16 = hd::FeaturePipeline(fd::backbone::open_backbone("toy:16:0"), nullptr,
                                       {hd::BackboneMask::kSemantic});
  // 32px images are upscaled to the 224 crop by preprocessing.
  ds::write_feature_cache(dir / "c.fdc", ds::extract_features(manifest, p8).cache);
  EXPECT_NO_THROW(ds::read_feature_cache(dir / "c.fdc", p8.hash()));
  EXPECT_EQ(code_of([&] { ds::read_feature_cache(dir / "c.fdc", p16.hash()); }), fd::ErrorCode::kHashMismatch);
}

TEST(FeatureCache, MaskAndNormalizationChangeHash) {
  std::shared_ptr<const fd::backbone::BackboneRunner> sa = fd::backbone::open_backbone("toy:8:1");
  std::shared_ptr<const fd::backbone::BackboneRunner> sb = fd::backbone::open_backbone("toy:8:2");
  std::set<uint64_t> hashes;
  for (auto mask : {hd::BackboneMask::kSemantic, hd::BackboneMask::kStructural, hd::BackboneMask::kBoth}) {
    for (bool l2 : {false, true}) hashes.insert(hd::FeaturePipeline(sa, sb, {mask, l2}).hash());
  }
  EXPECT_EQ(hashes.size(), 6u);
}

TEST(ExtractFeatures, SkipsUndecodableImages) {
  TempDir dir;
  const auto manifest_path = fdtest::write_dataset(dir.path(), {{"d", {"g1", "g2"}, 25, 50}}, 2, 32);
  auto manifest = ds::load_manifest(manifest_path);
  ASSERT_EQ(manifest.entries.size(), 100u);
  for (int i : {3, 40, 77}) std::ofstream(manifest.resolve(manifest.entries[i])) << "garbage";
  const auto result = ds::extract_features(manifest, toy_pipeline());
  EXPECT_EQ(result.cache.size(), 97u);
  ASSERT_EQ(result.skipped.size(), 3u);
  EXPECT_EQ(result.skipped[0].index, 3u);
  EXPECT_EQ(result.skipped[2].index, 77u);
  EXPECT_EQ(result.cache.features.dim, 20u);
  for (size_t i = 1; i < result.cache.indices.size(); ++i) {
    EXPECT_LT(result.cache.indices[i - 1], result.cache.indices[i]);
  }
}

TEST(ExtractFeatures, MatchesDirectPipeline) {
  TempDir dir;
  const auto manifest = ds::load_manifest(fdtest::write_dataset(dir.path(), {{"d", {"g"}, 3, 3}}, 3, 64));
  const auto pipeline = toy_pipeline();
  const auto result = ds::extract_features(manifest, pipeline);
  for (size_t i = 0; i < result.cache.size(); ++i) {
    const auto direct = pipeline.extract(fd::imaging::load_image(manifest.resolve(manifest.entries[i])));
    const auto row = result.cache.features.row(i);
    EXPECT_EQ(std::vector<float>(row.begin(), row.end()), direct.values);
  }
}

TEST(ExtractFeatures, ThreadCountDoesNotChangeOutput) {
  TempDir dir;
  const auto manifest = ds::load_manifest(fdtest::write_dataset(dir.path(), {{"d", {"g"}, 6, 6}}, 4, 48));
  ds::ExtractOptions opts;
  opts.augment.probability = 0.5;
  auto m = manifest;
  for (auto& e : m.entries) e.split = ds::Split::kTrain;
  setenv("FD_THREADS", "1", 1);
  const auto one = ds::serialize_feature_cache(ds::extract_features(m, toy_pipeline(), opts).cache);
  setenv("FD_THREADS", "4", 1);
  const auto four = ds::serialize_feature_cache(ds::extract_features(m, toy_pipeline(), opts).cache);
  unsetenv("FD_THREADS");
  EXPECT_EQ(one, four);
}

TEST(Composition, OmniGenTemplate) {
  const auto rows = ds::load_composition(std::string(FD_DATA_DIR) + "/manifests/omnigen.tsv");
  EXPECT_EQ(ds::fake_count(rows), 11550);
  const auto gens = ds::composition_generators(rows);
  ASSERT_EQ(gens.size(), 12u);
  int thousand = 0;
  for (const auto& r : rows) {
    if (r.label == fd::Label::kFake) {
      EXPECT_EQ(r.resolution, "1024x1024");
      thousand += r.count == 1000;
      if (r.count != 1000) {
        EXPECT_EQ(r.generator_id, "gpt-4o");
      }
    }
  }
  EXPECT_EQ(thousand, 11);
  const auto entries = ds::expand_composition(rows, ds::Split::kTest);
  std::string text;
  for (const auto& e : entries) text += ds::to_json_line(e) + "\n";
  std::istringstream in(text);
  ds::Manifest m;
  m.entries = ds::parse_manifest(in, "expanded");
  EXPECT_EQ(m.generators().size(), 12u);
  EXPECT_EQ(m.entries.size(), 11550u + static_cast<size_t>(ds::real_count(rows)));
}

TEST(Composition, EstablishedDatasetTemplates) {
  const std::string dir = std::string(FD_DATA_DIR) + "/manifests/";
  const auto genimage = ds::load_composition(dir + "genimage.tsv");
  EXPECT_EQ(ds::fake_count(genimage), 4000);
  EXPECT_EQ(ds::real_count(genimage), 4000);
  EXPECT_EQ(ds::composition_generators(genimage).size(), 8u);
  const auto imaginet = ds::load_composition(dir + "imaginet.tsv");
  EXPECT_EQ(ds::fake_count(imaginet), 5000);
  EXPECT_EQ(ds::real_count(imaginet), 5000);
  const auto chameleon = ds::load_composition(dir + "chameleon.tsv");
  EXPECT_EQ(ds::fake_count(chameleon), 2976 + 2016 + 313 + 5865);
  EXPECT_NO_THROW(ds::load_composition(dir + "train.tsv"));
}

TEST(Composition, RejectsBadRows) {
  std::istringstream bad_label("d\tg\tmaybe\tc\t1\tr\ts\n");
  EXPECT_EQ(code_of([&] { ds::parse_composition(bad_label, "x"); }), fd::ErrorCode::kParseError);
  std::istringstream bad_real("d\tflux\treal\tc\t1\tr\ts\n");
  EXPECT_EQ(code_of([&] { ds::parse_composition(bad_real, "x"); }), fd::ErrorCode::kInvariantViolation);
  std::istringstream bad_count("d\tg\tfake\tc\t-1\tr\ts\n");
  EXPECT_EQ(code_of([&] { ds::parse_composition(bad_count, "x"); }), fd::ErrorCode::kParseError);
}
