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

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "fusiondetect/backbone.h"
#include "fusiondetect/error.h"
#include "fusiondetect/rng.h"
#include "support/test_support.h"

namespace fd = fusiondetect;
namespace bb = fusiondetect::backbone;
namespace im = fusiondetect::imaging;
using fdtest::TempDir;

namespace {

im::TensorImage random_tensor(int crop, uint64_t seed) {
  fd::Rng rng(seed);
  im::TensorImage t;
  t.height = t.width = crop;
  t.data.resize(static_cast<size_t>(3) * crop * crop);
  for (auto& v : t.data) v = static_cast<float>(rng.uniform(-1, 1));
  return t;
}

fd::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const fd::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return fd::ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(ToyBackbone, ConstantImageMatchesRowSums) {
  const bb::ToyBackbone toy(8, 0);
  const auto img = fdtest::constant_image(224, 224, 200, 200, 200);
  const auto out = toy.embed(im::preprocess(img, toy.spec().preprocess));
  ASSERT_EQ(out.dim(), 8u);
  const double c = (200.0 / 255.0 - 0.5) / 0.5;
  for (int k = 0; k < 8; ++k) {
    double row_sum = 0;
    for (int j = 0; j < toy.pooled_dim(); ++j) row_sum += toy.projection()[k * toy.pooled_dim() + j];
    EXPECT_NEAR(out.values[k], c * row_sum, 1e-4);
  }
}

TEST(ToyBackbone, SameDimAndSeedAgree) {
  const auto a = bb::toy_backbone(12, 7), b = bb::toy_backbone(12, 7);
  const auto t = random_tensor(224, 1);
  EXPECT_EQ(a->embed(t).values, b->embed(t).values);
  EXPECT_NE(a->embed(t).values, bb::toy_backbone(12, 8)->embed(t).values);
}

TEST(ToyBackbone, ZeroDimRejected) {
  EXPECT_EQ(code_of([] { bb::toy_backbone(0, 0); }), fd::ErrorCode::kInvalidArgument);
}

TEST(ToyBackbone, IsLinear) {
  const auto toy = bb::toy_backbone(16, 3);
  for (uint64_t s = 0; s < 5; ++s) {
    const auto a = random_tensor(224, 10 + s), b = random_tensor(224, 20 + s);
    const float alpha = 0.7f - 0.3f * s, beta = -1.2f + 0.5f * s;
    im::TensorImage mix = a;
    for (size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = alpha * a.data[i] + beta * b.data[i];
    const auto ea = toy->embed(a), eb = toy->embed(b), em = toy->embed(mix);
    for (size_t k = 0; k < em.values.size(); ++k) {
      EXPECT_NEAR(em.values[k], alpha * ea.values[k] + beta * eb.values[k], 1e-5);
    }
  }
}

TEST(ToyBackbone, WrongShapeRejected) {
  const auto toy = bb::toy_backbone(4, 0);
  EXPECT_EQ(code_of([&] { toy->embed(random_tensor(112, 0)); }), fd::ErrorCode::kShapeMismatch);
}

TEST(ToyBackbone, EmbedDoesNotMutateInput) {
  const auto toy = bb::toy_backbone(4, 0);
  const auto t = random_tensor(224, 3);
  const auto copy = t.data;
  toy->embed(t);
  EXPECT_EQ(t.data, copy);
}

TEST(OpenBackbone, ParsesToyLocators) {
  EXPECT_EQ(bb::open_backbone("toy:8:0")->spec().embed_dim, 8);
  EXPECT_THROW(bb::open_backbone("toy:x:0"), fd::Error);
  EXPECT_THROW(bb::open_backbone("toy:8"), fd::Error);
}

TEST(Fingerprint, DistinguishesBackbones) {
  EXPECT_EQ(bb::toy_backbone(8, 0)->spec().fingerprint(), bb::toy_backbone(8, 0)->spec().fingerprint());
  EXPECT_NE(bb::toy_backbone(8, 0)->spec().fingerprint(), bb::toy_backbone(16, 0)->spec().fingerprint());
}

TEST(ExportDescriptor, SerializeRoundTripsExactly) {
  bb::ExportDescriptor d;
  d.id = "semantic-vit-l14";
  d.embed_dim = bb::kSemanticEmbedDim;
  d.graph = "/models/semantic.onnx";
  d.preprocess = im::PreprocessSpec::semantic_vit_l14();
  d.provenance = "reference checkpoint";
  d.content_hash = "sha256:00";
  d.opset = 17;
  d.pooling = "cls";
  const auto back = bb::ExportDescriptor::parse(d.serialize(), "/models");
  EXPECT_EQ(back.id, d.id);
  EXPECT_EQ(back.embed_dim, 768);
  EXPECT_EQ(back.graph, fdtest::fs::path("/models/semantic.onnx"));
  EXPECT_EQ(back.preprocess, d.preprocess);
  EXPECT_EQ(back.opset, 17);
  EXPECT_EQ(back.pooling, "cls");
  EXPECT_EQ(back.content_hash, d.content_hash);
  const auto structural = im::PreprocessSpec::structural_vit_l14();
  d.preprocess = structural;
  EXPECT_EQ(bb::ExportDescriptor::parse(d.serialize(), "/").preprocess, structural);
}

TEST(ExportDescriptor, RejectsMissingKeysAndUnknownFormat) {
  EXPECT_EQ(code_of([] { bb::ExportDescriptor::parse("format=fusiondetect-backbone/1\nid=x\n", "."); }),
            fd::ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { bb::ExportDescriptor::parse("format=other/9\n", "."); }),
            fd::ErrorCode::kVersionMismatch);
}

TEST(GraphBackbone, MatchesToyReference) {
  TempDir dir;
  const auto descriptor = fdtest::write_toy_export(dir.path(), "toy8", 8, 5);
  const auto graph = bb::open_backbone(descriptor.string());
  const bb::ToyBackbone toy(8, 5);
  EXPECT_EQ(graph->spec().embed_dim, 8);
  for (uint64_t s = 0; s < 4; ++s) {
    const auto t = random_tensor(224, s);
    const auto a = graph->embed(t), b = toy.embed(t);
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-4);
    EXPECT_EQ(graph->embed(t).values, a.values);
  }
}

TEST(GraphBackbone, BatchMatchesSingle) {
  TempDir dir;
  const auto graph = bb::open_backbone(fdtest::write_toy_export(dir.path(), "toy6", 6, 1).string());
  std::vector<im::TensorImage> batch;
  for (uint64_t s = 0; s < 5; ++s) batch.push_back(random_tensor(224, 40 + s));
  const auto out = graph->embed_batch(batch);
  ASSERT_EQ(out.size(), batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto single = graph->embed(batch[i]);
    for (size_t k = 0; k < single.values.size(); ++k) EXPECT_NEAR(out[i].values[k], single.values[k], 1e-5);
  }
}

TEST(GraphBackbone, DeclaredDimMustMatchGraph) {
  TempDir dir;
  const auto descriptor = fdtest::write_toy_export(dir.path(), "toy8", 8, 5, false);
  auto d = bb::ExportDescriptor::load(descriptor);
  d.embed_dim = 9;
  EXPECT_EQ(code_of([&] { bb::GraphBackbone g(d); }), fd::ErrorCode::kShapeMismatch);
}

TEST(GraphBackbone, ContentHashVerified) {
  TempDir dir;
  const auto descriptor = fdtest::write_toy_export(dir.path(), "toy8", 8, 5);
  auto d = bb::ExportDescriptor::load(descriptor);
  d.content_hash = "sha256:0000";
  EXPECT_EQ(code_of([&] { bb::GraphBackbone g(d); }), fd::ErrorCode::kHashMismatch);
}

TEST(GraphBackbone, MissingOrCorruptGraph) {
  TempDir dir;
  const auto descriptor = fdtest::write_toy_export(dir.path(), "toy8", 8, 5, false);
  auto d = bb::ExportDescriptor::load(descriptor);
  d.graph = dir / "absent.onnx";
  EXPECT_EQ(code_of([&] { bb::GraphBackbone g(d); }), fd::ErrorCode::kGraphExecution);
  std::ofstream(dir / "junk.onnx") << "not a graph";
  d.graph = dir / "junk.onnx";
  EXPECT_EQ(code_of([&] { bb::GraphBackbone g(d); }), fd::ErrorCode::kGraphExecution);
}

TEST(ParityFixtures, ExportReproducesReferenceEmbeddings) {
  TempDir dir;
  const auto descriptor = fdtest::write_toy_export(dir.path(), "toy12", 12, 9);
  const bb::ToyBackbone reference(12, 9);
  const auto fixtures_dir = dir / "fixtures";
  fdtest::fs::create_directories(fixtures_dir);
  for (int i = 0; i < 5; ++i) {
    const auto img = i == 0 ? fdtest::constant_image(256, 240, 128, 128, 128)
                            : fdtest::separable_image(i % 2 == 0, 100 + i, 230 + 7 * i);
    const std::string stem = "fixture" + std::to_string(i);
    im::save_png(img, fixtures_dir / (stem + ".png"));
    const auto emb = reference.embed(im::preprocess(img, reference.spec().preprocess));
    bb::write_embedding_file(fixtures_dir / (stem + ".emb"), emb.values);
  }
  const auto fixtures = bb::load_parity_fixtures(fixtures_dir);
  ASSERT_EQ(fixtures.size(), 5u);
  const auto graph = bb::open_backbone(descriptor.string());
  for (const auto& f : fixtures) EXPECT_LT(bb::parity_error(*graph, f), 1e-3);
}

TEST(ParityFixtures, WrongLengthRejected) {
  TempDir dir;
  im::save_png(fdtest::constant_image(224, 224, 1, 2, 3), dir / "a.png");
  const std::vector<float> wrong(5, 0.0f);
  bb::write_embedding_file(dir / "a.emb", wrong);
  const auto fixtures = bb::load_parity_fixtures(dir.path());
  ASSERT_EQ(fixtures.size(), 1u);
  EXPECT_EQ(code_of([&] { bb::parity_error(*bb::toy_backbone(8, 0), fixtures[0]); }),
            fd::ErrorCode::kShapeMismatch);
}

TEST(EmbeddingFile, RoundTrip) {
  TempDir dir;
  const std::vector<float> v = {1.5f, -2.25f, 3e-8f, 0.0f};
  bb::write_embedding_file(dir / "v.emb", v);
  EXPECT_EQ(bb::read_embedding_file(dir / "v.emb"), v);
}
