// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.h"
#include "oracles.h"
#include "semx/error.h"
#include "semx/fixture.h"
#include "semx/io.h"
#include "semx/model.h"

namespace semx {
namespace {

const std::vector<std::string> kUnary{"cat", "dog", "cup", "woman", "attr:red", "attr:small", "cow"};
const std::vector<std::string> kBinary{"on.r.01", "near.r.01", "under.r.01"};

ImageModel fig2_model(bool exhaustive) {
  const Corpus c = load_corpus(fixtures::fig2_path(), CorpusFormat::kInterchange);
  return build_model(c.at("coco_fig2"), exhaustive);
}

TEST(Fig2, WomanDenotation) {
  const ImageModel m = fig2_model(true);
  EXPECT_EQ(m.domain().size(), 13u);
  const Extension ext = interpret(m, "woman");
  EXPECT_TRUE(ext.known);
  EXPECT_EQ(ext.entities, (EntitySet{"o_505664", "o_510191"}));
  EXPECT_EQ(interpret(m, "name:woman").entities, ext.entities);
  EXPECT_EQ(interpret(m, "woman.n.01").entities, ext.entities);
  EXPECT_EQ(denotation(m, parse_lf("woman(x)?x")), ext.entities);
}

TEST(Fig2, ExistentialsUnderBothWorlds) {
  const ImageModel closed = fig2_model(true);
  const ImageModel open = fig2_model(false);
  const auto woman = parse_lf("woman(x)");
  const auto cow = parse_lf("cow(x)");
  const TruthJudgement j = evaluate(closed, woman);
  EXPECT_EQ(j.value, Truth::kTrue);
  ASSERT_TRUE(j.witness);
  EXPECT_EQ(j.witness->at("x"), "o_505664");  // first in domain order
  EXPECT_EQ(evaluate(closed, cow).value, Truth::kFalse);
  EXPECT_FALSE(evaluate(closed, cow).witness);
  EXPECT_EQ(evaluate(open, cow).value, Truth::kUnknown);
  EXPECT_EQ(evaluate(open, woman).value, Truth::kTrue);
  EXPECT_FALSE(interpret(open, "cow").known);
  EXPECT_TRUE(interpret(closed, "cow").known);
  EXPECT_TRUE(interpret(closed, "cow").entities.empty());
}

TEST(Fig2, CountingWomen) {
  const ImageModel m = fig2_model(true);
  EXPECT_EQ(evaluate(m, parse_lf("woman(x)#x=2")).value, Truth::kTrue);
  EXPECT_EQ(evaluate(m, parse_lf("woman(x)#x>=3")).value, Truth::kFalse);
  EXPECT_EQ(evaluate(m, parse_lf("woman(x)#x=1")).value, Truth::kFalse);
}

TEST(DeskImage, PluralRegionGivesMemberFacts) {
  const ImageModel m = build_model(fixtures::desk_image(), true);
  EXPECT_EQ(interpret(m, "on.r.01").pairs.size(), 4u);
  EXPECT_EQ(evaluate(m, parse_lf("computer(x)#x=4")).value, Truth::kTrue);
  EXPECT_EQ(evaluate(m, parse_lf("computer(x)#x=3")).value, Truth::kFalse);
  EXPECT_EQ(evaluate(m, parse_lf("on.r.01(x,y)&computer(x)&desk(y)#x>=2")).value, Truth::kTrue);
  EXPECT_EQ(evaluate(m, parse_lf("on.r.01(x,y)&desk(x)")).value, Truth::kFalse);
  // The region annotation itself is true of the model it came from.
  const ImageRecord img = fixtures::desk_image();
  const RegionRecord& region = img.regions[0];
  EXPECT_EQ(evaluate(m, parse_annotation(*region.lf, &region)).value, Truth::kTrue);
  EXPECT_EQ(denotation(m, parse_lf("on.r.01(x,y)&desk(y)?x")),
            (EntitySet{"m1", "m2", "m3", "m4"}));
  EXPECT_EQ(denotation(m, parse_lf("computer(x)#x=2?x")), EntitySet{});
  EXPECT_EQ(denotation(m, parse_lf("computer(x)#x=4?x")).size(), 4u);
}

TEST(OpenWorld, SeenSymbolsStayClosed) {
  const ImageModel m = build_model(fixtures::desk_image(), false);
  // Computers are annotated, so "no keyboard among them" is only unknown
  // for the unseen symbol.
  EXPECT_EQ(evaluate(m, parse_lf("computer(x)&desk(x)")).value, Truth::kFalse);
  EXPECT_EQ(evaluate(m, parse_lf("computer(x)&keyboard(x)")).value, Truth::kUnknown);
  EXPECT_EQ(evaluate(m, parse_lf("computer(x)#x=4")).value, Truth::kTrue);
  EXPECT_EQ(evaluate(m, parse_lf("computer(x)&attr:black(x)#x>=4")).value, Truth::kTrue);
}

TEST(Evaluate, ContractErrors) {
  const ImageModel m = build_model(fixtures::desk_image(), true);
  EXPECT_THROW(evaluate(m, parse_lf("computer(x)?x")), ContractError);
  EXPECT_THROW(denotation(m, parse_lf("computer(x)")), ContractError);
  EXPECT_THROW(denotation(m, parse_lf("on.r.01(x,y)?x,y")), ContractError);
}

TEST(Evaluate, EmptyDomain) {
  ImageRecord img;
  img.image_id = "empty";
  img.width = img.height = 10;
  EXPECT_EQ(evaluate(build_model(img, true), parse_lf("cat(x)")).value, Truth::kFalse);
  // No value can make the body true, known or not.
  EXPECT_EQ(evaluate(build_model(img, false), parse_lf("cat(x)")).value, Truth::kFalse);
}

TEST(Taxonomy, WidensWithAncestors) {
  const ImageModel m = build_model(fixtures::desk_image(), true);
  const Taxonomy tax{{"computer", "machine"}, {"machine", "artifact"}, {"desk", "furniture"}};
  const ImageModel w = with_taxonomy(m, tax);
  EXPECT_EQ(evaluate(m, parse_lf("artifact(x)")).value, Truth::kFalse);
  EXPECT_EQ(evaluate(w, parse_lf("artifact(x)#x=4")).value, Truth::kTrue);
  EXPECT_EQ(evaluate(w, parse_lf("furniture(x)")).value, Truth::kTrue);
}

TEST(Taxonomy, LoadsTsv) {
  fixtures::TempDir dir;
  write_file_atomic(dir.file("tax.tsv"), "cat\tanimal\ndog\tanimal\n");
  const Taxonomy t = load_taxonomy(dir.file("tax.tsv"));
  EXPECT_EQ(t.size(), 2u);
  write_file_atomic(dir.file("bad.tsv"), "cat animal\n");
  EXPECT_THROW(load_taxonomy(dir.file("bad.tsv")), ParseError);
}

class OracleAgreement : public ::testing::TestWithParam<bool> {};

TEST_P(OracleAgreement, EvaluateMatchesEnumerator) {
  const bool exhaustive = GetParam();
  Rng rng(exhaustive ? 101 : 202);
  for (int img_i = 0; img_i < 40; ++img_i) {
    const ImageRecord img = oracle::random_image(rng, "r" + std::to_string(img_i), 6);
    const ImageModel m = build_model(img, exhaustive);
    const oracle::World w = oracle::world_of(m);
    for (int k = 0; k < 50; ++k) {
      const LogicalForm lf = oracle::random_lf(rng, kUnary, kBinary);
      const TruthJudgement got = evaluate(m, lf);
      ASSERT_EQ(got.value, oracle::evaluate(w, lf)) << serialize_lf(lf) << " on " << img.image_id;
      // Witnesses accompany truth and satisfy every atom.
      EXPECT_EQ(got.witness.has_value(), got.value == Truth::kTrue);
      if (got.witness) {
        EXPECT_TRUE(oracle::satisfies(w, lf, *got.witness)) << serialize_lf(lf);
      }
    }
  }
}

TEST_P(OracleAgreement, DenotationMatchesEnumerator) {
  const bool exhaustive = GetParam();
  Rng rng(exhaustive ? 303 : 404);
  for (int img_i = 0; img_i < 30; ++img_i) {
    const ImageRecord img = oracle::random_image(rng, "d" + std::to_string(img_i), 6);
    const ImageModel m = build_model(img, exhaustive);
    const oracle::World w = oracle::world_of(m);
    for (int k = 0; k < 30; ++k) {
      LogicalForm lf = oracle::random_lf(rng, kUnary, kBinary);
      lf.free_vars = {static_cast<int>(rng.uniform_index(lf.variables.size()))};
      const EntitySet got = denotation(m, lf);
      const auto want = oracle::denotation(w, lf);
      EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), want) << serialize_lf(lf);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Worlds, OracleAgreement, ::testing::Bool(),
                         [](const auto& info) { return info.param ? "Exhaustive" : "Open"; });

TEST(Evaluate, OpenWorldAgreesWithClosedWhenDecided) {
  // The open-world value never contradicts the closed-world value: if it is
  // decided, the closed model agrees.
  Rng rng(55);
  for (int i = 0; i < 200; ++i) {
    const ImageRecord img = oracle::random_image(rng, "b" + std::to_string(i), 5);
    const LogicalForm lf = oracle::random_lf(rng, kUnary, kBinary);
    const Truth open = evaluate(build_model(img, false), lf).value;
    const Truth closed = evaluate(build_model(img, true), lf).value;
    if (open != Truth::kUnknown) {
      EXPECT_EQ(open, closed) << serialize_lf(lf);
    }
  }
}

TEST(Evaluate, AddingEntitiesKeepsAtLeastTruths) {
  // Without exact counts, extending the image with fresh entities cannot
  // falsify a true sentence.
  Rng rng(66);
  for (int i = 0; i < 200; ++i) {
    ImageRecord img = oracle::random_image(rng, "m" + std::to_string(i), 4);
    LogicalForm lf = oracle::random_lf(rng, kUnary, kBinary);
    for (auto& c : lf.cardinality) c.op = Comparator::kAtLeast;
    const Truth before = evaluate(build_model(img, true), lf).value;
    const ImageRecord more = oracle::random_image(rng, "extra", 3);
    for (auto e : more.entities) {
      e.entity_id = "zz_" + e.entity_id;
      img.entities.push_back(e);
    }
    const Truth after = evaluate(build_model(img, true), lf).value;
    if (before == Truth::kTrue) {
      EXPECT_EQ(after, Truth::kTrue) << serialize_lf(lf);
    }
  }
}

TEST(Evaluate, FixtureRegionsAreTrueOfTheirImages) {
  const Corpus c = generate_fixture_corpus(default_fixture_config(8, 60));
  int checked = 0;
  for (const auto& img : c.images()) {
    const ImageModel m = build_model(img, true);
    for (const auto& r : img.regions) {
      if (!r.lf) continue;
      EXPECT_EQ(evaluate(m, parse_annotation(*r.lf, &r)).value, Truth::kTrue) << *r.lf;
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

}  // namespace
}  // namespace semx
