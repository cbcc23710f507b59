// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.h"
#include "oracles.h"
#include "semx/derive.h"
#include "semx/error.h"
#include "semx/fixture.h"
#include "semx/io.h"

namespace semx {
namespace {

const std::vector<Recipe> kRecipes{Recipe::kRephrase,      Recipe::kCaptionCaption,   Recipe::kCaptionObject,
                                   Recipe::kCaptionRegion, Recipe::kCaptionParagraph, Recipe::kExistential};

struct Resources {
  Corpus corpus;
  EmbeddingTable visual;
  SemanticSpace space;
};

const Resources& resources() {
  static const Resources r = [] {
    Resources out;
    out.corpus = generate_fixture_corpus(default_fixture_config(31, 120));
    std::vector<std::pair<std::string, std::string>> items;
    for (const auto& img : out.corpus.images()) {
      std::string types;
      for (const auto& t : image_types(img)) types += t + " ";
      items.emplace_back(img.image_id, types);
    }
    out.visual = fixture_embeddings(items, 16, 3);
    out.space = build_semantic_space(out.corpus, 4, 3);
    return out;
  }();
  return r;
}

DerivationConfig config(std::size_t n, std::uint64_t seed, DistractorMode mode = DistractorMode::kRandom) {
  DerivationConfig cfg;
  cfg.n_pairs = n;
  cfg.seed = seed;
  cfg.distractor_mode = mode;
  return cfg;
}

DistractorTables tables() { return DistractorTables{&resources().visual, &resources().space}; }

TEST(Balance, PositiveCountAndSpread) {
  DerivationConfig cfg = config(7, 1);
  EXPECT_EQ(positive_count(cfg), 4u);  // round(3.5)
  cfg.balance = 0.0;
  EXPECT_EQ(positive_count(cfg), 0u);
  cfg.balance = 1.0;
  EXPECT_EQ(positive_count(cfg), 7u);
  cfg = config(10, 1);
  cfg.balance = 0.3;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < 10; ++i) pos += label_for_index(cfg, i) == Label::kPositive;
  EXPECT_EQ(pos, 3u);
  // Spread over the range rather than bunched at the front.
  EXPECT_EQ(label_for_index(cfg, 1), Label::kNegative);
}

TEST(Config, CheckRejectsBadValues) {
  DerivationConfig cfg = config(10, 1);
  cfg.balance = 1.5;
  EXPECT_THROW(cfg.check(), ConfigError);
  cfg.balance = 0.0;
  EXPECT_THROW(cfg.check(), ConfigError);
  cfg = config(0, 1);
  EXPECT_THROW(cfg.check(), ConfigError);
  cfg = config(10, 1);
  cfg.threads = 0;
  EXPECT_THROW(cfg.check(), ConfigError);
}

TEST(EnumStrings, RoundTrip) {
  for (Recipe r : kRecipes) EXPECT_EQ(recipe_from_string(to_string(r)), r);
  for (DistractorMode m : {DistractorMode::kRandom, DistractorMode::kVisual, DistractorMode::kSemantic,
                           DistractorMode::kNone}) {
    EXPECT_EQ(distractor_mode_from_string(to_string(m)), m);
  }
  EXPECT_EQ(label_from_string("positive"), Label::kPositive);
  EXPECT_THROW(recipe_from_string("nope"), ConfigError);
}

class EveryRecipe : public ::testing::TestWithParam<Recipe> {};

TEST_P(EveryRecipe, LabelsAreSoundInEveryMode) {
  const Recipe recipe = GetParam();
  for (DistractorMode mode : {DistractorMode::kRandom, DistractorMode::kVisual, DistractorMode::kSemantic}) {
    const auto pairs = derive(resources().corpus, recipe, config(200, 5, mode), tables());
    ASSERT_EQ(pairs.size(), 200u);
    std::size_t positives = 0;
    for (const auto& p : pairs) {
      EXPECT_EQ(p.recipe, recipe);
      positives += p.label == Label::kPositive;
      const auto why = oracle::unsound(resources().corpus, p, true);
      EXPECT_FALSE(why) << to_string(recipe) << "/" << to_string(mode) << ": " << why.value_or("")
                        << "\n" << to_json(p).dump();
    }
    EXPECT_EQ(positives, 100u);
  }
}

TEST_P(EveryRecipe, ByteIdenticalAcrossThreads) {
  const Recipe recipe = GetParam();
  DerivationConfig one = config(300, 9, DistractorMode::kSemantic);
  DerivationConfig many = one;
  many.threads = 4;
  const Dataset a{recipe, one, derive(resources().corpus, recipe, one, tables())};
  const Dataset b{recipe, many, derive(resources().corpus, recipe, many, tables())};
  EXPECT_EQ(serialize_dataset(a), serialize_dataset(b));
  const Dataset c{recipe, one, derive(resources().corpus, recipe, config(300, 10, DistractorMode::kSemantic), tables())};
  EXPECT_NE(serialize_dataset(a), serialize_dataset(c));
}

TEST_P(EveryRecipe, DatasetRoundTrip) {
  const Recipe recipe = GetParam();
  const DerivationConfig cfg = config(50, 2);
  const Dataset ds{recipe, cfg, derive(resources().corpus, recipe, cfg, tables())};
  const std::string text = serialize_dataset(ds);
  const Dataset back = parse_dataset(text);
  EXPECT_EQ(back, ds);
  EXPECT_EQ(serialize_dataset(back), text);
}

INSTANTIATE_TEST_SUITE_P(Recipes, EveryRecipe, ::testing::ValuesIn(kRecipes), [](const auto& info) {
  std::string name(to_string(info.param));
  std::erase(name, '-');
  return name;
});

TEST(CaptionObject, NegativesNameAbsentTypes) {
  const Corpus c = fixtures::abc_corpus();
  const auto pairs = make_caption_expression_pairs(c, ExpressionItem::kObject, config(60, 4));
  for (const auto& p : pairs) {
    if (p.label == Label::kPositive) continue;
    // A has a cat and B has a cat; the only refutable objects come from
    // images with a type the source lacks.
    if (p.anchor.image_id == "B") {
      EXPECT_NE(p.candidate.text, "there is (a) cat");
    }
    if (p.anchor.image_id == "A") {
      EXPECT_EQ(p.candidate.text, "there is (a) sofa");
    }
    EXPECT_FALSE(oracle::unsound(c, p, true));
  }
}

TEST(CaptionObject, OpenWorldAdmitsUnrefutedNegatives) {
  const Corpus c = fixtures::abc_corpus();
  DerivationConfig cfg = config(200, 4);
  cfg.exhaustive = false;
  cfg.balance = 0.01;
  const auto pairs = make_caption_expression_pairs(c, ExpressionItem::kObject, cfg);
  bool saw_shared_type = false;
  for (const auto& p : pairs) {
    saw_shared_type |= p.label == Label::kNegative && p.anchor.image_id == "A" &&
                       p.candidate.text == "there is (a) cat";
  }
  EXPECT_TRUE(saw_shared_type);
}

TEST(Existential, SentencesAndNegatives) {
  const Corpus c = fixtures::abc_corpus();
  const auto pairs = make_existentials(c, config(40, 3));
  for (const auto& p : pairs) {
    EXPECT_EQ(p.anchor.text.rfind("there is ", 0), 0u);
    EXPECT_EQ(p.anchor.text_id, "ex:" + p.anchor.entity_id.value());
    EXPECT_FALSE(oracle::unsound(c, p, true)) << to_json(p).dump();
  }
}

TEST(Existential, NameInEveryImageHasNoNegative) {
  ImageRecord a = fixtures::abc_corpus().at("B");
  ImageRecord b = a;
  b.image_id = "B2";
  const Corpus c({a, b});
  EXPECT_THROW(make_existentials(c, config(10, 1)), EmptyRecipeError);
}

TEST(Recipes, EmptyInputsThrow) {
  ImageRecord lone = fixtures::abc_corpus().at("C");
  lone.refexps.clear();
  lone.paragraphs.clear();
  const Corpus c({lone});
  const DerivationConfig cfg = config(10, 1);
  EXPECT_THROW(make_rephrase_pairs(c, cfg), EmptyRecipeError);
  EXPECT_THROW(make_caption_distractors(c, DistractorMode::kRandom, {}, cfg), EmptyRecipeError);
  EXPECT_THROW(make_caption_expression_pairs(c, ExpressionItem::kRegion, cfg), EmptyRecipeError);
  EXPECT_THROW(make_caption_paragraph_pairs(c, SemanticSpace{}, cfg), EmptyRecipeError);
}

TEST(Recipes, MissingTablesAreContractErrors) {
  const DerivationConfig cfg = config(10, 1, DistractorMode::kVisual);
  EXPECT_THROW(derive(resources().corpus, Recipe::kCaptionCaption, cfg, {}), ContractError);
  const DerivationConfig sem = config(10, 1, DistractorMode::kSemantic);
  EXPECT_THROW(derive(resources().corpus, Recipe::kCaptionParagraph, sem, {}), ContractError);
}

TEST(SharedCaptions, DistractorsNeverShareACaption) {
  // Two images with the same caption string and a third that differs.
  const Corpus base = fixtures::abc_corpus();
  ImageRecord a = base.at("A");
  ImageRecord b = base.at("B");
  b.captions[0].text = a.captions[0].text;
  const Corpus c({a, b, base.at("C")});
  DerivationConfig cfg = config(100, 6);
  cfg.balance = 0.01;
  for (const auto& p : make_caption_distractors(c, DistractorMode::kRandom, {}, cfg)) {
    const std::set<std::string> ends{p.anchor.image_id, p.candidate.image_id};
    if (p.label == Label::kNegative) {
      EXPECT_NE(ends, (std::set<std::string>{"A", "B"}));
    }
    EXPECT_FALSE(oracle::unsound(c, p, true));
  }
}

TEST(SampleNegativeObjects, OutsideTheExtension) {
  const ImageModel m = build_model(fixtures::abc_corpus().at("A"), true);
  Rng rng(1);
  const auto picks = sample_negative_objects(m, "cat", rng, 20);
  ASSERT_EQ(picks.size(), 20u);
  for (const auto& id : picks) EXPECT_EQ(id, "a2");
  EXPECT_THROW(sample_negative_objects(build_model(fixtures::abc_corpus().at("B"), true), "cat", rng),
               EmptyRecipeError);
  EXPECT_THROW(sample_negative_objects(build_model(fixtures::abc_corpus().at("A"), false), "cat", rng),
               ContractError);
}

TEST(DatasetIo, HeaderErrors) {
  EXPECT_THROW(parse_dataset(""), FormatError);
  EXPECT_THROW(parse_dataset("{\"format\":\"semx-pairs\",\"version\":99}\n"), FormatError);
  const Dataset ds{Recipe::kExistential, config(4, 1),
                   make_existentials(fixtures::abc_corpus(), config(4, 1))};
  std::string text = serialize_dataset(ds);
  text += "{not json\n";
  EXPECT_THROW(parse_dataset(text), ParseError);
}

TEST(DatasetIo, FileRoundTrip) {
  fixtures::TempDir dir;
  const Dataset ds{Recipe::kExistential, config(8, 1), make_existentials(fixtures::abc_corpus(), config(8, 1))};
  write_dataset(dir.file("d.jsonl"), ds);
  EXPECT_EQ(read_dataset(dir.file("d.jsonl")), ds);
  EXPECT_EQ(read_file(dir.file("d.jsonl")), serialize_dataset(ds));
}

}  // namespace
}  // namespace semx
