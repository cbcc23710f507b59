// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semx/corpus.h"
#include "semx/model.h"
#include "semx/rng.h"
#include "semx/similarity.h"

namespace semx {

enum class Label { kNegative, kPositive };
enum class Recipe {
  kRephrase,
  kCaptionCaption,
  kCaptionObject,
  kCaptionRegion,
  kCaptionParagraph,
  kExistential,
};
enum class DistractorMode { kRandom, kVisual, kSemantic, kNone };

std::string_view to_string(Label v);
std::string_view to_string(Recipe v);
std::string_view to_string(DistractorMode v);
Label label_from_string(std::string_view s);
Recipe recipe_from_string(std::string_view s);
DistractorMode distractor_mode_from_string(std::string_view s);

/// One side of a pair. `text_id` keys the text in embedding tables: an
/// expr_id, a region_id, or "obj:<entity_id>" for constructed object frames.
struct PairSide {
  std::string text;
  std::optional<std::string> lf;  // LF text syntax
  std::string image_id;
  std::optional<std::string> entity_id;
  std::string text_id;

  bool operator==(const PairSide&) const = default;
};

struct DerivedPair {
  PairSide anchor;
  PairSide candidate;
  Label label = Label::kPositive;
  Recipe recipe = Recipe::kRephrase;
  DistractorMode distractor_mode = DistractorMode::kNone;  // kNone for positives
  std::vector<std::string> provenance;  // image and entity ids used

  bool operator==(const DerivedPair&) const = default;
};

struct DerivationConfig {
  std::uint64_t seed = 0;
  std::size_t n_pairs = 100;
  double balance = 0.5;  // positive fraction
  DistractorMode distractor_mode = DistractorMode::kRandom;
  /// Treat annotations as complete: negative candidates must be false of the
  /// anchor's image model.
  bool exhaustive = true;
  unsigned threads = 1;

  /// Throws ConfigError.
  void check() const;
};

/// Similarity resources for distractor selection. Only the one matching the
/// requested mode is needed.
struct DistractorTables {
  const EmbeddingTable* visual = nullptr;   // image_id -> image vector
  const SemanticSpace* semantic = nullptr;
};

/// Number of positives for `cfg`: round(n_pairs * balance).
std::size_t positive_count(const DerivationConfig& cfg);
/// Label of pair `index`; positives are spread evenly over the index range.
Label label_for_index(const DerivationConfig& cfg, std::size_t index);

/// Entities of `m` outside the extension of `word`, sampled with replacement.
/// ContractError on an open-world model; EmptyRecipeError if every entity
/// bears `word`.
std::vector<std::string> sample_negative_objects(const ImageModel& m, std::string_view word,
                                                 Rng& rng, std::size_t count = 1);

/// "there is a/an <attr> <name>" for entities carrying both; negatives pair
/// the sentence with an image lacking any entity of that name.
std::vector<DerivedPair> make_existentials(const Corpus& c, const DerivationConfig& cfg);

/// Caption pairs (recipe caption-caption): positive with another caption of
/// its own image, negative with a caption of a distractor image chosen
/// uniformly (random) or as the nearest neighbour under image similarity.
/// The similarity pool excludes the source image and any image sharing an
/// identical caption string.
std::vector<DerivedPair> make_caption_distractors(const Corpus& c, DistractorMode mode,
                                                  const DistractorTables& tables,
                                                  const DerivationConfig& cfg);

/// Two referring expressions of one entity (positive) or of entities in
/// different images (negative).
std::vector<DerivedPair> make_rephrase_pairs(const Corpus& c, const DerivationConfig& cfg,
                                             const DistractorTables& tables = {});

enum class ExpressionItem { kObject, kRegion };

/// Caption + "there is (a) <name>" (kObject) or caption + region description
/// with its LF (kRegion).
std::vector<DerivedPair> make_caption_expression_pairs(const Corpus& c, ExpressionItem kind,
                                                       const DerivationConfig& cfg,
                                                       const DistractorTables& tables = {});

/// Caption + own paragraph (positive) or the paragraph of the most similar
/// paragraph-bearing image (negative; random mode samples uniformly).
std::vector<DerivedPair> make_caption_paragraph_pairs(const Corpus& c, const SemanticSpace& space,
                                                      const DerivationConfig& cfg);
/// Same, with the distractor table picked by the configured mode.
std::vector<DerivedPair> make_caption_paragraph_pairs(const Corpus& c, const DistractorTables& tables,
                                                      const DerivationConfig& cfg);

/// Dispatch by recipe. `tables` must provide what the mode needs
/// (ContractError otherwise).
std::vector<DerivedPair> derive(const Corpus& c, Recipe recipe, const DerivationConfig& cfg,
                                const DistractorTables& tables);

inline constexpr std::string_view kDatasetFormat = "semx-pairs";
inline constexpr int kDatasetVersion = 1;

struct Dataset {
  Recipe recipe = Recipe::kRephrase;
  DerivationConfig config;
  std::vector<DerivedPair> pairs;

  bool operator==(const Dataset& o) const;
};

nlohmann::ordered_json to_json(const DerivedPair& p);
DerivedPair pair_from_json(const nlohmann::json& j);

/// JSONL: a header record {format, version, recipe, seed, n_pairs, balance,
/// distractor_mode, exhaustive}, then one pair per line.
std::string serialize_dataset(const Dataset& ds);
/// FormatError on a missing header or version mismatch.
Dataset parse_dataset(std::string_view text);
void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace semx
