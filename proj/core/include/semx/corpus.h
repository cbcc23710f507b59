// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace semx {

/// Pixel box, (x, y) is the top-left corner.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  bool operator==(const BBox&) const = default;
};

struct EntityRecord {
  std::string entity_id;
  BBox bbox;
  std::vector<std::string> names;       // surface nouns
  std::vector<std::string> attributes;  // surface adjectives
  std::vector<std::string> synsets;     // opaque normalized types, e.g. "woman.n.01"

  bool operator==(const EntityRecord&) const = default;
};

enum class ExpressionKind { kCaption, kRefexp, kParagraph, kConstructed };

std::string_view to_string(ExpressionKind kind);
ExpressionKind expression_kind_from_string(std::string_view text);

struct ExpressionRecord {
  std::string expr_id;
  std::string text;
  ExpressionKind kind = ExpressionKind::kCaption;
  std::optional<std::string> target_entity_id;  // required for refexps
  std::string source;                           // corpus tag, e.g. "refcoco"

  bool operator==(const ExpressionRecord&) const = default;
};

/// A region description. `lf` holds the region-graph triple annotation,
/// `"surface":REL(id:TYPE, id:TYPE)`; a plural argument joins its entity ids
/// with '+', e.g. `o1+o2+o3:computer.n.01`.
struct RegionRecord {
  std::string region_id;
  BBox bbox;
  std::string text;
  std::optional<std::string> lf;
  std::vector<std::string> grounded_entities;

  bool operator==(const RegionRecord&) const = default;
};

struct ImageRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<EntityRecord> entities;
  std::vector<ExpressionRecord> captions;
  std::vector<ExpressionRecord> refexps;
  std::vector<RegionRecord> regions;
  std::vector<ExpressionRecord> paragraphs;

  const EntityRecord* find_entity(std::string_view entity_id) const;

  bool operator==(const ImageRecord&) const = default;
};

/// Images in file order plus an id index. Immutable once loaded.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<ImageRecord> images);

  const std::vector<ImageRecord>& images() const { return images_; }
  std::size_t size() const { return images_.size(); }
  bool empty() const { return images_.empty(); }

  /// nullptr when absent.
  const ImageRecord* find(std::string_view image_id) const;
  const ImageRecord& at(std::string_view image_id) const;

  bool operator==(const Corpus& other) const { return images_ == other.images_; }

 private:
  std::vector<ImageRecord> images_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

enum class CorpusFormat { kInterchange, kCocoLike, kVgLike };

CorpusFormat corpus_format_from_string(std::string_view text);

/// Primary type symbol of an entity: its first synset, else its first
/// normalized name, else "".
std::string entity_type(const EntityRecord& entity);

// JSON mapping of the interchange schema (snake_case field names).
nlohmann::ordered_json to_json(const ImageRecord& image);
ImageRecord image_from_json(const nlohmann::json& j);

/// One image per line, UTF-8, '\n' terminated.
std::string serialize_corpus(const Corpus& corpus);
Corpus parse_interchange(std::string_view text);

/// Parses `path` in `format`, then validates. Throws ParseError (with line
/// context) on malformed input and ValidationError listing every offender.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

// External loaders take already-read file contents; they accept the subset of
// upstream fields this library needs and ignore the rest.
Corpus parse_coco_like(std::string_view text);
Corpus parse_vg_like(std::string_view text);

struct Violation {
  std::string kind;  // "duplicate_id", "dangling_reference", "bbox", ...
  std::string image_id;
  std::string item_id;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Lists every invariant violation; never throws.
ValidationReport validate_corpus(const Corpus& corpus);
nlohmann::ordered_json to_json(const ValidationReport& report);

/// Maps image ids of `secondary` onto ids of `primary`.
using IdMap = std::map<std::string, std::string, std::less<>>;

/// Reads a two-column TSV `primary_id<TAB>secondary_id`.
IdMap load_id_map(const std::filesystem::path& path);

/// Images of `primary` that have a mapped counterpart in `secondary`, with the
/// counterpart's entities, refexps, regions and paragraphs appended. Used to
/// intersect corpora that annotate the same underlying images.
Corpus intersect_corpora(const Corpus& primary, const Corpus& secondary,
                         const IdMap& primary_to_secondary);

}  // namespace semx
