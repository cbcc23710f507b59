// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/corpus.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "semx/error.h"
#include "semx/io.h"
#include "semx/logical_form.h"
#include "semx/text.h"

namespace semx {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(ExpressionKind kind) {
  switch (kind) {
    case ExpressionKind::kCaption:
      return "caption";
    case ExpressionKind::kRefexp:
      return "refexp";
    case ExpressionKind::kParagraph:
      return "paragraph";
    case ExpressionKind::kConstructed:
      return "constructed";
  }
  return "caption";
}

ExpressionKind expression_kind_from_string(std::string_view text) {
  if (text == "caption") return ExpressionKind::kCaption;
  if (text == "refexp") return ExpressionKind::kRefexp;
  if (text == "paragraph") return ExpressionKind::kParagraph;
  if (text == "constructed") return ExpressionKind::kConstructed;
  throw ParseError("unknown expression kind '" + std::string(text) + "'", 0, 0);
}

CorpusFormat corpus_format_from_string(std::string_view text) {
  if (text == "jsonl" || text == "interchange") return CorpusFormat::kInterchange;
  if (text == "coco" || text == "coco-like") return CorpusFormat::kCocoLike;
  if (text == "vg" || text == "vg-like") return CorpusFormat::kVgLike;
  throw UsageError("unknown corpus format '" + std::string(text) + "'");
}

const EntityRecord* ImageRecord::find_entity(std::string_view entity_id) const {
  for (const auto& e : entities) {
    if (e.entity_id == entity_id) return &e;
  }
  return nullptr;
}

Corpus::Corpus(std::vector<ImageRecord> images) : images_(std::move(images)) {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    // First occurrence wins; duplicates are reported by validate_corpus.
    index_.emplace(images_[i].image_id, i);
  }
}

const ImageRecord* Corpus::find(std::string_view image_id) const {
  auto it = index_.find(image_id);
  return it == index_.end() ? nullptr : &images_[it->second];
}

const ImageRecord& Corpus::at(std::string_view image_id) const {
  if (const auto* img = find(image_id)) return *img;
  throw LookupError("unknown image '" + std::string(image_id) + "'");
}

std::string entity_type(const EntityRecord& entity) {
  if (!entity.synsets.empty()) return entity.synsets.front();
  if (!entity.names.empty()) return normalize_symbol(entity.names.front());
  return "";
}

// JSON mapping ------------------------------------------------------------

namespace {

ojson bbox_json(const BBox& b) { return ojson::array({b.x, b.y, b.w, b.h}); }

BBox bbox_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("bbox must be [x, y, w, h]", 0, 0);
  return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

ojson expr_json(const ExpressionRecord& e) {
  ojson j;
  j["expr_id"] = e.expr_id;
  j["text"] = e.text;
  j["kind"] = to_string(e.kind);
  if (e.target_entity_id) j["target_entity_id"] = *e.target_entity_id;
  j["source"] = e.source;
  return j;
}

template <typename T>
std::vector<T> list_or_empty(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  return it->get<std::vector<T>>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

ExpressionRecord expr_from(const json& j, ExpressionKind default_kind) {
  ExpressionRecord e;
  e.expr_id = j.at("expr_id").get<std::string>();
  e.text = j.at("text").get<std::string>();
  auto kind = j.find("kind");
  e.kind = kind == j.end() ? default_kind : expression_kind_from_string(kind->get<std::string>());
  e.target_entity_id = optional_string(j, "target_entity_id");
  e.source = j.value("source", "");
  return e;
}

std::vector<ExpressionRecord> exprs_from(const json& j, const char* key, ExpressionKind kind) {
  std::vector<ExpressionRecord> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  for (const auto& e : *it) out.push_back(expr_from(e, kind));
  return out;
}

}  // namespace

ojson to_json(const ImageRecord& img) {
  ojson j;
  j["image_id"] = img.image_id;
  j["width"] = img.width;
  j["height"] = img.height;
  j["entities"] = ojson::array();
  for (const auto& e : img.entities) {
    ojson je;
    je["entity_id"] = e.entity_id;
    je["bbox"] = bbox_json(e.bbox);
    je["names"] = e.names;
    je["attributes"] = e.attributes;
    je["synsets"] = e.synsets;
    j["entities"].push_back(std::move(je));
  }
  auto exprs = [](const std::vector<ExpressionRecord>& list) {
    ojson a = ojson::array();
    for (const auto& e : list) a.push_back(expr_json(e));
    return a;
  };
  j["captions"] = exprs(img.captions);
  j["refexps"] = exprs(img.refexps);
  j["regions"] = ojson::array();
  for (const auto& r : img.regions) {
    ojson jr;
    jr["region_id"] = r.region_id;
    jr["bbox"] = bbox_json(r.bbox);
    jr["text"] = r.text;
    if (r.lf) jr["lf"] = *r.lf;
    jr["grounded_entities"] = r.grounded_entities;
    j["regions"].push_back(std::move(jr));
  }
  j["paragraphs"] = exprs(img.paragraphs);
  return j;
}

ImageRecord image_from_json(const json& j) {
  ImageRecord img;
  img.image_id = j.at("image_id").get<std::string>();
  img.width = j.at("width").get<int>();
  img.height = j.at("height").get<int>();
  if (auto it = j.find("entities"); it != j.end() && !it->is_null()) {
    for (const auto& je : *it) {
      EntityRecord e;
      e.entity_id = je.at("entity_id").get<std::string>();
      e.bbox = bbox_from(je.at("bbox"));
      e.names = list_or_empty<std::string>(je, "names");
      e.attributes = list_or_empty<std::string>(je, "attributes");
      e.synsets = list_or_empty<std::string>(je, "synsets");
      img.entities.push_back(std::move(e));
    }
  }
  img.captions = exprs_from(j, "captions", ExpressionKind::kCaption);
  img.refexps = exprs_from(j, "refexps", ExpressionKind::kRefexp);
  if (auto it = j.find("regions"); it != j.end() && !it->is_null()) {
    for (const auto& jr : *it) {
      RegionRecord r;
      r.region_id = jr.at("region_id").get<std::string>();
      r.bbox = bbox_from(jr.at("bbox"));
      r.text = jr.value("text", "");
      r.lf = optional_string(jr, "lf");
      r.grounded_entities = list_or_empty<std::string>(jr, "grounded_entities");
      img.regions.push_back(std::move(r));
    }
  }
  img.paragraphs = exprs_from(j, "paragraphs", ExpressionKind::kParagraph);
  return img;
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& img : corpus.images()) {
    out += to_json(img).dump();
    out += '\n';
  }
  return out;
}

Corpus parse_interchange(std::string_view text) {
  std::vector<ImageRecord> images;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": malformed JSON: " + e.what(), lineno,
                       e.byte > 0 ? e.byte - 1 : 0);
    }
    try {
      images.push_back(image_from_json(j));
    } catch (const json::exception& e) {
      std::string id = j.is_object() && j.contains("image_id") ? j["image_id"].dump() : "?";
      throw ParseError("line " + std::to_string(lineno) + " (image " + id + "): " + e.what(), lineno, 0);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), lineno, e.offset());
    }
  }
  return Corpus(std::move(images));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  const std::string text = read_file(path);
  Corpus c;
  switch (format) {
    case CorpusFormat::kInterchange:
      c = parse_interchange(text);
      break;
    case CorpusFormat::kCocoLike:
      c = parse_coco_like(text);
      break;
    case CorpusFormat::kVgLike:
      c = parse_vg_like(text);
      break;
  }
  const auto report = validate_corpus(c);
  if (!report.ok()) {
    std::vector<std::string> offenders;
    for (const auto& v : report.violations) {
      offenders.push_back(v.kind + " " + v.image_id + "/" + v.item_id + ": " + v.message);
    }
    const std::string what = path.string() + ": " + std::to_string(offenders.size()) +
                             " violation(s), first: " + offenders.front();
    throw ValidationError(what, std::move(offenders));
  }
  return c;
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  write_file_atomic(path, serialize_corpus(corpus));
}

// Validation ----------------------------------------------------------------

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void add(std::string kind, const std::string& image, const std::string& item, std::string msg) {
    report_.violations.push_back(Violation{std::move(kind), image, item, std::move(msg)});
  }

  void image(const ImageRecord& img) {
    const std::string& iid = img.image_id;
    if (iid.empty()) add("empty_id", iid, "", "image_id is empty");
    if (img.width <= 0 || img.height <= 0) {
      add("image_size", iid, "", "width and height must be positive");
    }

    std::set<std::string> entity_ids;
    for (const auto& e : img.entities) {
      if (e.entity_id.empty()) add("empty_id", iid, "", "entity_id is empty");
      if (!entity_ids.insert(e.entity_id).second) {
        add("duplicate_id", iid, e.entity_id, "entity_id is not unique");
      }
      const auto& b = e.bbox;
      if (!(b.w > 0 && b.h > 0)) add("bbox", iid, e.entity_id, "bbox must have positive size");
      if (!(b.x >= 0 && b.y >= 0) || b.x + b.w > img.width || b.y + b.h > img.height) {
        add("bbox", iid, e.entity_id, "bbox exceeds image bounds");
      }
    }

    std::set<std::string> targets;
    std::set<std::string> expr_ids;
    auto expressions = [&](const std::vector<ExpressionRecord>& list, ExpressionKind expected) {
      for (const auto& x : list) {
        if (x.expr_id.empty()) add("empty_id", iid, "", "expr_id is empty");
        if (!expr_ids.insert(x.expr_id).second) add("duplicate_id", iid, x.expr_id, "expr_id is not unique");
        if (x.text.find_first_not_of(" \t\r\n") == std::string::npos) {
          add("empty_text", iid, x.expr_id, "expression text is empty");
        }
        if (x.kind != expected) {
          add("kind", iid, x.expr_id,
              "kind '" + std::string(to_string(x.kind)) + "' in the " +
                  std::string(to_string(expected)) + " layer");
        }
        if (x.kind == ExpressionKind::kRefexp && !x.target_entity_id) {
          add("dangling_reference", iid, x.expr_id, "refexp has no target_entity_id");
        }
        if (x.target_entity_id) {
          if (!entity_ids.count(*x.target_entity_id)) {
            add("dangling_reference", iid, x.expr_id,
                "target '" + *x.target_entity_id + "' is not an entity of the image");
          } else {
            targets.insert(*x.target_entity_id);
          }
        }
      }
    };
    expressions(img.captions, ExpressionKind::kCaption);
    expressions(img.refexps, ExpressionKind::kRefexp);
    expressions(img.paragraphs, ExpressionKind::kParagraph);

    std::set<std::string> region_ids;
    for (const auto& r : img.regions) {
      if (r.region_id.empty()) add("empty_id", iid, "", "region_id is empty");
      if (!region_ids.insert(r.region_id).second) {
        add("duplicate_id", iid, r.region_id, "region_id is not unique");
      }
      const auto& b = r.bbox;
      if (!(b.w > 0 && b.h > 0) || !(b.x >= 0 && b.y >= 0) || b.x + b.w > img.width ||
          b.y + b.h > img.height) {
        add("bbox", iid, r.region_id, "region bbox is empty or exceeds image bounds");
      }
      for (const auto& g : r.grounded_entities) {
        if (!entity_ids.count(g)) {
          add("dangling_reference", iid, r.region_id, "grounded entity '" + g + "' does not resolve");
        } else {
          targets.insert(g);
        }
      }
      if (!r.lf) continue;
      try {
        const GroundedLf g = parse_region_lf(*r.lf, &r);
        for (const auto& arg : g.arguments) {
          for (const auto& id : arg) {
            if (!entity_ids.count(id)) {
              add("dangling_reference", iid, r.region_id, "lf argument '" + id + "' does not resolve");
            }
          }
        }
      } catch (const GroundingError& e) {
        add("dangling_reference", iid, r.region_id, e.what());
      } catch (const ParseError& e) {
        add("lf_syntax", iid, r.region_id, e.what());
      }
    }

    for (const auto& e : img.entities) {
      if (targets.count(e.entity_id) && e.names.empty()) {
        add("missing_names", iid, e.entity_id, "annotation target has no names");
      }
    }
  }

 private:
  ValidationReport& report_;
};

}  // namespace

ValidationReport validate_corpus(const Corpus& corpus) {
  ValidationReport report;
  Checker check(report);
  std::set<std::string> seen;
  for (const auto& img : corpus.images()) {
    if (!seen.insert(img.image_id).second) {
      check.add("duplicate_id", img.image_id, "", "image_id is not unique");
    }
    check.image(img);
  }
  return report;
}

ojson to_json(const ValidationReport& report) {
  ojson j;
  j["ok"] = report.ok();
  j["violations"] = ojson::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back(
        {{"kind", v.kind}, {"image_id", v.image_id}, {"item_id", v.item_id}, {"message", v.message}});
  }
  return j;
}

// Corpus intersection -------------------------------------------------------

IdMap load_id_map(const std::filesystem::path& path) {
  IdMap map;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("id map line " + std::to_string(lineno) + ": expected two tab-separated ids",
                       lineno, 0);
    }
    map.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return map;
}

Corpus intersect_corpora(const Corpus& primary, const Corpus& secondary, const IdMap& primary_to_secondary) {
  std::vector<ImageRecord> out;
  for (const auto& img : primary.images()) {
    auto it = primary_to_secondary.find(img.image_id);
    if (it == primary_to_secondary.end()) continue;
    const ImageRecord* other = secondary.find(it->second);
    if (!other) continue;
    ImageRecord merged = img;
    auto append = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
    append(merged.entities, other->entities);
    append(merged.refexps, other->refexps);
    append(merged.regions, other->regions);
    append(merged.paragraphs, other->paragraphs);
    out.push_back(std::move(merged));
  }
  return Corpus(std::move(out));
}

}  // namespace semx
