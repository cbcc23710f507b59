// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

// Loaders for the two upstream annotation layouts. Only fields needed by the
// interchange schema are read; everything else is ignored.

#include <algorithm>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "semx/corpus.h"
#include "semx/error.h"
#include "semx/text.h"

namespace semx {

using json = nlohmann::json;

namespace {

std::string id_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number_unsigned()) return std::to_string(j.get<unsigned long long>());
  throw ParseError("id must be a string or integer, got " + j.dump(), 0, 0);
}

json parse_document(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number for the message.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const std::size_t line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
    throw ParseError(std::string(what) + " line " + std::to_string(line) + ": " + e.what(), line, byte);
  }
}

/// Clips a box to the image; false when nothing is left.
bool clip(BBox& b, int width, int height) {
  const double x0 = std::clamp(b.x, 0.0, static_cast<double>(width));
  const double y0 = std::clamp(b.y, 0.0, static_cast<double>(height));
  const double x1 = std::clamp(b.x + b.w, 0.0, static_cast<double>(width));
  const double y1 = std::clamp(b.y + b.h, 0.0, static_cast<double>(height));
  b = BBox{x0, y0, x1 - x0, y1 - y0};
  return b.w > 0 && b.h > 0;
}

std::string strip_quotes(std::string s) {
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

template <typename Fn>
void for_each_in(const json& doc, const char* key, Fn&& fn) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return;
  if (!it->is_array()) throw ParseError(std::string("'") + key + "' must be an array", 0, 0);
  for (const auto& item : *it) fn(item);
}

}  // namespace

Corpus parse_coco_like(std::string_view text) {
  const json doc = parse_document(text, "coco");
  if (!doc.is_object()) throw ParseError("coco document must be a JSON object", 1, 0);
  try {
    std::vector<ImageRecord> images;
    std::map<std::string, std::size_t> by_id;
    for_each_in(doc, "images", [&](const json& j) {
      ImageRecord img;
      img.image_id = id_string(j.at("id"));
      img.width = j.at("width").get<int>();
      img.height = j.at("height").get<int>();
      by_id.emplace(img.image_id, images.size());
      images.push_back(std::move(img));
    });

    std::map<std::string, std::string> categories;
    for_each_in(doc, "categories", [&](const json& j) {
      categories[id_string(j.at("id"))] = j.at("name").get<std::string>();
    });

    auto image_for = [&](const json& j) -> ImageRecord* {
      auto it = by_id.find(id_string(j.at("image_id")));
      return it == by_id.end() ? nullptr : &images[it->second];
    };

    std::size_t dropped = 0;
    auto add_caption = [&](const json& j) {
      ImageRecord* img = image_for(j);
      if (!img) return;
      ExpressionRecord e;
      e.expr_id = "cap_" + id_string(j.at("id"));
      e.text = j.at("caption").get<std::string>();
      e.kind = ExpressionKind::kCaption;
      e.source = "coco";
      img->captions.push_back(std::move(e));
    };
    for_each_in(doc, "annotations", [&](const json& j) {
      if (j.contains("caption")) {
        add_caption(j);
        return;
      }
      if (!j.contains("bbox")) return;
      ImageRecord* img = image_for(j);
      if (!img) return;
      const auto& b = j.at("bbox");
      EntityRecord e;
      e.entity_id = id_string(j.at("id"));
      e.bbox = BBox{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                    b.at(3).get<double>()};
      if (!clip(e.bbox, img->width, img->height)) {
        ++dropped;
        return;
      }
      if (j.contains("category_id")) {
        auto cat = categories.find(id_string(j["category_id"]));
        if (cat != categories.end()) e.names.push_back(cat->second);
      }
      img->entities.push_back(std::move(e));
    });
    for_each_in(doc, "captions", add_caption);

    // RefCOCO-style refs: one entry per target object, several sentences.
    for_each_in(doc, "refs", [&](const json& j) {
      ImageRecord* img = image_for(j);
      if (!img) return;
      const std::string target = id_string(j.at("ann_id"));
      if (!img->find_entity(target)) return;
      const std::string ref_id = id_string(j.at("ref_id"));
      const std::string source = j.value("source", "refcoco");
      std::size_t k = 0;
      for_each_in(j, "sentences", [&](const json& s) {
        ExpressionRecord e;
        e.expr_id = "ref_" + ref_id + "_" + std::to_string(k++);
        e.text = s.is_string() ? s.get<std::string>() : s.at("sent").get<std::string>();
        e.kind = ExpressionKind::kRefexp;
        e.target_entity_id = target;
        e.source = source;
        img->refexps.push_back(std::move(e));
      });
    });
    if (dropped) spdlog::warn("coco: dropped {} annotation(s) with empty boxes after clipping", dropped);
    return Corpus(std::move(images));
  } catch (const json::exception& e) {
    throw ParseError(std::string("coco: ") + e.what(), 0, 0);
  }
}

Corpus parse_vg_like(std::string_view text) {
  const json doc = parse_document(text, "vg");
  if (!doc.is_array()) throw ParseError("vg document must be a JSON array of images", 1, 0);
  std::size_t record = 0;
  try {
    std::vector<ImageRecord> images;
    for (const auto& j : doc) {
      ++record;
      ImageRecord img;
      img.image_id = id_string(j.contains("image_id") ? j["image_id"] : j.at("id"));
      img.width = j.at("width").get<int>();
      img.height = j.at("height").get<int>();

      for_each_in(j, "objects", [&](const json& o) {
        EntityRecord e;
        e.entity_id = id_string(o.at("object_id"));
        e.bbox = BBox{o.at("x").get<double>(), o.at("y").get<double>(), o.at("w").get<double>(),
                      o.at("h").get<double>()};
        if (!clip(e.bbox, img.width, img.height)) return;
        if (o.contains("names")) {
          e.names = o["names"].get<std::vector<std::string>>();
        } else if (o.contains("name")) {
          e.names.push_back(o["name"].get<std::string>());
        }
        if (o.contains("attributes")) e.attributes = o["attributes"].get<std::vector<std::string>>();
        if (o.contains("synsets")) e.synsets = o["synsets"].get<std::vector<std::string>>();
        img.entities.push_back(std::move(e));
      });

      for_each_in(j, "regions", [&](const json& r) {
        RegionRecord region;
        region.region_id = id_string(r.contains("region_id") ? r["region_id"] : r.at("id"));
        region.bbox = BBox{r.at("x").get<double>(), r.at("y").get<double>(),
                           r.at("width").get<double>(), r.at("height").get<double>()};
        if (!clip(region.bbox, img.width, img.height)) return;
        region.text = r.value("phrase", "");
        std::set<std::string> grounded;
        std::vector<std::string> order;
        auto ground = [&](const std::string& id) {
          if (img.find_entity(id) && grounded.insert(id).second) order.push_back(id);
        };
        for_each_in(r, "objects", [&](const json& o) {
          ground(id_string(o.is_object() ? o.at("object_id") : o));
        });
        auto ids_of = [&](const json& v) {
          std::vector<std::string> ids;
          if (v.is_array()) {
            for (const auto& x : v) ids.push_back(id_string(x));
          } else {
            ids.push_back(id_string(v));
          }
          return ids;
        };
        // The first relationship with resolvable arguments becomes the LF.
        for_each_in(r, "relationships", [&](const json& rel) {
          if (region.lf) return;
          const auto subjects = ids_of(rel.at("subject_id"));
          const auto objects = ids_of(rel.at("object_id"));
          auto resolvable = [&](const std::vector<std::string>& ids) {
            return !ids.empty() && std::all_of(ids.begin(), ids.end(),
                                               [&](const auto& id) { return img.find_entity(id); });
          };
          if (!resolvable(subjects) || !resolvable(objects)) return;
          const std::string predicate = rel.value("predicate", "");
          std::string symbol;
          if (rel.contains("synsets") && !rel["synsets"].empty()) {
            symbol = rel["synsets"][0].get<std::string>();
          } else {
            symbol = normalize_symbol(predicate);
          }
          if (symbol.empty()) return;
          auto arg = [&](const std::vector<std::string>& ids) {
            std::string out;
            for (std::size_t i = 0; i < ids.size(); ++i) {
              if (i) out += '+';
              out += ids[i];
              ground(ids[i]);
            }
            const std::string type = entity_type(*img.find_entity(ids.front()));
            if (!type.empty()) out += ":" + type;
            return out;
          };
          region.lf = "\"" + strip_quotes(predicate) + "\":" + symbol + "(" + arg(subjects) + ", " +
                      arg(objects) + ")";
        });
        region.grounded_entities = order;
        img.regions.push_back(std::move(region));
      });

      std::size_t k = 0;
      auto add_paragraph = [&](const std::string& p) {
        ExpressionRecord e;
        e.expr_id = "par_" + img.image_id + "_" + std::to_string(k++);
        e.text = p;
        e.kind = ExpressionKind::kParagraph;
        e.source = "vg-paragraphs";
        img.paragraphs.push_back(std::move(e));
      };
      if (j.contains("paragraph") && j["paragraph"].is_string()) add_paragraph(j["paragraph"].get<std::string>());
      for_each_in(j, "paragraphs", [&](const json& p) { add_paragraph(p.get<std::string>()); });

      std::size_t c = 0;
      for_each_in(j, "captions", [&](const json& p) {
        ExpressionRecord e;
        e.expr_id = "cap_" + img.image_id + "_" + std::to_string(c++);
        e.text = p.is_string() ? p.get<std::string>() : p.at("caption").get<std::string>();
        e.kind = ExpressionKind::kCaption;
        e.source = "vg";
        img.captions.push_back(std::move(e));
      });
      images.push_back(std::move(img));
    }
    return Corpus(std::move(images));
  } catch (const json::exception& e) {
    throw ParseError("vg record " + std::to_string(record) + ": " + e.what(), 0, 0);
  }
}

}  // namespace semx
