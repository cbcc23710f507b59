// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/fixture.h"

#include <algorithm>
#include <iterator>

#include "semx/error.h"
#include "semx/rng.h"
#include "semx/text.h"

namespace semx {
namespace {

constexpr std::string_view kRelations[] = {"on", "near", "next to", "behind", "under"};

std::string padded(std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return digits;
}

std::string with_article(const std::string& phrase) {
  return std::string(indefinite_article(phrase)) + " " + phrase;
}

std::string describe(const EntityRecord& e) {
  const std::string& type = e.names.front();
  return e.attributes.empty() ? type : e.attributes.front() + " " + type;
}

BBox union_box(const BBox& a, const BBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.x + a.w, b.x + b.w);
  const double y1 = std::max(a.y + a.h, b.y + b.h);
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

void check_config(const FixtureConfig& cfg) {
  if (cfg.vocab.empty()) throw ConfigError("fixture vocabulary is empty");
  if (cfg.n_images < 1) throw ConfigError("n_images must be >= 1");
  if (cfg.min_seed_types < 1 || cfg.max_seed_types < cfg.min_seed_types) {
    throw ConfigError("seed type range must satisfy 1 <= min <= max");
  }
  if (cfg.max_instances_per_type < 1) throw ConfigError("max_instances_per_type must be >= 1");
  if (cfg.width < 64 || cfg.height < 64) throw ConfigError("fixture images must be at least 64x64");
  std::set<std::string> types;
  bool any_seedable = false;
  for (const auto& v : cfg.vocab) {
    if (v.type.empty()) throw ConfigError("vocabulary type is empty");
    if (!types.insert(v.type).second) throw ConfigError("duplicate vocabulary type '" + v.type + "'");
    any_seedable = any_seedable || v.seedable;
  }
  if (!any_seedable) throw ConfigError("no seedable vocabulary type");
  for (const auto& [pair, p] : cfg.cooccurrence) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("co-occurrence probability for (" + pair.first + ", " + pair.second +
                        ") is outside [0, 1]");
    }
    if (!types.count(pair.first) || !types.count(pair.second)) {
      throw ConfigError("co-occurrence (" + pair.first + ", " + pair.second + ") names an unknown type");
    }
  }
}

}  // namespace

FixtureConfig default_fixture_config(std::uint64_t seed, int n_images) {
  FixtureConfig cfg;
  cfg.seed = seed;
  cfg.n_images = n_images;
  cfg.vocab = {
      {"cat", {"black", "white", "ginger"}, true},     {"dog", {"brown", "small", "spotted"}, true},
      {"sofa", {"red", "grey", "leather"}, true},      {"table", {"wooden", "round", "white"}, true},
      {"cup", {"blue", "white", "empty"}, true},       {"window", {"brown", "open", "large"}, true},
      {"umbrella", {"old", "red", "striped"}, true},   {"woman", {"young", "smiling", "tall"}, true},
      {"man", {"old", "tall", "bearded"}, true},       {"bike", {"red", "old", "blue"}, true},
      {"tree", {"green", "tall", "leafless"}, true},   {"car", {"black", "parked", "red"}, true},
  };
  cfg.cooccurrence = {
      {{"cat", "sofa"}, 0.8},   {{"cup", "table"}, 0.9},  {{"man", "bike"}, 0.5},
      {{"tree", "car"}, 0.4},   {{"woman", "umbrella"}, 0.5}, {{"dog", "tree"}, 0.3},
      {{"sofa", "window"}, 0.5},
  };
  return cfg;
}

Corpus generate_fixture_corpus(const FixtureConfig& cfg) {
  check_config(cfg);
  std::map<std::string, const VocabEntry*> by_type;
  std::vector<std::string> seedable;
  for (const auto& v : cfg.vocab) {
    by_type[v.type] = &v;
    if (v.seedable) seedable.push_back(v.type);
  }
  const int width_digits = std::max<int>(4, static_cast<int>(std::to_string(cfg.n_images).size()));

  std::vector<ImageRecord> images;
  images.reserve(static_cast<std::size_t>(cfg.n_images));
  for (int i = 0; i < cfg.n_images; ++i) {
    Rng rng(stream_seed(cfg.seed, "fixture", static_cast<std::uint64_t>(i)));
    ImageRecord img;
    img.image_id = "img" + padded(static_cast<std::size_t>(i), width_digits);
    img.width = cfg.width;
    img.height = cfg.height;

    // Seed types, then closure over co-occurrence.
    std::vector<std::string> present;
    {
      auto pool = seedable;
      rng.shuffle(pool);
      const int hi = std::min<int>(cfg.max_seed_types, static_cast<int>(pool.size()));
      const int lo = std::min(cfg.min_seed_types, hi);
      const int k = rng.uniform_int(lo, hi);
      present.assign(pool.begin(), pool.begin() + k);
    }
    for (std::size_t p = 0; p < present.size(); ++p) {
      const std::string a = present[p];
      for (const auto& [pair, prob] : cfg.cooccurrence) {
        if (pair.first != a) continue;
        if (std::find(present.begin(), present.end(), pair.second) != present.end()) continue;
        if (rng.bernoulli(prob)) present.push_back(pair.second);
      }
    }

    std::map<std::string, std::vector<std::size_t>> instances;
    for (const auto& type : present) {
      const VocabEntry& v = *by_type.at(type);
      const int count = rng.uniform_int(1, cfg.max_instances_per_type);
      for (int c = 0; c < count; ++c) {
        EntityRecord e;
        e.entity_id = img.image_id + "_e" + padded(img.entities.size(), 2);
        e.names = {type};
        if (!v.attributes.empty()) e.attributes = {rng.pick(v.attributes)};
        e.synsets = {type + ".n.01"};
        const int w = rng.uniform_int(16, cfg.width / 3);
        const int h = rng.uniform_int(16, cfg.height / 3);
        e.bbox = BBox{static_cast<double>(rng.uniform_int(0, cfg.width - w)),
                      static_cast<double>(rng.uniform_int(0, cfg.height - h)), static_cast<double>(w),
                      static_cast<double>(h)};
        instances[type].push_back(img.entities.size());
        img.entities.push_back(std::move(e));
      }
    }

    std::vector<std::string> mentioned;
    for (const auto& t : present) {
      if (!cfg.silent_types.count(t)) mentioned.push_back(t);
    }

    for (int c = 0; c < cfg.captions_per_image; ++c) {
      std::string text;
      if (mentioned.empty()) {
        text = c == 0 ? "a picture" : "a photo";
      } else {
        const std::size_t m = mentioned.size();
        const std::size_t parts = std::min<std::size_t>(3, m);
        for (std::size_t p = 0; p < parts; ++p) {
          const auto& ids = instances[mentioned[(p + static_cast<std::size_t>(c)) % m]];
          const std::string phrase = with_article(describe(img.entities[rng.pick(ids)]));
          text += p == 0 ? phrase : (p == 1 ? " with " : " and ") + phrase;
        }
      }
      img.captions.push_back(ExpressionRecord{img.image_id + "_c" + std::to_string(c), text,
                                              ExpressionKind::kCaption, std::nullopt, "fixture"});
    }

    for (const auto& e : img.entities) {
      const std::string& type = e.names.front();
      const std::string side = e.bbox.x + e.bbox.w / 2 < cfg.width / 2.0 ? "left" : "right";
      const std::string level = e.bbox.y + e.bbox.h / 2 < cfg.height / 2.0 ? "top" : "bottom";
      for (int r = 0; r < cfg.refexps_per_entity; ++r) {
        std::string text;
        switch (r % 4) {
          case 0:
            text = describe(e);
            break;
          case 1:
            text = type + " on the " + side;
            break;
          case 2:
            text = "the " + describe(e) + " on the " + side;
            break;
          default:
            text = type + " at the " + level;
            break;
        }
        img.refexps.push_back(ExpressionRecord{e.entity_id + "_r" + std::to_string(r), text,
                                               ExpressionKind::kRefexp, e.entity_id, "fixture"});
      }
    }

    const std::size_t n_entities = img.entities.size();
    for (int r = 0; r < cfg.regions_per_image && n_entities > 0; ++r) {
      RegionRecord region;
      region.region_id = img.image_id + "_g" + std::to_string(r);
      if (n_entities == 1) {
        const auto& e = img.entities.front();
        region.bbox = e.bbox;
        region.text = describe(e);
        region.grounded_entities = {e.entity_id};
        img.regions.push_back(std::move(region));
        break;
      }
      const std::size_t a = rng.uniform_index(n_entities);
      std::size_t b = rng.uniform_index(n_entities - 1);
      if (b >= a) ++b;
      const auto& subject = img.entities[a];
      const auto& object = img.entities[b];
      const std::string rel(kRelations[rng.uniform_index(std::size(kRelations))]);
      const std::string& stype = subject.names.front();
      const std::string& otype = object.names.front();

      // Group every instance of the subject's type when it has several and
      // the object is of another type.
      std::vector<std::size_t> group{a};
      const auto& same = instances[stype];
      if (same.size() > 1 && stype != otype && rng.bernoulli(0.5)) group = same;

      std::string ids;
      BBox box = object.bbox;
      for (std::size_t g = 0; g < group.size(); ++g) {
        const auto& member = img.entities[group[g]];
        if (g) ids += '+';
        ids += member.entity_id;
        box = union_box(box, member.bbox);
        region.grounded_entities.push_back(member.entity_id);
      }
      region.grounded_entities.push_back(object.entity_id);
      region.bbox = box;
      region.text = group.size() > 1 ? stype + "s " + rel + " the " + otype
                                     : describe(subject) + " " + rel + " the " + otype;
      region.lf = "\"" + rel + "\":" + normalize_symbol(rel) + ".r.01(" + ids + ":" + stype +
                  ".n.01, " + object.entity_id + ":" + otype + ".n.01)";
      img.regions.push_back(std::move(region));
    }

    if (cfg.paragraphs && !mentioned.empty()) {
      std::string text;
      for (const auto& t : mentioned) {
        const auto& e = img.entities[instances[t].front()];
        text += (text.empty() ? "There is " : " There is ") + with_article(describe(e)) + ".";
      }
      if (mentioned.size() > 1) {
        text += " The " + mentioned[0] + " is " + std::string(kRelations[rng.uniform_index(std::size(kRelations))]) +
                " the " + mentioned[1] + ".";
      }
      img.paragraphs.push_back(ExpressionRecord{img.image_id + "_p0", text, ExpressionKind::kParagraph,
                                                std::nullopt, "fixture"});
    }
    images.push_back(std::move(img));
  }
  return Corpus(std::move(images));
}

FixtureConfig fixture_config_from_json(const nlohmann::json& j) {
  FixtureConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    cfg.n_images = j.value("n_images", cfg.n_images);
    for (const auto& v : j.at("vocab")) {
      VocabEntry e;
      e.type = v.at("type").get<std::string>();
      e.attributes = v.value("attributes", std::vector<std::string>{});
      e.seedable = v.value("seedable", true);
      cfg.vocab.push_back(std::move(e));
    }
    if (j.contains("cooccurrence")) {
      for (const auto& c : j["cooccurrence"]) {
        cfg.cooccurrence[{c.at("a").get<std::string>(), c.at("b").get<std::string>()}] = c.at("p").get<double>();
      }
    }
    cfg.min_seed_types = j.value("min_seed_types", cfg.min_seed_types);
    cfg.max_seed_types = j.value("max_seed_types", cfg.max_seed_types);
    cfg.max_instances_per_type = j.value("max_instances_per_type", cfg.max_instances_per_type);
    cfg.silent_types = j.value("silent_types", std::set<std::string>{});
    cfg.captions_per_image = j.value("captions_per_image", cfg.captions_per_image);
    cfg.refexps_per_entity = j.value("refexps_per_entity", cfg.refexps_per_entity);
    cfg.regions_per_image = j.value("regions_per_image", cfg.regions_per_image);
    cfg.paragraphs = j.value("paragraphs", cfg.paragraphs);
    cfg.width = j.value("width", cfg.width);
    cfg.height = j.value("height", cfg.height);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("fixture config: ") + e.what());
  }
  return cfg;
}

nlohmann::ordered_json to_json(const FixtureConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["n_images"] = cfg.n_images;
  j["vocab"] = nlohmann::ordered_json::array();
  for (const auto& v : cfg.vocab) {
    j["vocab"].push_back({{"type", v.type}, {"attributes", v.attributes}, {"seedable", v.seedable}});
  }
  j["cooccurrence"] = nlohmann::ordered_json::array();
  for (const auto& [pair, p] : cfg.cooccurrence) {
    j["cooccurrence"].push_back({{"a", pair.first}, {"b", pair.second}, {"p", p}});
  }
  j["min_seed_types"] = cfg.min_seed_types;
  j["max_seed_types"] = cfg.max_seed_types;
  j["max_instances_per_type"] = cfg.max_instances_per_type;
  j["silent_types"] = cfg.silent_types;
  j["captions_per_image"] = cfg.captions_per_image;
  j["refexps_per_entity"] = cfg.refexps_per_entity;
  j["regions_per_image"] = cfg.regions_per_image;
  j["paragraphs"] = cfg.paragraphs;
  j["width"] = cfg.width;
  j["height"] = cfg.height;
  return j;
}

}  // namespace semx
