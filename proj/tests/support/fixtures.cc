// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.h"

#include <atomic>
#include <random>
#include <unistd.h>

#include "semx/text.h"

namespace semx::fixtures {

namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(SEMX_TEST_DATA_DIR); }

fs::path fig2_path() { return data_dir() / "fig2.jsonl"; }

EntityRecord entity(const std::string& id, const std::vector<std::string>& names,
                    const std::vector<std::string>& attributes) {
  EntityRecord e;
  e.entity_id = id;
  e.bbox = BBox{10, 10, 50, 50};
  e.names = names;
  e.attributes = attributes;
  for (const auto& n : names) e.synsets.push_back(normalize_symbol(n) + ".n.01");
  return e;
}

namespace {

ExpressionRecord expression(const std::string& id, const std::string& text, ExpressionKind kind) {
  ExpressionRecord r;
  r.expr_id = id;
  r.text = text;
  r.kind = kind;
  r.source = "test";
  return r;
}

ImageRecord blank(const std::string& id) {
  ImageRecord img;
  img.image_id = id;
  img.width = 640;
  img.height = 480;
  return img;
}

RegionRecord region(const std::string& id, const std::string& text, std::optional<std::string> lf,
                    std::vector<std::string> grounded) {
  RegionRecord r;
  r.region_id = id;
  r.bbox = BBox{0, 0, 100, 100};
  r.text = text;
  r.lf = std::move(lf);
  r.grounded_entities = std::move(grounded);
  return r;
}

}  // namespace

ExpressionRecord caption(const std::string& id, const std::string& text) {
  return expression(id, text, ExpressionKind::kCaption);
}

ExpressionRecord refexp(const std::string& id, const std::string& text, const std::string& target) {
  auto r = expression(id, text, ExpressionKind::kRefexp);
  r.target_entity_id = target;
  return r;
}

ExpressionRecord paragraph(const std::string& id, const std::string& text) {
  return expression(id, text, ExpressionKind::kParagraph);
}

Corpus abc_corpus() {
  ImageRecord a = blank("A");
  a.entities = {entity("a1", {"cat"}, {"black"}), entity("a2", {"dog"}, {"brown"})};
  a.captions = {caption("A_c0", "a cat and a dog"), caption("A_c1", "two pets resting")};
  a.refexps = {refexp("A_r0", "the black cat", "a1"), refexp("A_r1", "the cat on the left", "a1")};
  a.paragraphs = {paragraph("A_p0", "A black cat sits beside a brown dog.")};

  ImageRecord b = blank("B");
  b.entities = {entity("b1", {"cat"}, {"white"})};
  b.captions = {caption("B_c0", "a white cat"), caption("B_c1", "a cat alone")};
  b.refexps = {refexp("B_r0", "the white cat", "b1"), refexp("B_r1", "small cat", "b1")};
  b.paragraphs = {paragraph("B_p0", "A white cat looks at the camera.")};

  ImageRecord c = blank("C");
  c.entities = {entity("c1", {"sofa"}, {"red"})};
  c.captions = {caption("C_c0", "an empty red sofa"), caption("C_c1", "a sofa in a room")};
  c.refexps = {refexp("C_r0", "the red sofa", "c1"), refexp("C_r1", "sofa", "c1")};
  c.paragraphs = {paragraph("C_p0", "A red sofa stands in an empty room.")};
  return Corpus({a, b, c});
}

ImageRecord desk_image() {
  ImageRecord img = blank("desk");
  for (int i = 1; i <= 4; ++i) {
    img.entities.push_back(entity("m" + std::to_string(i), {"computer"}, {"black"}));
  }
  img.entities.push_back(entity("d1", {"desk"}, {"wooden"}));
  img.captions = {caption("desk_c0", "four computers on a desk")};
  img.regions = {region("desk_g0", "computers on desk",
                        "\"on\":on.r.01(m1+m2+m3+m4:computer.n.01, d1:desk.n.01)",
                        {"m1", "m2", "m3", "m4", "d1"})};
  return img;
}

Corpus planted_stats_corpus() {
  // 3 images x 36 entities; regions 10 + 10 + 9 = 29 with one plural LF in
  // each of the first two.
  std::vector<ImageRecord> images;
  const std::vector<int> region_counts{10, 10, 9};
  for (int i = 0; i < 3; ++i) {
    ImageRecord img = blank("planted" + std::to_string(i));
    for (int e = 0; e < 36; ++e) {
      img.entities.push_back(entity("p" + std::to_string(i) + "_" + std::to_string(e),
                                    {e % 2 == 0 ? "cup" : "table"}));
    }
    img.captions = {caption(img.image_id + "_c0", "cups on tables")};
    const std::string pre = "p" + std::to_string(i) + "_";
    for (int r = 0; r < region_counts[i]; ++r) {
      const std::string rid = img.image_id + "_g" + std::to_string(r);
      if (r == 0 && i < 2) {
        img.regions.push_back(region(rid, "cups on a table",
                                     "\"on\":on.r.01(" + pre + "0+" + pre + "2:cup.n.01, " + pre +
                                         "1:table.n.01)",
                                     {pre + "0", pre + "2", pre + "1"}));
      } else if (r % 3 == 1) {
        img.regions.push_back(region(rid, "a plain region", std::nullopt, {}));
      } else {
        const std::string s = pre + std::to_string(2 * r);
        const std::string o = pre + std::to_string(2 * r + 1);
        img.regions.push_back(region(rid, "a cup on a table",
                                     "\"on\":on.r.01(" + s + ":cup.n.01, " + o + ":table.n.01)",
                                     {s, o}));
      }
    }
    images.push_back(std::move(img));
  }
  return Corpus(std::move(images));
}

FixtureConfig scene_fixture_config(std::uint64_t seed, int n_images) {
  struct Scene {
    std::string anchor;
    std::string mentioned;
    std::vector<std::string> silent;
    std::vector<std::string> attributes;
  };
  const std::vector<Scene> scenes{
      {"stove", "kettle", {"fridge", "sink", "toaster", "blender"}, {"steel", "hot"}},
      {"surfboard", "wave", {"sand", "towel", "sunscreen", "seagull"}, {"wet", "sunny"}},
      {"desk", "laptop", {"monitor", "keyboard", "stapler", "lamp"}, {"grey", "tidy"}},
      {"bus", "taxi", {"pole", "hydrant", "crosswalk", "pigeon"}, {"yellow", "busy"}},
  };
  FixtureConfig cfg;
  cfg.seed = seed;
  cfg.n_images = n_images;
  cfg.min_seed_types = 1;
  cfg.max_seed_types = 1;
  cfg.max_instances_per_type = 1;
  cfg.captions_per_image = 2;
  cfg.refexps_per_entity = 1;
  cfg.regions_per_image = 2;
  for (const auto& s : scenes) {
    cfg.vocab.push_back(VocabEntry{s.anchor, s.attributes, true});
    cfg.vocab.push_back(VocabEntry{s.mentioned, s.attributes, false});
    cfg.cooccurrence[{s.anchor, s.mentioned}] = 1.0;
    for (const auto& t : s.silent) {
      cfg.vocab.push_back(VocabEntry{t, s.attributes, false});
      cfg.cooccurrence[{s.anchor, t}] = 1.0;
      cfg.silent_types.insert(t);
    }
  }
  return cfg;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("semx_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" +
           std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace semx::fixtures
