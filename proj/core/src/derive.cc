// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/derive.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include <spdlog/spdlog.h>

#include "semx/error.h"
#include "semx/logical_form.h"
#include "semx/parallel.h"
#include "semx/text.h"

namespace semx {
namespace {

// Rejection sampling gives up after this many draws and falls back to a
// shuffled scan, which always terminates.
constexpr int kMaxDraws = 64;

template <typename E, std::size_t N>
E lookup(const std::pair<E, std::string_view> (&table)[N], std::string_view s, const char* what) {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E e) {
  for (const auto& [v, name] : table) {
    if (v == e) return name;
  }
  return "?";
}

constexpr std::pair<Label, std::string_view> kLabels[] = {{Label::kNegative, "negative"},
                                                           {Label::kPositive, "positive"}};
constexpr std::pair<Recipe, std::string_view> kRecipes[] = {
    {Recipe::kRephrase, "rephrase"},
    {Recipe::kCaptionCaption, "caption-caption"},
    {Recipe::kCaptionObject, "caption-object"},
    {Recipe::kCaptionRegion, "caption-region"},
    {Recipe::kCaptionParagraph, "caption-paragraph"},
    {Recipe::kExistential, "existential"},
};
constexpr std::pair<DistractorMode, std::string_view> kModes[] = {
    {DistractorMode::kRandom, "random"},
    {DistractorMode::kVisual, "visual"},
    {DistractorMode::kSemantic, "semantic"},
    {DistractorMode::kNone, "none"},
};

std::vector<std::string> unique_ids(std::initializer_list<std::string> ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) {
    if (!id.empty() && std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

PairSide side_of(const ImageRecord& img, const ExpressionRecord& e) {
  return PairSide{e.text, std::nullopt, img.image_id, e.target_entity_id, e.expr_id};
}

DerivedPair make_pair(PairSide anchor, PairSide candidate, Label label, Recipe recipe, DistractorMode mode) {
  DerivedPair p;
  p.provenance = unique_ids({anchor.image_id, anchor.entity_id.value_or(""), candidate.image_id,
                             candidate.entity_id.value_or("")});
  p.anchor = std::move(anchor);
  p.candidate = std::move(candidate);
  p.label = label;
  p.recipe = recipe;
  p.distractor_mode = label == Label::kPositive ? DistractorMode::kNone : mode;
  return p;
}

/// Picks distractor images for a source image under one mode. The pool
/// always excludes the source and images sharing an identical caption.
class Distractors {
 public:
  Distractors(const Corpus& c, DistractorMode mode, const DistractorTables& tables)
      : c_(c), mode_(mode), tables_(tables) {
    if (mode == DistractorMode::kVisual && !tables.visual) {
      throw ContractError("visual distractors need an image embedding table");
    }
    if (mode == DistractorMode::kSemantic && !tables.semantic) {
      throw ContractError("semantic distractors need a semantic space");
    }
    if (mode == DistractorMode::kNone) throw ConfigError("distractor mode 'none' cannot select negatives");
    std::map<std::string, std::vector<std::size_t>> by_caption;
    const auto& images = c.images();
    for (std::size_t i = 0; i < images.size(); ++i) {
      for (const auto& cap : images[i].captions) by_caption[cap.text].push_back(i);
    }
    shared_.resize(images.size());
    for (const auto& [text, idx] : by_caption) {
      for (std::size_t a : idx) {
        for (std::size_t b : idx) {
          if (a != b) shared_[a].insert(b);
        }
      }
    }
  }

  DistractorMode mode() const { return mode_; }

  /// First acceptable image in mode order: uniform draws for random, then
  /// descending similarity. nullopt if no image qualifies.
  std::optional<std::size_t> choose(std::size_t source, Rng& rng,
                                    const std::function<bool(std::size_t)>& accept) const {
    const std::size_t n = c_.size();
    auto allowed = [&](std::size_t i) { return i != source && !shared_[source].count(i); };
    if (mode_ == DistractorMode::kRandom) {
      if (n < 2) return std::nullopt;
      for (int d = 0; d < kMaxDraws; ++d) {
        std::size_t i = rng.uniform_index(n - 1);
        if (i >= source) ++i;
        if (allowed(i) && accept(i)) return i;
      }
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      rng.shuffle(order);
      for (std::size_t i : order) {
        if (allowed(i) && accept(i)) return i;
      }
      return std::nullopt;
    }

    const EmbeddingTable& table =
        mode_ == DistractorMode::kVisual ? *tables_.visual : tables_.semantic->projected();
    const std::string& source_id = c_.images()[source].image_id;
    const auto query = table.vector(source_id);
    if (std::all_of(query.begin(), query.end(), [](double x) { return x == 0; })) {
      // No similarity signal for this image; fall back to a random pick.
      Distractors random(*this);
      random.mode_ = DistractorMode::kRandom;
      return random.choose(source, rng, accept);
    }
    std::set<std::string, std::less<>> exclude{source_id};
    for (std::size_t i : shared_[source]) exclude.insert(c_.images()[i].image_id);
    for (const auto& nb : nearest_neighbors(table, query, table.size(), exclude)) {
      const ImageRecord* img = c_.find(nb.id);
      if (!img) continue;
      const auto i = static_cast<std::size_t>(img - c_.images().data());
      if (accept(i)) return i;
    }
    return std::nullopt;
  }

 private:
  const Corpus& c_;
  DistractorMode mode_;
  DistractorTables tables_;
  std::vector<std::set<std::size_t>> shared_;
};

/// Runs `make(i, label, rng)` for every pair index on cfg.threads workers.
template <typename Make>
std::vector<DerivedPair> generate(const DerivationConfig& cfg, Recipe recipe, Make&& make) {
  std::vector<DerivedPair> out(cfg.n_pairs);
  parallel_for(cfg.n_pairs, cfg.threads, [&](std::size_t i) {
    Rng rng(stream_seed(cfg.seed, to_string(recipe), i));
    out[i] = make(label_for_index(cfg, i), rng);
  });
  return out;
}

bool needs_negatives(const DerivationConfig& cfg) { return positive_count(cfg) < cfg.n_pairs; }
bool needs_positives(const DerivationConfig& cfg) { return positive_count(cfg) > 0; }

}  // namespace

std::string_view to_string(Label v) { return name_of(kLabels, v); }
std::string_view to_string(Recipe v) { return name_of(kRecipes, v); }
std::string_view to_string(DistractorMode v) { return name_of(kModes, v); }
Label label_from_string(std::string_view s) { return lookup(kLabels, s, "label"); }
Recipe recipe_from_string(std::string_view s) { return lookup(kRecipes, s, "recipe"); }
DistractorMode distractor_mode_from_string(std::string_view s) { return lookup(kModes, s, "distractor mode"); }

void DerivationConfig::check() const {
  if (n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
  if (!(balance > 0.0 && balance < 1.0)) throw ConfigError("balance must lie in (0, 1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::size_t positive_count(const DerivationConfig& cfg) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(cfg.n_pairs) * cfg.balance));
}

Label label_for_index(const DerivationConfig& cfg, std::size_t index) {
  const std::size_t n = cfg.n_pairs;
  const std::size_t pos = positive_count(cfg);
  return (index + 1) * pos / n > index * pos / n ? Label::kPositive : Label::kNegative;
}

std::vector<std::string> sample_negative_objects(const ImageModel& m, std::string_view word, Rng& rng,
                                                 std::size_t count) {
  if (!m.exhaustive()) {
    throw ContractError("negative sampling needs an exhaustive model; image '" + m.image_id() +
                        "' is open-world");
  }
  const Extension ext = interpret(m, word);
  std::vector<std::string> pool;
  for (const auto& e : m.domain()) {
    if (!ext.entities.count(e)) pool.push_back(e);
  }
  if (pool.empty()) {
    throw EmptyRecipeError("every entity of image '" + m.image_id() + "' is in the extension of '" +
                           std::string(word) + "'");
  }
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(rng.pick(pool));
  return out;
}

std::vector<DerivedPair> make_existentials(const Corpus& c, const DerivationConfig& cfg) {
  cfg.check();
  struct Item {
    std::size_t image;
    const EntityRecord* entity;
    std::string name;  // normalized
    std::string sentence;
  };
  const auto& images = c.images();
  std::vector<std::set<std::string>> names(images.size());
  std::vector<Item> items;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& e : images[i].entities) {
      for (const auto& n : e.names) {
        if (auto s = normalize_symbol(n); !s.empty()) names[i].insert(s);
      }
      if (e.names.empty() || e.attributes.empty()) continue;
      const std::string& attr = e.attributes.front();
      const std::string& name = e.names.front();
      if (normalize_symbol(name).empty() || normalize_symbol(attr).empty()) continue;
      items.push_back(Item{i, &e, normalize_symbol(name),
                           "there is " + std::string(indefinite_article(attr)) + " " + attr + " " + name});
    }
  }
  if (items.empty()) throw EmptyRecipeError("no entity carries both a name and an attribute");

  // Names present in every image admit no negative; skip them for negatives.
  std::vector<std::size_t> negatable;
  std::set<std::string> skipped;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const bool everywhere = std::all_of(names.begin(), names.end(),
                                        [&](const auto& s) { return s.count(items[k].name) > 0; });
    if (everywhere) {
      skipped.insert(items[k].name);
    } else {
      negatable.push_back(k);
    }
  }
  if (!skipped.empty() && needs_negatives(cfg)) {
    spdlog::warn("existential: {} name(s) occur in every image and get no negatives", skipped.size());
  }
  if (negatable.empty() && needs_negatives(cfg)) {
    throw EmptyRecipeError("existential: every name occurs in every image; no negative possible");
  }

  return generate(cfg, Recipe::kExistential, [&](Label label, Rng& rng) {
    const Item& item = label == Label::kPositive ? rng.pick(items) : items[rng.pick(negatable)];
    const ImageRecord& src = images[item.image];
    const std::string lf = serialize_lf(parse_existential(item.sentence));
    PairSide anchor{item.sentence, lf, src.image_id, item.entity->entity_id, "ex:" + item.entity->entity_id};
    if (label == Label::kPositive) {
      PairSide candidate = anchor;
      return make_pair(std::move(anchor), std::move(candidate), label, Recipe::kExistential,
                       DistractorMode::kRandom);
    }
    // Negatives ignore the shared-caption exclusion: any image without the
    // name refutes the sentence.
    std::vector<std::size_t> pool;
    std::optional<std::size_t> pick;
    for (int d = 0; d < kMaxDraws && !pick; ++d) {
      const std::size_t i = rng.uniform_index(images.size());
      if (!names[i].count(item.name)) pick = i;
    }
    if (!pick) {
      for (std::size_t i = 0; i < images.size(); ++i) {
        if (!names[i].count(item.name)) pool.push_back(i);
      }
      pick = rng.pick(pool);
    }
    const ImageRecord& other = images[*pick];
    PairSide candidate{item.sentence, lf, other.image_id, std::nullopt, "ex:" + item.entity->entity_id};
    return make_pair(std::move(anchor), std::move(candidate), label, Recipe::kExistential,
                     DistractorMode::kRandom);
  });
}

std::vector<DerivedPair> make_caption_distractors(const Corpus& c, DistractorMode mode,
                                                  const DistractorTables& tables,
                                                  const DerivationConfig& cfg) {
  cfg.check();
  const auto& images = c.images();
  std::vector<std::size_t> with_caption;
  std::vector<std::size_t> with_two;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!images[i].captions.empty()) with_caption.push_back(i);
    if (images[i].captions.size() >= 2) with_two.push_back(i);
  }
  if (with_caption.empty()) throw EmptyRecipeError("caption-caption: corpus has no captions");
  if (needs_negatives(cfg) && with_caption.size() < 2) {
    throw EmptyRecipeError("caption-caption: a single captioned image has no distractor");
  }
  if (needs_positives(cfg) && with_two.empty()) {
    throw EmptyRecipeError("caption-caption: no image has two captions");
  }
  const Distractors distractors(c, mode, tables);
  return generate(cfg, Recipe::kCaptionCaption, [&](Label label, Rng& rng) {
    if (label == Label::kPositive) {
      const ImageRecord& img = images[rng.pick(with_two)];
      const std::size_t a = rng.uniform_index(img.captions.size());
      std::size_t b = rng.uniform_index(img.captions.size() - 1);
      if (b >= a) ++b;
      return make_pair(side_of(img, img.captions[a]), side_of(img, img.captions[b]), label,
                       Recipe::kCaptionCaption, mode);
    }
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
      const std::size_t src = rng.pick(with_caption);
      const auto other = distractors.choose(src, rng, [&](std::size_t i) { return !images[i].captions.empty(); });
      if (!other) continue;
      const ImageRecord& img = images[src];
      const ImageRecord& dis = images[*other];
      return make_pair(side_of(img, rng.pick(img.captions)), side_of(dis, rng.pick(dis.captions)), label,
                       Recipe::kCaptionCaption, mode);
    }
    throw EmptyRecipeError("caption-caption: no distractor image found");
  });
}

std::vector<DerivedPair> make_rephrase_pairs(const Corpus& c, const DerivationConfig& cfg,
                                             const DistractorTables& tables) {
  cfg.check();
  struct Target {
    std::size_t image;
    std::vector<const ExpressionRecord*> refs;
  };
  const auto& images = c.images();
  std::vector<Target> targets;
  std::vector<std::vector<std::size_t>> targets_of(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::map<std::string, std::vector<const ExpressionRecord*>> by_entity;
    for (const auto& r : images[i].refexps) {
      if (r.target_entity_id) by_entity[*r.target_entity_id].push_back(&r);
    }
    for (auto& [id, refs] : by_entity) {
      targets_of[i].push_back(targets.size());
      targets.push_back(Target{i, std::move(refs)});
    }
  }
  std::vector<std::size_t> multi;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t].refs.size() >= 2) multi.push_back(t);
  }
  if (multi.empty()) throw EmptyRecipeError("rephrase: no entity has two referring expressions");
  std::size_t with_refs = 0;
  for (const auto& t : targets_of) with_refs += !t.empty();
  if (needs_negatives(cfg) && with_refs < 2) {
    throw EmptyRecipeError("rephrase: referring expressions come from a single image");
  }

  const Distractors distractors(c, cfg.distractor_mode, tables);
  return generate(cfg, Recipe::kRephrase, [&](Label label, Rng& rng) {
    if (label == Label::kPositive) {
      const Target& t = targets[rng.pick(multi)];
      const std::size_t a = rng.uniform_index(t.refs.size());
      std::size_t b = rng.uniform_index(t.refs.size() - 1);
      if (b >= a) ++b;
      const ImageRecord& img = images[t.image];
      return make_pair(side_of(img, *t.refs[a]), side_of(img, *t.refs[b]), label, Recipe::kRephrase,
                       cfg.distractor_mode);
    }
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
      // Anchors come from any entity with a refexp, not only multi ones.
      const Target& t = targets[rng.uniform_index(targets.size())];
      const ExpressionRecord& anchor = *rng.pick(t.refs);
      auto usable = [&](const Target& o) {
        return std::any_of(o.refs.begin(), o.refs.end(), [&](const auto* r) { return r->text != anchor.text; });
      };
      const auto other = distractors.choose(t.image, rng, [&](std::size_t i) {
        return std::any_of(targets_of[i].begin(), targets_of[i].end(),
                           [&](std::size_t k) { return usable(targets[k]); });
      });
      if (!other) continue;
      std::vector<std::size_t> options;
      for (std::size_t k : targets_of[*other]) {
        if (usable(targets[k])) options.push_back(k);
      }
      const Target& o = targets[rng.pick(options)];
      std::vector<const ExpressionRecord*> refs;
      for (const auto* r : o.refs) {
        if (r->text != anchor.text) refs.push_back(r);
      }
      return make_pair(side_of(images[t.image], anchor), side_of(images[o.image], *rng.pick(refs)), label,
                       Recipe::kRephrase, cfg.distractor_mode);
    }
    throw EmptyRecipeError("rephrase: no negative referring expression found");
  });
}

std::vector<DerivedPair> make_caption_expression_pairs(const Corpus& c, ExpressionItem kind,
                                                       const DerivationConfig& cfg,
                                                       const DistractorTables& tables) {
  cfg.check();
  const Recipe recipe = kind == ExpressionItem::kObject ? Recipe::kCaptionObject : Recipe::kCaptionRegion;
  const auto& images = c.images();

  // Candidate items per image, with their LFs.
  struct Item {
    PairSide side;
    LogicalForm lf;
  };
  std::vector<std::vector<Item>> items(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const ImageRecord& img = images[i];
    if (kind == ExpressionItem::kObject) {
      for (const auto& e : img.entities) {
        if (e.names.empty()) continue;
        const std::string sym = normalize_symbol(e.names.front());
        if (sym.empty()) continue;
        LogicalForm lf;
        lf.add_unary(sym, lf.declare("x"));
        items[i].push_back(Item{PairSide{"there is (a) " + e.names.front(), serialize_lf(lf), img.image_id,
                                         e.entity_id, "obj:" + e.entity_id},
                                std::move(lf)});
      }
    } else {
      for (const auto& r : img.regions) {
        if (!r.lf || r.text.empty()) continue;
        LogicalForm lf = parse_region_lf(*r.lf, &r).lf;
        items[i].push_back(Item{PairSide{r.text, serialize_lf(lf), img.image_id, std::nullopt, r.region_id},
                                std::move(lf)});
      }
    }
  }
  std::vector<std::size_t> anchors;
  std::size_t with_items = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    with_items += !items[i].empty();
    if (!images[i].captions.empty() && !items[i].empty()) anchors.push_back(i);
  }
  const char* what = kind == ExpressionItem::kObject ? "caption-object" : "caption-region";
  if (anchors.empty()) {
    throw EmptyRecipeError(std::string(what) + ": no image has both captions and " +
                           (kind == ExpressionItem::kObject ? "named entities" : "regions with LFs"));
  }
  if (needs_negatives(cfg) && with_items < 2) {
    throw EmptyRecipeError(std::string(what) + ": items come from a single image; no distractor");
  }

  const Distractors distractors(c, cfg.distractor_mode, tables);
  return generate(cfg, recipe, [&](Label label, Rng& rng) {
    if (label == Label::kPositive) {
      const std::size_t src = rng.pick(anchors);
      const ImageRecord& img = images[src];
      return make_pair(side_of(img, rng.pick(img.captions)), rng.pick(items[src]).side, label, recipe,
                       cfg.distractor_mode);
    }
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
      const std::size_t src = rng.pick(anchors);
      const ImageRecord& img = images[src];
      const ImageModel model = build_model(img, true);
      // Under exhaustivity the candidate must be refuted by the source model.
      auto refuted = [&](const Item& item) {
        return !cfg.exhaustive || evaluate(model, item.lf).value != Truth::kTrue;
      };
      const auto other = distractors.choose(src, rng, [&](std::size_t i) {
        return std::any_of(items[i].begin(), items[i].end(), refuted);
      });
      if (!other) continue;
      std::vector<const Item*> options;
      for (const auto& item : items[*other]) {
        if (refuted(item)) options.push_back(&item);
      }
      return make_pair(side_of(img, rng.pick(img.captions)), rng.pick(options)->side, label, recipe,
                       cfg.distractor_mode);
    }
    throw EmptyRecipeError(std::string(what) + ": no refutable distractor item found");
  });
}

std::vector<DerivedPair> make_caption_paragraph_pairs(const Corpus& c, const SemanticSpace& space,
                                                      const DerivationConfig& cfg) {
  return make_caption_paragraph_pairs(c, DistractorTables{nullptr, &space}, cfg);
}

std::vector<DerivedPair> make_caption_paragraph_pairs(const Corpus& c, const DistractorTables& tables,
                                                      const DerivationConfig& cfg) {
  cfg.check();
  const auto& images = c.images();
  std::vector<std::size_t> anchors;
  std::size_t with_paragraph = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    with_paragraph += !images[i].paragraphs.empty();
    if (!images[i].captions.empty() && !images[i].paragraphs.empty()) anchors.push_back(i);
  }
  if (anchors.empty()) throw EmptyRecipeError("caption-paragraph: no image has both a caption and a paragraph");
  if (needs_negatives(cfg) && with_paragraph < 2) {
    throw EmptyRecipeError("caption-paragraph: a single paragraph-bearing image has no distractor");
  }
  const Distractors distractors(c, cfg.distractor_mode, tables);
  return generate(cfg, Recipe::kCaptionParagraph, [&](Label label, Rng& rng) {
    const std::size_t src = rng.pick(anchors);
    const ImageRecord& img = images[src];
    const ExpressionRecord& caption = rng.pick(img.captions);
    if (label == Label::kPositive) {
      return make_pair(side_of(img, caption), side_of(img, rng.pick(img.paragraphs)), label,
                       Recipe::kCaptionParagraph, cfg.distractor_mode);
    }
    const auto other =
        distractors.choose(src, rng, [&](std::size_t i) { return !images[i].paragraphs.empty(); });
    if (!other) throw EmptyRecipeError("caption-paragraph: no distractor paragraph for '" + img.image_id + "'");
    const ImageRecord& dis = images[*other];
    return make_pair(side_of(img, caption), side_of(dis, rng.pick(dis.paragraphs)), label,
                     Recipe::kCaptionParagraph, cfg.distractor_mode);
  });
}

std::vector<DerivedPair> derive(const Corpus& c, Recipe recipe, const DerivationConfig& cfg,
                                const DistractorTables& tables) {
  switch (recipe) {
    case Recipe::kRephrase:
      return make_rephrase_pairs(c, cfg, tables);
    case Recipe::kCaptionCaption:
      return make_caption_distractors(c, cfg.distractor_mode, tables, cfg);
    case Recipe::kCaptionObject:
      return make_caption_expression_pairs(c, ExpressionItem::kObject, cfg, tables);
    case Recipe::kCaptionRegion:
      return make_caption_expression_pairs(c, ExpressionItem::kRegion, cfg, tables);
    case Recipe::kCaptionParagraph:
      return make_caption_paragraph_pairs(c, tables, cfg);
    case Recipe::kExistential:
      return make_existentials(c, cfg);
  }
  throw ContractError("unknown recipe");
}

}  // namespace semx
