// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/stats.h"

#include <set>

#include "semx/logical_form.h"
#include "semx/parallel.h"
#include "semx/text.h"

namespace semx {
namespace {

constexpr const char* kKinds[] = {"caption", "refexp", "region", "paragraph"};

// Everything is an integer count so merging partials is exact and order-free.
struct Partial {
  std::size_t images = 0;
  std::size_t entities = 0;
  std::size_t captions = 0;
  std::size_t refexps = 0;
  std::size_t regions = 0;
  std::size_t regions_with_lf = 0;
  std::size_t plural_regions = 0;
  std::size_t paragraphs = 0;
  std::map<std::string, std::size_t> word_forms;
  std::map<std::string, std::size_t> synsets;
  std::set<std::string> tokens;
  std::map<std::string, std::size_t> kind_tokens;
  std::set<std::pair<std::string, std::string>> targets;  // (image, entity)

  void add_text(const char* kind, std::string_view text) {
    auto toks = tokenize(text);
    kind_tokens[kind] += toks.size();
    for (auto& t : toks) tokens.insert(std::move(t));
  }

  void merge(Partial&& o) {
    images += o.images;
    entities += o.entities;
    captions += o.captions;
    refexps += o.refexps;
    regions += o.regions;
    regions_with_lf += o.regions_with_lf;
    plural_regions += o.plural_regions;
    paragraphs += o.paragraphs;
    for (const auto& [k, v] : o.word_forms) word_forms[k] += v;
    for (const auto& [k, v] : o.synsets) synsets[k] += v;
    tokens.merge(o.tokens);
    for (const auto& [k, v] : o.kind_tokens) kind_tokens[k] += v;
    targets.merge(o.targets);
  }
};

void count_image(const ImageRecord& img, Partial& p) {
  ++p.images;
  p.entities += img.entities.size();
  for (const auto& e : img.entities) {
    // One count per entity for each distinct form it carries.
    std::set<std::string> forms;
    for (const auto& n : e.names) forms.insert(normalize_symbol(n));
    for (const auto& a : e.attributes) forms.insert(normalize_symbol(a));
    forms.erase("");
    for (const auto& f : forms) ++p.word_forms[f];
    for (const auto& s : std::set<std::string>(e.synsets.begin(), e.synsets.end())) ++p.synsets[s];
  }
  for (const auto& c : img.captions) {
    ++p.captions;
    p.add_text("caption", c.text);
  }
  for (const auto& r : img.refexps) {
    ++p.refexps;
    p.add_text("refexp", r.text);
    if (r.target_entity_id) p.targets.emplace(img.image_id, *r.target_entity_id);
  }
  for (const auto& r : img.regions) {
    ++p.regions;
    p.add_text("region", r.text);
    if (!r.lf) continue;
    ++p.regions_with_lf;
    const GroundedLf g = parse_region_lf(*r.lf, nullptr);
    for (const auto& arg : g.arguments) {
      if (arg.size() > 1) {
        ++p.plural_regions;
        break;
      }
    }
  }
  for (const auto& par : img.paragraphs) {
    ++p.paragraphs;
    p.add_text("paragraph", par.text);
  }
}

double ratio(std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; }

}  // namespace

StatsReport corpus_stats(const Corpus& c, std::size_t freq_threshold, unsigned threads) {
  const auto& images = c.images();
  threads = std::max(1u, threads);
  std::vector<Partial> partials(threads);
  const std::size_t chunk = (images.size() + threads - 1) / threads;
  parallel_for(threads, threads, [&](std::size_t t) {
    const std::size_t end = std::min(images.size(), (t + 1) * chunk);
    for (std::size_t i = t * chunk; i < end; ++i) count_image(images[i], partials[t]);
  });
  Partial total;
  for (auto& p : partials) total.merge(std::move(p));

  StatsReport r;
  r.freq_threshold = freq_threshold;
  r.n_images = total.images;
  r.n_entities = total.entities;
  r.n_captions = total.captions;
  r.n_refexps = total.refexps;
  r.n_regions = total.regions;
  r.n_regions_with_lf = total.regions_with_lf;
  r.n_paragraphs = total.paragraphs;
  r.word_form_types = total.word_forms.size();
  for (const auto& [form, n] : total.word_forms) r.word_form_types_frequent += n >= freq_threshold;
  r.synset_types = total.synsets.size();
  for (const auto& [s, n] : total.synsets) r.synset_types_frequent += n >= freq_threshold;
  r.expression_token_types = total.tokens.size();
  r.mean_entities_per_image = ratio(total.entities, total.images);
  const std::size_t counts[] = {total.captions, total.refexps, total.regions, total.paragraphs};
  for (std::size_t k = 0; k < std::size(kKinds); ++k) {
    r.mean_tokens_per_kind[kKinds[k]] = ratio(total.kind_tokens[kKinds[k]], counts[k]);
  }
  r.mean_refexps_per_target = ratio(total.refexps, total.targets.size());
  r.plural_region_fraction = ratio(total.plural_regions, total.regions);
  return r;
}

nlohmann::ordered_json to_json(const StatsReport& r) {
  nlohmann::ordered_json j;
  j["freq_threshold"] = r.freq_threshold;
  j["n_images"] = r.n_images;
  j["n_entities"] = r.n_entities;
  j["n_captions"] = r.n_captions;
  j["n_refexps"] = r.n_refexps;
  j["n_regions"] = r.n_regions;
  j["n_regions_with_lf"] = r.n_regions_with_lf;
  j["n_paragraphs"] = r.n_paragraphs;
  j["word_form_types"] = r.word_form_types;
  j["word_form_types_frequent"] = r.word_form_types_frequent;
  j["synset_types"] = r.synset_types;
  j["synset_types_frequent"] = r.synset_types_frequent;
  j["expression_token_types"] = r.expression_token_types;
  j["mean_entities_per_image"] = r.mean_entities_per_image;
  j["mean_tokens_per_kind"] = r.mean_tokens_per_kind;
  j["mean_refexps_per_target"] = r.mean_refexps_per_target;
  j["plural_region_fraction"] = r.plural_region_fraction;
  return j;
}

}  // namespace semx
