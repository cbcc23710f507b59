// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "semx/corpus.h"

namespace semx {

struct StatsReport {
  std::size_t freq_threshold = 10;

  std::size_t n_images = 0;
  std::size_t n_entities = 0;
  std::size_t n_captions = 0;
  std::size_t n_refexps = 0;
  std::size_t n_regions = 0;
  std::size_t n_regions_with_lf = 0;
  std::size_t n_paragraphs = 0;

  // Word forms are normalized entity names and attributes.
  std::size_t word_form_types = 0;
  std::size_t word_form_types_frequent = 0;  // frequency >= freq_threshold
  std::size_t synset_types = 0;
  std::size_t synset_types_frequent = 0;
  std::size_t expression_token_types = 0;

  double mean_entities_per_image = 0;
  std::map<std::string, double> mean_tokens_per_kind;  // caption, refexp, region, paragraph
  double mean_refexps_per_target = 0;
  /// Regions whose LF has an argument grounded to >1 entity, over all regions.
  double plural_region_fraction = 0;

  bool operator==(const StatsReport&) const = default;
};

/// Aggregates per-image partial counts on up to `threads` workers; the result
/// does not depend on the partitioning or on image order.
StatsReport corpus_stats(const Corpus& c, std::size_t freq_threshold, unsigned threads = 1);

nlohmann::ordered_json to_json(const StatsReport& report);

}  // namespace semx
