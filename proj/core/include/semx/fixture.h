// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "semx/corpus.h"

namespace semx {

struct VocabEntry {
  std::string type;                     // noun, used as name; synset is "<type>.n.01"
  std::vector<std::string> attributes;  // pool sampled per entity
  bool seedable = true;                 // may be drawn as an image's seed type
};

/// Synthetic corpus settings. Each image draws seed types, then closes over
/// `cooccurrence`: for every present type a and entry (a, b) -> p, type b is
/// added with probability p (one draw per pair per image).
struct FixtureConfig {
  std::uint64_t seed = 1;
  int n_images = 10;
  std::vector<VocabEntry> vocab;
  std::map<std::pair<std::string, std::string>, double> cooccurrence;

  int min_seed_types = 1;
  int max_seed_types = 2;
  int max_instances_per_type = 2;
  /// Types never named in captions or paragraphs (still annotated).
  std::set<std::string> silent_types;

  int captions_per_image = 2;
  int refexps_per_entity = 2;
  int regions_per_image = 3;
  bool paragraphs = true;
  int width = 640;
  int height = 480;
};

/// Small built-in household/outdoor vocabulary with a few co-occurrences.
FixtureConfig default_fixture_config(std::uint64_t seed, int n_images);

FixtureConfig fixture_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const FixtureConfig& cfg);

/// Pure function of `cfg`. Throws ConfigError on an empty vocabulary, a
/// probability outside [0, 1], n_images < 1, or no seedable type.
Corpus generate_fixture_corpus(const FixtureConfig& cfg);

}  // namespace semx
