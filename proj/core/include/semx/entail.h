// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "semx/corpus.h"
#include "semx/derive.h"
#include "semx/model.h"
#include "semx/similarity.h"

namespace semx {

inline constexpr double kDefaultTau = 0.2;
inline constexpr std::size_t kDefaultExemplars = 10;

/// Models of images whose captions lie nearest the premise caption.
struct ExemplarSet {
  std::string premise_id;
  std::vector<std::string> image_ids;
  std::vector<ImageModel> models;
  std::vector<double> retrieval_scores;  // best caption score per image
};

/// Ranks captions in `caption_table` by cosine to the premise caption,
/// dropping every caption of the premise's own image and table ids that are
/// not captions in `c`, then keeps the first `n` distinct images. Models are
/// exhaustive. LookupError if the premise is not in the table or corpus.
ExemplarSet retrieve_exemplars(std::string_view premise_expr_id, const EmbeddingTable& caption_table,
                               const Corpus& c, std::size_t n);

/// Fraction of exemplar models in which `hyp` evaluates true. With a
/// taxonomy, models are first widened with ancestor types. ContractError on
/// an empty set.
double exemplar_score(const ExemplarSet& ex, const LogicalForm& hyp,
                      const Taxonomy* taxonomy = nullptr);

struct Prediction {
  double score = 0;
  bool decision = false;
  double threshold = kDefaultTau;
};

/// decision = score > tau. ContractError if score is outside [0, 1].
Prediction predict(double score, double tau = kDefaultTau);

/// |tokens(p) & tokens(h)| / |tokens(h)| over token sets with stopwords
/// removed. Asymmetric. DegenerateError if h has no content tokens.
double baseline_token_overlap(std::string_view premise, std::string_view hypothesis);

/// Jaccard index of the two token sets. Symmetric. DegenerateError if both
/// are empty.
double baseline_iou(std::string_view premise, std::string_view hypothesis);

/// Cosine of the two stored vectors. LookupError on a missing id.
double baseline_embedding(std::string_view premise_id, std::string_view hypothesis_id,
                          const EmbeddingTable& table);

struct ScoredItem {
  double score = 0;
  Label label = Label::kNegative;
};

struct Calibration {
  double tau = 0;
  double accuracy = 0;
};

/// Sweeps tau over one value below every score, the midpoints of adjacent
/// distinct scores, and the maximum score; returns the most accurate, the
/// smallest tau on ties. ContractError unless both labels occur.
Calibration calibrate_threshold(const std::vector<ScoredItem>& dev);

enum class Predictor { kExemplar, kOverlap, kIou, kEmbedding };

std::string_view to_string(Predictor p);
Predictor predictor_from_string(std::string_view s);

struct EvalConfig {
  std::size_t n_exemplars = kDefaultExemplars;
  double tau = kDefaultTau;  // exemplar predictor only
  double dev_split = 0.1;    // baselines calibrate on this share
  std::uint64_t seed = 0;    // dev/test split
  unsigned threads = 1;
};

struct LabelMetrics {
  double precision = 0;
  double recall = 0;
};

struct EvalReport {
  std::string predictor;
  double accuracy = 0;
  std::map<std::string, LabelMetrics> per_label;  // "positive", "negative"
  std::size_t n_items = 0;
  nlohmann::ordered_json config;

  bool operator==(const EvalReport& o) const;
};

nlohmann::ordered_json to_json(const EvalReport& r);

/// Scores decisions of an arbitrary predictor over `items`. EmptyRecipeError
/// on an empty set.
EvalReport score_decisions(const std::vector<DerivedPair>& items,
                           const std::function<bool(const DerivedPair&)>& decide,
                           std::string predictor_name, nlohmann::ordered_json config);

/// Resources the predictors draw on. `captions` is required by the exemplar
/// predictor; `texts` (keyed by PairSide::text_id) by the embedding one.
struct EntailResources {
  const Corpus* corpus = nullptr;
  const EmbeddingTable* captions = nullptr;
  const EmbeddingTable* texts = nullptr;
  const Taxonomy* taxonomy = nullptr;
};

/// Full evaluation over every item of `ds`. Baseline thresholds are
/// calibrated on a `dev_split` share drawn with `cfg.seed` (the whole set
/// when the share is 0 or holds one label only). The exemplar predictor uses
/// the fixed `cfg.tau`; its hypotheses come from the candidate LF.
EvalReport evaluate_accuracy(const std::vector<DerivedPair>& ds, Predictor predictor,
                             const EvalConfig& cfg, const EntailResources& res);

}  // namespace semx
