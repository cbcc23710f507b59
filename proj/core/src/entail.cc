// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/entail.h"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "semx/error.h"
#include "semx/parallel.h"
#include "semx/rng.h"
#include "semx/text.h"

namespace semx {
namespace {

/// expr_id -> owning image, over every caption in the corpus.
std::map<std::string, std::size_t, std::less<>> caption_owners(const Corpus& c) {
  std::map<std::string, std::size_t, std::less<>> out;
  for (std::size_t i = 0; i < c.images().size(); ++i) {
    for (const auto& cap : c.images()[i].captions) out.emplace(cap.expr_id, i);
  }
  return out;
}

ExemplarSet retrieve(std::string_view premise_id, const EmbeddingTable& table, const Corpus& c,
                     const std::map<std::string, std::size_t, std::less<>>& owners, std::size_t n) {
  if (n < 1) throw ContractError("retrieve_exemplars needs n >= 1");
  auto own = owners.find(premise_id);
  if (own == owners.end()) throw LookupError("premise '" + std::string(premise_id) + "' is not a caption");
  const auto query = table.vector(premise_id);
  const ImageRecord& premise_image = c.images()[own->second];

  std::set<std::string, std::less<>> exclude;
  for (const auto& cap : premise_image.captions) exclude.insert(cap.expr_id);

  ExemplarSet ex;
  ex.premise_id = std::string(premise_id);
  std::set<std::size_t> taken;
  for (const auto& nb : nearest_neighbors(table, query, table.size(), exclude)) {
    auto it = owners.find(nb.id);
    if (it == owners.end() || it->second == own->second) continue;
    if (!taken.insert(it->second).second) continue;
    const ImageRecord& img = c.images()[it->second];
    ex.image_ids.push_back(img.image_id);
    ex.models.push_back(build_model(img, true));
    ex.retrieval_scores.push_back(nb.score);
    if (ex.models.size() == n) break;
  }
  return ex;
}

}  // namespace

ExemplarSet retrieve_exemplars(std::string_view premise_expr_id, const EmbeddingTable& caption_table,
                               const Corpus& c, std::size_t n) {
  return retrieve(premise_expr_id, caption_table, c, caption_owners(c), n);
}

double exemplar_score(const ExemplarSet& ex, const LogicalForm& hyp, const Taxonomy* taxonomy) {
  if (ex.models.empty()) throw ContractError("exemplar set for '" + ex.premise_id + "' is empty");
  std::size_t k = 0;
  for (const auto& m : ex.models) {
    const Truth t = taxonomy ? evaluate(with_taxonomy(m, *taxonomy), hyp).value : evaluate(m, hyp).value;
    k += t == Truth::kTrue;
  }
  return static_cast<double>(k) / static_cast<double>(ex.models.size());
}

Prediction predict(double score, double tau) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw ContractError("score " + std::to_string(score) + " is outside [0, 1]");
  }
  return Prediction{score, score > tau, tau};
}

double baseline_token_overlap(std::string_view premise, std::string_view hypothesis) {
  const auto& stop = default_stopwords();
  const auto h = token_set(hypothesis, &stop);
  if (h.empty()) throw DegenerateError("hypothesis '" + std::string(hypothesis) + "' has no content tokens");
  const auto p = token_set(premise, &stop);
  std::size_t shared = 0;
  for (const auto& t : h) shared += p.count(t);
  return static_cast<double>(shared) / static_cast<double>(h.size());
}

double baseline_iou(std::string_view premise, std::string_view hypothesis) {
  const auto p = token_set(premise);
  const auto h = token_set(hypothesis);
  if (p.empty() && h.empty()) throw DegenerateError("iou of two empty token sets is undefined");
  std::size_t shared = 0;
  for (const auto& t : h) shared += p.count(t);
  return static_cast<double>(shared) / static_cast<double>(p.size() + h.size() - shared);
}

double baseline_embedding(std::string_view premise_id, std::string_view hypothesis_id,
                          const EmbeddingTable& table) {
  return cosine(table.vector(premise_id), table.vector(hypothesis_id));
}

Calibration calibrate_threshold(const std::vector<ScoredItem>& dev) {
  std::size_t positives = 0;
  for (const auto& it : dev) positives += it.label == Label::kPositive;
  if (positives == 0 || positives == dev.size()) {
    throw ContractError("threshold calibration needs both labels");
  }
  std::vector<double> scores;
  for (const auto& it : dev) scores.push_back(it.score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  std::vector<double> candidates{scores.front() - 1.0};
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) candidates.push_back((scores[i] + scores[i + 1]) / 2);
  candidates.push_back(scores.back());

  // Sweep in ascending order; a strict improvement is needed to move, so ties
  // keep the smallest tau.
  Calibration best{candidates.front(), -1.0};
  for (double tau : candidates) {
    std::size_t correct = 0;
    for (const auto& it : dev) correct += (it.score > tau) == (it.label == Label::kPositive);
    const double acc = static_cast<double>(correct) / static_cast<double>(dev.size());
    if (acc > best.accuracy) best = Calibration{tau, acc};
  }
  return best;
}

namespace {

constexpr std::pair<Predictor, std::string_view> kPredictors[] = {
    {Predictor::kExemplar, "exemplar"},
    {Predictor::kOverlap, "overlap"},
    {Predictor::kIou, "iou"},
    {Predictor::kEmbedding, "embedding"},
};

}  // namespace

std::string_view to_string(Predictor p) {
  for (const auto& [v, name] : kPredictors) {
    if (v == p) return name;
  }
  return "?";
}

Predictor predictor_from_string(std::string_view s) {
  for (const auto& [v, name] : kPredictors) {
    if (name == s) return v;
  }
  throw ConfigError("unknown predictor '" + std::string(s) + "'");
}

bool EvalReport::operator==(const EvalReport& o) const {
  if (predictor != o.predictor || accuracy != o.accuracy || n_items != o.n_items || config != o.config) return false;
  if (per_label.size() != o.per_label.size()) return false;
  for (const auto& [k, m] : per_label) {
    auto it = o.per_label.find(k);
    if (it == o.per_label.end() || it->second.precision != m.precision || it->second.recall != m.recall) {
      return false;
    }
  }
  return true;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["predictor"] = r.predictor;
  j["accuracy"] = r.accuracy;
  nlohmann::ordered_json precision;
  nlohmann::ordered_json recall;
  for (const auto& [label, m] : r.per_label) {
    precision[label] = m.precision;
    recall[label] = m.recall;
  }
  j["precision"] = precision;
  j["recall"] = recall;
  j["n_items"] = r.n_items;
  j["config"] = r.config;
  return j;
}

EvalReport score_decisions(const std::vector<DerivedPair>& items,
                           const std::function<bool(const DerivedPair&)>& decide, std::string predictor_name,
                           nlohmann::ordered_json config) {
  if (items.empty()) throw EmptyRecipeError("evaluation set is empty");
  // confusion[truth][decision]
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (const auto& item : items) {
    const bool truth = item.label == Label::kPositive;
    ++confusion[truth][decide(item)];
  }
  auto safe = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  EvalReport r;
  r.predictor = std::move(predictor_name);
  r.n_items = items.size();
  r.accuracy = safe(confusion[0][0] + confusion[1][1], items.size());
  r.per_label["positive"] = {safe(confusion[1][1], confusion[1][1] + confusion[0][1]),
                             safe(confusion[1][1], confusion[1][1] + confusion[1][0])};
  r.per_label["negative"] = {safe(confusion[0][0], confusion[0][0] + confusion[1][0]),
                             safe(confusion[0][0], confusion[0][0] + confusion[0][1])};
  r.config = std::move(config);
  return r;
}

EvalReport evaluate_accuracy(const std::vector<DerivedPair>& ds, Predictor predictor, const EvalConfig& cfg,
                             const EntailResources& res) {
  if (ds.empty()) throw EmptyRecipeError("evaluation set is empty");
  if (!(cfg.dev_split >= 0.0 && cfg.dev_split < 1.0)) throw ConfigError("dev_split must lie in [0, 1)");
  const std::size_t n = ds.size();

  nlohmann::ordered_json config;
  config["predictor"] = to_string(predictor);
  config["seed"] = cfg.seed;

  std::vector<double> scores(n);
  switch (predictor) {
    case Predictor::kExemplar: {
      if (!res.corpus || !res.captions) throw ContractError("exemplar predictor needs a corpus and caption embeddings");
      const auto owners = caption_owners(*res.corpus);
      parallel_for(n, cfg.threads, [&](std::size_t i) {
        const DerivedPair& p = ds[i];
        if (!p.candidate.lf) throw ContractError("pair " + std::to_string(i) + " has no hypothesis LF");
        const ExemplarSet ex = retrieve(p.anchor.text_id, *res.captions, *res.corpus, owners, cfg.n_exemplars);
        scores[i] = exemplar_score(ex, parse_lf(*p.candidate.lf), res.taxonomy);
      });
      config["n_exemplars"] = cfg.n_exemplars;
      config["tau"] = cfg.tau;
      config["taxonomy"] = res.taxonomy != nullptr;
      const double tau = cfg.tau;
      return score_decisions(
          ds, [&](const DerivedPair& p) { return scores[static_cast<std::size_t>(&p - ds.data())] > tau; },
          std::string(to_string(predictor)), std::move(config));
    }
    case Predictor::kOverlap:
    case Predictor::kIou:
    case Predictor::kEmbedding:
      if (predictor == Predictor::kEmbedding && !res.texts) {
        throw ContractError("embedding predictor needs a text embedding table");
      }
      parallel_for(n, cfg.threads, [&](std::size_t i) {
        const DerivedPair& p = ds[i];
        if (predictor == Predictor::kOverlap) {
          scores[i] = baseline_token_overlap(p.anchor.text, p.candidate.text);
        } else if (predictor == Predictor::kIou) {
          scores[i] = baseline_iou(p.anchor.text, p.candidate.text);
        } else {
          scores[i] = baseline_embedding(p.anchor.text_id, p.candidate.text_id, *res.texts);
        }
      });
      break;
  }

  // Baselines: calibrate on a seeded dev share, report over every item.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(stream_seed(cfg.seed, "dev-split", 0));
  rng.shuffle(order);
  const auto n_dev = static_cast<std::size_t>(std::llround(cfg.dev_split * static_cast<double>(n)));
  auto dev_items = [&](std::size_t count) {
    std::vector<ScoredItem> dev;
    for (std::size_t k = 0; k < count; ++k) dev.push_back(ScoredItem{scores[order[k]], ds[order[k]].label});
    return dev;
  };
  Calibration cal;
  std::size_t used = n_dev == 0 ? n : n_dev;
  try {
    cal = calibrate_threshold(dev_items(used));
  } catch (const ContractError&) {
    if (used == n) throw;
    spdlog::warn("dev share of {} item(s) holds a single label; calibrating on all {} items", used, n);
    used = n;
    cal = calibrate_threshold(dev_items(used));
  }
  config["dev_split"] = cfg.dev_split;
  config["n_dev"] = used;
  config["tau"] = cal.tau;
  config["dev_accuracy"] = cal.accuracy;
  return score_decisions(
      ds, [&](const DerivedPair& p) { return scores[static_cast<std::size_t>(&p - ds.data())] > cal.tau; },
      std::string(to_string(predictor)), std::move(config));
}

}  // namespace semx
