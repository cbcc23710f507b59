// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cli.h"

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "semx/corpus.h"
#include "semx/derive.h"
#include "semx/entail.h"
#include "semx/error.h"
#include "semx/fixture.h"
#include "semx/io.h"
#include "semx/logical_form.h"
#include "semx/model.h"
#include "semx/similarity.h"
#include "semx/stats.h"

namespace semx::cli {
namespace {

using ojson = nlohmann::ordered_json;

const std::vector<std::string> kFormats = {"jsonl", "coco", "vg"};
const std::vector<std::string> kModes = {"random", "visual", "semantic"};
const std::vector<std::string> kRecipes = {"rephrase",      "caption-caption",   "caption-object",
                                           "caption-region", "caption-paragraph", "existential"};
const std::vector<std::string> kPredictors = {"exemplar", "overlap", "iou", "embedding"};
const std::vector<std::string> kLevels = {"trace", "debug", "info", "warn", "error", "critical", "off"};

void emit(const ojson& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

Corpus parse_unvalidated(const std::string& path, const std::string& format) {
  const std::string text = read_file(path);
  switch (corpus_format_from_string(format)) {
    case CorpusFormat::kInterchange:
      return parse_interchange(text);
    case CorpusFormat::kCocoLike:
      return parse_coco_like(text);
    case CorpusFormat::kVgLike:
      return parse_vg_like(text);
  }
  throw UsageError("unknown format " + format);
}

/// Reads `id<TAB>text` lines.
std::vector<std::pair<std::string, std::string>> read_texts(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> items;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(path + " line " + std::to_string(lineno) + ": expected id<TAB>text", lineno, 0);
    }
    items.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return items;
}

/// Ordered id -> text collection that rejects conflicting duplicates.
class TextSet {
 public:
  void add(const std::string& id, const std::string& text) {
    auto [it, inserted] = index_.emplace(id, text);
    if (inserted) {
      items_.emplace_back(id, text);
    } else if (it->second != text) {
      throw Error("id '" + id + "' is given two different texts");
    }
  }
  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

 private:
  std::map<std::string, std::string> index_;
  std::vector<std::pair<std::string, std::string>> items_;
};

void setup_logging(const std::string& level, bool explicit_level) {
  auto logger = std::make_shared<spdlog::logger>("semx", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  logger->set_pattern("[%l] %v");
  std::string resolved = level;
  if (!explicit_level) {
    if (const char* env = std::getenv("SEMX_LOG"); env && *env) resolved = env;
  }
  if (std::find(kLevels.begin(), kLevels.end(), resolved) == kLevels.end()) {
    throw UsageError("unknown log level '" + resolved + "'");
  }
  logger->set_level(spdlog::level::from_str(resolved));
  spdlog::set_default_logger(std::move(logger));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Annotated images as finite semantic models", "semx"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  unsigned threads = 1;
  std::string log_level = "info";
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  auto* log_opt = app.add_option("--log-level", log_level, "Log level (or SEMX_LOG)")->check(CLI::IsMember(kLevels));

  // ingest
  std::string in_path, out_path, format = "jsonl";
  auto* ingest = app.add_subcommand("ingest", "Load an upstream corpus, validate it, write interchange JSONL");
  ingest->add_option("--format", format)->required()->check(CLI::IsMember(kFormats));
  ingest->add_option("--in", in_path)->required();
  ingest->add_option("--out", out_path)->required();

  // validate
  auto* validate = app.add_subcommand("validate", "List corpus invariant violations");
  validate->add_option("--in", in_path)->required();
  validate->add_option("--format", format)->check(CLI::IsMember(kFormats));

  // stats
  std::size_t freq_threshold = 10;
  auto* stats = app.add_subcommand("stats", "Corpus statistics report");
  stats->add_option("--in", in_path)->required();
  stats->add_option("--format", format)->check(CLI::IsMember(kFormats));
  stats->add_option("--freq-threshold", freq_threshold);
  stats->add_option("--out", out_path);

  // fixture
  std::uint64_t seed = 0;
  int n_images = 10;
  std::string config_path;
  auto* fixture = app.add_subcommand("fixture", "Generate a synthetic corpus");
  auto* fixture_seed = fixture->add_option("--seed", seed);
  auto* fixture_n = fixture->add_option("--n-images", n_images)->check(CLI::PositiveNumber);
  fixture->add_option("--config", config_path, "JSON fixture configuration");
  fixture->add_option("--out", out_path)->required();

  // embed fixture
  int dim = 64;
  std::string texts_path, corpus_path, pairs_path;
  bool image_rows = false;
  auto* embed = app.add_subcommand("embed", "Build embedding tables");
  embed->require_subcommand(1);
  auto* embed_fixture = embed->add_subcommand("fixture", "Deterministic hash embeddings");
  embed_fixture->add_option("--dim", dim)->check(CLI::Range(2, 1 << 16));
  embed_fixture->add_option("--seed", seed);
  embed_fixture->add_option("--texts", texts_path, "TSV of id<TAB>text");
  embed_fixture->add_option("--corpus", corpus_path, "Embed every expression of a corpus");
  embed_fixture->add_option("--pairs", pairs_path, "Embed both sides of a derived dataset");
  embed_fixture->add_flag("--images", image_rows, "With --corpus: one row per image from its captions");
  embed_fixture->add_option("--out", out_path)->required();

  // nn
  std::string table_path, query;
  std::size_t n_neighbors = 10;
  bool include_self = false;
  auto* nn = app.add_subcommand("nn", "Nearest neighbours in an embedding table");
  nn->add_option("--table", table_path)->required();
  nn->add_option("--query", query)->required();
  nn->add_option("--n", n_neighbors)->check(CLI::PositiveNumber);
  nn->add_flag("--include-self", include_self);
  nn->add_option("--out", out_path);

  // check
  std::string image_id, lf_text;
  bool open_world = false;
  auto* check = app.add_subcommand("check", "Evaluate an LF against one image model");
  check->add_option("--corpus", corpus_path)->required();
  check->add_option("--format", format)->check(CLI::IsMember(kFormats));
  check->add_option("--image", image_id)->required();
  check->add_option("--lf", lf_text)->required();
  check->add_flag("--open-world", open_world);
  check->add_option("--out", out_path);

  // derive
  std::string recipe_name, mode_name = "random", embeddings_path;
  std::size_t n_pairs = 100;
  double balance = 0.5;
  int k = 0;
  auto* derive_cmd = app.add_subcommand("derive", "Derive a labelled pair dataset");
  derive_cmd->add_option("recipe", recipe_name)->required()->check(CLI::IsMember(kRecipes));
  derive_cmd->add_option("--corpus", corpus_path)->required();
  derive_cmd->add_option("--format", format)->check(CLI::IsMember(kFormats));
  derive_cmd->add_option("--seed", seed);
  derive_cmd->add_option("--n", n_pairs)->check(CLI::PositiveNumber);
  derive_cmd->add_option("--distractor", mode_name)->check(CLI::IsMember(kModes));
  derive_cmd->add_option("--embeddings", embeddings_path, "Image embedding table for visual distractors");
  derive_cmd->add_option("--balance", balance, "Positive fraction, strictly between 0 and 1")
      ->check(CLI::Range(0.0, 1.0))
      ->check(CLI::Validator(
          [](std::string& v) -> std::string {
            const double b = std::stod(v);
            return b > 0 && b < 1 ? "" : "balance must lie in (0, 1)";
          },
          "FLOAT in (0 - 1)"));
  derive_cmd->add_option("--k", k, "Semantic space dimensionality (0 = default)");
  derive_cmd->add_flag("--open-world", open_world, "Do not require negatives to be refuted");
  derive_cmd->add_option("--out", out_path)->required();

  // entail eval
  std::string captions_path, text_embeddings_path, taxonomy_path, report_path, predictor_name = "exemplar";
  std::size_t n_exemplars = kDefaultExemplars;
  double tau = kDefaultTau;
  double dev_split = 0.1;
  auto* entail = app.add_subcommand("entail", "Entailment prediction");
  entail->require_subcommand(1);
  auto* eval = entail->add_subcommand("eval", "Evaluate a predictor on a derived dataset");
  eval->add_option("--pairs", pairs_path)->required();
  eval->add_option("--corpus", corpus_path)->required();
  eval->add_option("--format", format)->check(CLI::IsMember(kFormats));
  eval->add_option("--caption-embeddings", captions_path);
  eval->add_option("--text-embeddings", text_embeddings_path, "Table keyed by pair text ids (embedding predictor)");
  eval->add_option("--predictor", predictor_name)->check(CLI::IsMember(kPredictors));
  eval->add_option("--n-exemplars", n_exemplars)->check(CLI::PositiveNumber);
  eval->add_option("--tau", tau)->check(CLI::Range(0.0, 1.0));
  eval->add_option("--taxonomy", taxonomy_path);
  eval->add_option("--dev-split", dev_split)->check(CLI::Range(0.0, 0.99));
  eval->add_option("--seed", seed);
  eval->add_option("--report", report_path);

  // merge
  std::string a_path, b_path, id_map_path;
  auto* merge = app.add_subcommand("merge", "Intersect two corpora through an id map");
  merge->add_option("--a", a_path)->required();
  merge->add_option("--b", b_path)->required();
  merge->add_option("--id-map", id_map_path, "TSV of a_id<TAB>b_id")->required();
  merge->add_option("--out", out_path)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> storage(args.begin(), args.end());
  if (storage.empty()) storage.emplace_back("semx");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "semx: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    setup_logging(log_level, log_opt->count() > 0);

    if (*ingest) {
      spdlog::info("ingest: format={} in={} out={}", format, in_path, out_path);
      const Corpus c = load_corpus(in_path, corpus_format_from_string(format));
      write_corpus(out_path, c);
      spdlog::info("ingest: wrote {} image(s)", c.size());
      return kExitOk;
    }

    if (*validate) {
      const ValidationReport report = validate_corpus(parse_unvalidated(in_path, format));
      emit(to_json(report), "", out);
      if (!report.ok()) spdlog::error("validate: {} violation(s)", report.violations.size());
      return report.ok() ? kExitOk : kExitDataError;
    }

    if (*stats) {
      spdlog::info("stats: in={} freq_threshold={} threads={}", in_path, freq_threshold, threads);
      const Corpus c = load_corpus(in_path, corpus_format_from_string(format));
      emit(to_json(corpus_stats(c, freq_threshold, threads)), out_path, out);
      return kExitOk;
    }

    if (*fixture) {
      FixtureConfig cfg = default_fixture_config(seed, n_images);
      if (!config_path.empty()) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(read_file(config_path));
        } catch (const nlohmann::json::parse_error& e) {
          throw ParseError(config_path + ": " + e.what(), 0, e.byte);
        }
        cfg = fixture_config_from_json(j);
        if (fixture_seed->count()) cfg.seed = seed;
        if (fixture_n->count()) cfg.n_images = n_images;
      }
      spdlog::debug("fixture: {}", to_json(cfg).dump());
      const Corpus c = generate_fixture_corpus(cfg);
      write_corpus(out_path, c);
      spdlog::info("fixture: wrote {} image(s) to {}", c.size(), out_path);
      return kExitOk;
    }

    if (*embed_fixture) {
      if (texts_path.empty() && corpus_path.empty() && pairs_path.empty()) {
        throw UsageError("embed fixture needs --texts, --corpus or --pairs");
      }
      if (image_rows && corpus_path.empty()) throw UsageError("--images needs --corpus");
      TextSet texts;
      if (!texts_path.empty()) {
        for (const auto& [id, text] : read_texts(texts_path)) texts.add(id, text);
      }
      if (!corpus_path.empty()) {
        const Corpus c = load_corpus(corpus_path, corpus_format_from_string(format));
        for (const auto& img : c.images()) {
          if (image_rows) {
            std::string joined;
            for (const auto& cap : img.captions) joined += cap.text + "\n";
            if (joined.empty()) {
              for (const auto& e : img.entities) {
                if (!e.names.empty()) joined += e.names.front() + " ";
              }
            }
            if (joined.empty()) {
              spdlog::warn("embed: image {} has no captions or names; skipped", img.image_id);
              continue;
            }
            texts.add(img.image_id, joined);
            continue;
          }
          for (const auto& e : img.captions) texts.add(e.expr_id, e.text);
          for (const auto& e : img.refexps) texts.add(e.expr_id, e.text);
          for (const auto& r : img.regions) {
            if (!r.text.empty()) texts.add(r.region_id, r.text);
          }
          for (const auto& e : img.paragraphs) texts.add(e.expr_id, e.text);
        }
      }
      if (!pairs_path.empty()) {
        for (const auto& p : read_dataset(pairs_path).pairs) {
          texts.add(p.anchor.text_id, p.anchor.text);
          texts.add(p.candidate.text_id, p.candidate.text);
        }
      }
      spdlog::info("embed fixture: dim={} seed={} items={}", dim, seed, texts.items().size());
      write_embeddings(out_path, fixture_embeddings(texts.items(), dim, seed));
      return kExitOk;
    }

    if (*nn) {
      const EmbeddingTable table = load_embeddings(table_path);
      std::set<std::string, std::less<>> exclude;
      if (!include_self) exclude.insert(query);
      ojson j = ojson::array();
      for (const auto& nb : nearest_neighbors(table, std::string_view(query), n_neighbors, exclude)) {
        j.push_back({{"id", nb.id}, {"score", nb.score}});
      }
      emit(j, out_path, out);
      return kExitOk;
    }

    if (*check) {
      const Corpus c = load_corpus(corpus_path, corpus_format_from_string(format));
      const ImageModel m = build_model(c.at(image_id), !open_world);
      const LogicalForm lf = parse_annotation(lf_text, nullptr);
      ojson j;
      j["image_id"] = image_id;
      j["lf"] = serialize_lf(lf);
      j["exhaustive"] = !open_world;
      if (lf.free_vars.empty()) {
        const TruthJudgement t = evaluate(m, lf);
        j["value"] = to_string(t.value);
        j["witness"] = t.witness ? ojson(*t.witness) : ojson(nullptr);
      } else {
        const EntitySet d = denotation(m, lf);
        j["denotation"] = std::vector<std::string>(d.begin(), d.end());
      }
      emit(j, out_path, out);
      return kExitOk;
    }

    if (*derive_cmd) {
      const Corpus c = load_corpus(corpus_path, corpus_format_from_string(format));
      DerivationConfig cfg;
      cfg.seed = seed;
      cfg.n_pairs = n_pairs;
      cfg.balance = balance;
      cfg.distractor_mode = distractor_mode_from_string(mode_name);
      cfg.exhaustive = !open_world;
      cfg.threads = threads;
      cfg.check();
      const Recipe recipe = recipe_from_string(recipe_name);
      spdlog::info("derive: recipe={} seed={} n={} balance={} distractor={} exhaustive={} threads={}", recipe_name,
                   cfg.seed, cfg.n_pairs, cfg.balance, mode_name, cfg.exhaustive, cfg.threads);

      std::optional<EmbeddingTable> visual;
      std::optional<SemanticSpace> space;
      DistractorTables tables;
      if (cfg.distractor_mode == DistractorMode::kVisual) {
        if (embeddings_path.empty()) throw UsageError("--distractor visual needs --embeddings");
        visual = load_embeddings(embeddings_path);
        tables.visual = &*visual;
      }
      if (cfg.distractor_mode == DistractorMode::kSemantic) {
        space = build_semantic_space(c, k, seed);
        tables.semantic = &*space;
      }
      Dataset ds{recipe, cfg, derive(c, recipe, cfg, tables)};
      write_dataset(out_path, ds);
      spdlog::info("derive: wrote {} pair(s) to {}", ds.pairs.size(), out_path);
      return kExitOk;
    }

    if (*eval) {
      const Predictor predictor = predictor_from_string(predictor_name);
      const Dataset ds = read_dataset(pairs_path);
      const Corpus c = load_corpus(corpus_path, corpus_format_from_string(format));
      std::optional<EmbeddingTable> captions;
      std::optional<EmbeddingTable> texts;
      std::optional<Taxonomy> taxonomy;
      EntailResources res;
      res.corpus = &c;
      if (predictor == Predictor::kExemplar) {
        if (captions_path.empty()) throw UsageError("--predictor exemplar needs --caption-embeddings");
        captions = load_embeddings(captions_path);
        res.captions = &*captions;
      }
      if (predictor == Predictor::kEmbedding) {
        const std::string& path = text_embeddings_path.empty() ? captions_path : text_embeddings_path;
        if (path.empty()) throw UsageError("--predictor embedding needs --text-embeddings");
        texts = load_embeddings(path);
        res.texts = &*texts;
      }
      if (!taxonomy_path.empty()) {
        taxonomy = load_taxonomy(taxonomy_path);
        res.taxonomy = &*taxonomy;
      }
      EvalConfig cfg;
      cfg.n_exemplars = n_exemplars;
      cfg.tau = tau;
      cfg.dev_split = dev_split;
      cfg.seed = seed;
      cfg.threads = threads;
      spdlog::info("entail eval: predictor={} n_exemplars={} tau={} dev_split={} seed={} items={}", predictor_name,
                   n_exemplars, tau, dev_split, seed, ds.pairs.size());
      const EvalReport report = evaluate_accuracy(ds.pairs, predictor, cfg, res);
      emit(to_json(report), report_path, out);
      spdlog::info("entail eval: accuracy={:.4f} over {} item(s)", report.accuracy, report.n_items);
      return kExitOk;
    }

    if (*merge) {
      const Corpus a = load_corpus(a_path, CorpusFormat::kInterchange);
      const Corpus b = load_corpus(b_path, CorpusFormat::kInterchange);
      const Corpus merged = intersect_corpora(a, b, load_id_map(id_map_path));
      const ValidationReport report = validate_corpus(merged);
      if (!report.ok()) {
        throw ValidationError("merged corpus is invalid: " + report.violations.front().message, {});
      }
      write_corpus(out_path, merged);
      spdlog::info("merge: {} image(s) in common", merged.size());
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "semx: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "semx: " << e.what() << "\n";
    for (const auto& o : e.offenders()) std::cerr << "  " << o << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "semx: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace semx::cli
