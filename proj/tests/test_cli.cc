// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.h"
#include "fixtures.h"
#include "semx/corpus.h"
#include "semx/derive.h"
#include "semx/io.h"
#include "semx/similarity.h"

namespace semx {
namespace {

using fixtures::TempDir;

struct Result {
  int code;
  std::string out;
};

Result semx(std::vector<std::string> args) {
  args.insert(args.begin(), "semx");
  args.insert(args.begin() + 1, {"--log-level", "warn"});
  std::ostringstream out;
  const int code = cli::run(args, out);
  return {code, out.str()};
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(semx({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(semx({"check", "--image", "x"}).code, cli::kExitUsage);
  EXPECT_EQ(semx({"--threads", "0", "stats", "--in", "x"}).code, cli::kExitUsage);
  EXPECT_EQ(semx({"derive", "no-such-recipe", "--corpus", "c", "--out", "o"}).code, cli::kExitUsage);
  EXPECT_EQ(semx({"derive", "existential", "--corpus", "c", "--balance", "1", "--out", "o"}).code, cli::kExitUsage);
  EXPECT_EQ(semx({"derive", "existential", "--corpus", "c", "--balance", "x", "--out", "o"}).code, cli::kExitUsage);
  TempDir dir;
  EXPECT_EQ(semx({"embed", "fixture", "--out", dir.file("e.tsv")}).code, cli::kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const Result r = semx({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("derive"), std::string::npos);
}

TEST(Cli, DataErrorsExitOne) {
  TempDir dir;
  EXPECT_EQ(semx({"stats", "--in", dir.file("missing.jsonl")}).code, cli::kExitDataError);
  write_file_atomic(dir.file("bad.jsonl"), "{\"image_id\": 3\n");
  EXPECT_EQ(semx({"stats", "--in", dir.file("bad.jsonl")}).code, cli::kExitDataError);
  EXPECT_EQ(semx({"check", "--corpus", fixtures::fig2_path().string(), "--image", "coco_fig2", "--lf", "woman(x"})
                .code,
            cli::kExitDataError);
}

TEST(Cli, ValidateReportsViolations) {
  TempDir dir;
  ImageRecord img = fixtures::abc_corpus().at("A");
  img.refexps.push_back(fixtures::refexp("A_r9", "ghost", "nobody"));
  write_file_atomic(dir.file("bad.jsonl"), serialize_corpus(Corpus({img})));
  const Result r = semx({"validate", "--in", dir.file("bad.jsonl")});
  EXPECT_EQ(r.code, cli::kExitDataError);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.at("violations").size(), 1u);
  EXPECT_EQ(j["violations"][0]["kind"], "dangling_reference");
  EXPECT_EQ(semx({"validate", "--in", fixtures::fig2_path().string()}).code, cli::kExitOk);
}

TEST(Cli, CheckFig2) {
  const std::string corpus = fixtures::fig2_path().string();
  auto check = [&](const std::string& lf, bool open) {
    std::vector<std::string> args{"check", "--corpus", corpus, "--image", "coco_fig2", "--lf", lf};
    if (open) args.push_back("--open-world");
    const Result r = semx(args);
    EXPECT_EQ(r.code, 0) << lf;
    return nlohmann::json::parse(r.out);
  };
  EXPECT_EQ(check("woman(x)?x", false)["denotation"], (nlohmann::json{"o_505664", "o_510191"}));
  EXPECT_EQ(check("there is a woman", false)["value"], "true");
  EXPECT_EQ(check("cow(x)", false)["value"], "false");
  EXPECT_EQ(check("cow(x)", true)["value"], "unknown");
}

TEST(Cli, PipelineIsDeterministicAcrossThreads) {
  TempDir dir;
  ASSERT_EQ(semx({"fixture", "--seed", "4", "--n-images", "60", "--out", dir.file("c.jsonl")}).code, 0);
  ASSERT_EQ(semx({"validate", "--in", dir.file("c.jsonl")}).code, 0);
  ASSERT_EQ(semx({"embed", "fixture", "--corpus", dir.file("c.jsonl"), "--images", "--dim", "16", "--out",
                  dir.file("img.tsv")})
                .code,
            0);
  for (const std::string recipe : {"rephrase", "caption-caption", "caption-object", "caption-region",
                                   "caption-paragraph", "existential"}) {
    for (const std::string mode : {"random", "visual", "semantic"}) {
      std::vector<std::string> base{"derive", recipe, "--corpus", dir.file("c.jsonl"), "--seed", "3",
                                    "--n", "120", "--distractor", mode, "--embeddings", dir.file("img.tsv")};
      auto one = base;
      one.insert(one.begin(), {"--threads", "1"});
      one.insert(one.end(), {"--out", dir.file("one.jsonl")});
      auto many = base;
      many.insert(many.begin(), {"--threads", "8"});
      many.insert(many.end(), {"--out", dir.file("many.jsonl")});
      ASSERT_EQ(semx(one).code, 0) << recipe << " " << mode;
      ASSERT_EQ(semx(many).code, 0) << recipe << " " << mode;
      EXPECT_EQ(read_file(dir.file("one.jsonl")), read_file(dir.file("many.jsonl"))) << recipe << " " << mode;
    }
  }
}

TEST(Cli, EntailEvalWritesReport) {
  TempDir dir;
  const std::string cfg_path = dir.file("cfg.json");
  write_file_atomic(cfg_path, to_json(fixtures::scene_fixture_config(2, 80)).dump());
  ASSERT_EQ(semx({"fixture", "--config", cfg_path, "--out", dir.file("c.jsonl")}).code, 0);
  ASSERT_EQ(semx({"derive", "caption-object", "--corpus", dir.file("c.jsonl"), "--n", "100", "--out",
                  dir.file("pairs.jsonl")})
                .code,
            0);
  ASSERT_EQ(semx({"embed", "fixture", "--corpus", dir.file("c.jsonl"), "--out", dir.file("cap.tsv")}).code, 0);
  ASSERT_EQ(semx({"entail", "eval", "--pairs", dir.file("pairs.jsonl"), "--corpus", dir.file("c.jsonl"),
                  "--caption-embeddings", dir.file("cap.tsv"), "--predictor", "exemplar", "--report",
                  dir.file("report.json")})
                .code,
            0);
  const auto report = nlohmann::json::parse(read_file(dir.file("report.json")));
  EXPECT_EQ(report["predictor"], "exemplar");
  EXPECT_EQ(report["n_items"], 100);
  EXPECT_GE(report["accuracy"].get<double>(), 0.95);

  ASSERT_EQ(semx({"embed", "fixture", "--pairs", dir.file("pairs.jsonl"), "--out", dir.file("text.tsv")}).code, 0);
  const Result emb = semx({"entail", "eval", "--pairs", dir.file("pairs.jsonl"), "--corpus", dir.file("c.jsonl"),
                           "--text-embeddings", dir.file("text.tsv"), "--predictor", "embedding"});
  EXPECT_EQ(emb.code, 0);
  EXPECT_EQ(nlohmann::json::parse(emb.out)["n_items"], 100);
  EXPECT_EQ(semx({"entail", "eval", "--pairs", dir.file("pairs.jsonl"), "--corpus", dir.file("c.jsonl"),
                  "--predictor", "exemplar"})
                .code,
            cli::kExitUsage);
}

TEST(Cli, ExternalTsvFeedsNearestNeighbours) {
  // Written the way an external encoder writes it.
  TempDir dir;
  write_file_atomic(dir.file("t.tsv"), "dim=2\nq\t1 0\na\t0.9 0.1\nb\t0 1\nc\t-1 0\n");
  const Result r = semx({"nn", "--table", dir.file("t.tsv"), "--query", "q", "--n", "2"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["id"], "a");
  EXPECT_EQ(j[1]["id"], "b");
  const auto self = nlohmann::json::parse(
      semx({"nn", "--table", dir.file("t.tsv"), "--query", "q", "--n", "1", "--include-self"}).out);
  EXPECT_EQ(self[0]["id"], "q");
  EXPECT_DOUBLE_EQ(self[0]["score"].get<double>(), 1.0);
  write_file_atomic(dir.file("bad.tsv"), "dim=2\nq\t1\n");
  EXPECT_EQ(semx({"nn", "--table", dir.file("bad.tsv"), "--query", "q"}).code, cli::kExitDataError);
}

TEST(Cli, EmbedTextsTsv) {
  TempDir dir;
  write_file_atomic(dir.file("texts.tsv"), "t1\ta red cup\nt2\ta red cup\nt3\ta dog\n");
  ASSERT_EQ(semx({"embed", "fixture", "--texts", dir.file("texts.tsv"), "--dim", "8", "--out", dir.file("e.tsv")})
                .code,
            0);
  const EmbeddingTable t = load_embeddings(dir.file("e.tsv"));
  EXPECT_EQ(t.dim(), 8);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_NEAR(cosine(t.vector("t1"), t.vector("t2")), 1.0, 1e-12);
}

TEST(Cli, IngestStatsAndMerge) {
  TempDir dir;
  write_file_atomic(dir.file("coco.json"), R"({
    "images": [{"id": 1, "width": 50, "height": 50}, {"id": 2, "width": 50, "height": 50}],
    "categories": [{"id": 3, "name": "cat"}],
    "annotations": [{"id": 10, "image_id": 1, "category_id": 3, "bbox": [0, 0, 5, 5]},
                    {"id": 11, "image_id": 1, "caption": "a cat"}]
  })");
  write_file_atomic(dir.file("vg.json"), R"([{"image_id": 99, "width": 50, "height": 50,
    "objects": [{"object_id": 7, "x": 1, "y": 1, "w": 3, "h": 3, "names": ["rug"]}],
    "paragraph": "A cat lies on a rug."}])");
  ASSERT_EQ(semx({"ingest", "--format", "coco", "--in", dir.file("coco.json"), "--out", dir.file("a.jsonl")}).code, 0);
  ASSERT_EQ(semx({"ingest", "--format", "vg", "--in", dir.file("vg.json"), "--out", dir.file("b.jsonl")}).code, 0);
  const Result stats = semx({"stats", "--in", dir.file("a.jsonl")});
  ASSERT_EQ(stats.code, 0);
  EXPECT_EQ(nlohmann::json::parse(stats.out)["n_images"], 2);
  write_file_atomic(dir.file("map.tsv"), "1\t99\n");
  ASSERT_EQ(semx({"merge", "--a", dir.file("a.jsonl"), "--b", dir.file("b.jsonl"), "--id-map", dir.file("map.tsv"),
                  "--out", dir.file("m.jsonl")})
                .code,
            0);
  const Corpus m = load_corpus(dir.file("m.jsonl"), CorpusFormat::kInterchange);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.images()[0].entities.size(), 2u);
  EXPECT_EQ(m.images()[0].paragraphs.size(), 1u);
}

}  // namespace
}  // namespace semx
