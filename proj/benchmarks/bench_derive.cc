// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "semx/derive.h"
#include "semx/fixture.h"
#include "semx/stats.h"

namespace {

const semx::Corpus& corpus() {
  static const semx::Corpus c = semx::generate_fixture_corpus(semx::default_fixture_config(3, 2000));
  return c;
}

void BM_GenerateFixture(benchmark::State& state) {
  const auto cfg = semx::default_fixture_config(3, 500);
  for (auto _ : state) benchmark::DoNotOptimize(semx::generate_fixture_corpus(cfg));
}
BENCHMARK(BM_GenerateFixture)->Unit(benchmark::kMillisecond);

void BM_CorpusStats(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(semx::corpus_stats(corpus(), 10, 1));
}
BENCHMARK(BM_CorpusStats)->Unit(benchmark::kMillisecond);

void BM_DeriveCaptionObject(benchmark::State& state) {
  semx::DerivationConfig cfg;
  cfg.n_pairs = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        semx::make_caption_expression_pairs(corpus(), semx::ExpressionItem::kObject, cfg));
  }
}
BENCHMARK(BM_DeriveCaptionObject)->Unit(benchmark::kMillisecond);

void BM_SerializeDataset(benchmark::State& state) {
  semx::DerivationConfig cfg;
  cfg.n_pairs = 1000;
  const semx::Dataset ds{semx::Recipe::kRephrase, cfg, semx::make_rephrase_pairs(corpus(), cfg)};
  for (auto _ : state) benchmark::DoNotOptimize(semx::serialize_dataset(ds));
}
BENCHMARK(BM_SerializeDataset)->Unit(benchmark::kMillisecond);

}  // namespace
