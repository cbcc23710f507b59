// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <utility>
#include <vector>

#include <benchmark/benchmark.h>

#include "semx/rng.h"
#include "semx/similarity.h"

namespace {

using Rows = std::vector<std::pair<std::string, std::set<std::string, std::less<>>>>;

Rows random_rows(int n_rows, int n_types, double density) {
  semx::Rng rng(5);
  Rows rows;
  for (int r = 0; r < n_rows; ++r) {
    std::set<std::string, std::less<>> s{"t0"};
    for (int t = 1; t < n_types; ++t) {
      if (rng.bernoulli(density)) s.insert("t" + std::to_string(t));
    }
    rows.emplace_back("r" + std::to_string(r), std::move(s));
  }
  return rows;
}

semx::EmbeddingTable random_table(std::size_t n, int dim) {
  semx::Rng rng(9);
  semx::EmbeddingTable t(dim);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = rng.normal();
    t.add("v" + std::to_string(i), v);
  }
  return t;
}

void BM_SemanticSpaceDense(benchmark::State& state) {
  const Rows rows = random_rows(static_cast<int>(state.range(0)), 80, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(semx::build_semantic_space_from_rows(rows, 16, 1));
}
BENCHMARK(BM_SemanticSpaceDense)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SemanticSpaceRandomized(benchmark::State& state) {
  const Rows rows = random_rows(5000, 1000, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(semx::build_semantic_space_from_rows(rows, 16, 1));
}
BENCHMARK(BM_SemanticSpaceRandomized)->Unit(benchmark::kMillisecond);

void BM_NearestNeighbors(benchmark::State& state) {
  const auto table = random_table(static_cast<std::size_t>(state.range(0)), 128);
  const auto query = table.row(0);
  std::vector<double> q(query.begin(), query.end());
  for (auto _ : state) benchmark::DoNotOptimize(semx::nearest_neighbors(table, q, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NearestNeighbors)->Arg(1000)->Arg(100000);

void BM_FixtureEmbeddings(benchmark::State& state) {
  std::vector<std::pair<std::string, std::string>> items;
  for (int i = 0; i < 1000; ++i) {
    items.emplace_back("c" + std::to_string(i), "a man riding a wave on top of surfboard " + std::to_string(i % 50));
  }
  for (auto _ : state) benchmark::DoNotOptimize(semx::fixture_embeddings(items, 64, 1));
}
BENCHMARK(BM_FixtureEmbeddings)->Unit(benchmark::kMillisecond);

}  // namespace
