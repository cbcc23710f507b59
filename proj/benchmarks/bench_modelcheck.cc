// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include <benchmark/benchmark.h>

#include "semx/fixture.h"
#include "semx/logical_form.h"
#include "semx/model.h"

namespace {

// One image with `n` entities cycling over four types, all on one table.
semx::ImageRecord crowded_image(int n) {
  semx::ImageRecord img;
  img.image_id = "bench";
  img.width = img.height = 1000;
  const char* types[] = {"cup", "plate", "fork", "table"};
  for (int i = 0; i < n; ++i) {
    semx::EntityRecord e;
    e.entity_id = "e" + std::to_string(i);
    e.bbox = {1, 1, 10, 10};
    e.names = {types[i % 4]};
    e.synsets = {std::string(types[i % 4]) + ".n.01"};
    img.entities.push_back(e);
  }
  for (int i = 0; i + 3 < n; i += 4) {
    semx::RegionRecord r;
    r.region_id = "r" + std::to_string(i);
    r.bbox = {0, 0, 100, 100};
    r.text = "a cup on a table";
    r.lf = "\"on\":on.r.01(e" + std::to_string(i) + ":cup.n.01, e" + std::to_string(i + 3) + ":table.n.01)";
    r.grounded_entities = {"e" + std::to_string(i), "e" + std::to_string(i + 3)};
    img.regions.push_back(r);
  }
  return img;
}

void BM_BuildModel(benchmark::State& state) {
  const auto img = crowded_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(semx::build_model(img, true));
}
BENCHMARK(BM_BuildModel)->Arg(8)->Arg(64)->Arg(512);

void BM_EvaluateExistential(benchmark::State& state) {
  const auto m = semx::build_model(crowded_image(static_cast<int>(state.range(0))), true);
  const auto lf = semx::parse_lf("on.r.01(x,y)&cup(x)&table(y)");
  for (auto _ : state) benchmark::DoNotOptimize(semx::evaluate(m, lf));
}
BENCHMARK(BM_EvaluateExistential)->Arg(8)->Arg(64)->Arg(512);

// Exact counts must scan every binding, so this is the slow path.
void BM_EvaluateExactCount(benchmark::State& state) {
  const auto m = semx::build_model(crowded_image(static_cast<int>(state.range(0))), true);
  const auto lf = semx::parse_lf("on.r.01(x,y)&cup(x)&table(y)#x=2");
  for (auto _ : state) benchmark::DoNotOptimize(semx::evaluate(m, lf));
}
BENCHMARK(BM_EvaluateExactCount)->Arg(8)->Arg(64)->Arg(256);

void BM_Denotation(benchmark::State& state) {
  const auto m = semx::build_model(crowded_image(static_cast<int>(state.range(0))), true);
  const auto lf = semx::parse_lf("on.r.01(x,y)&table(y)?x");
  for (auto _ : state) benchmark::DoNotOptimize(semx::denotation(m, lf));
}
BENCHMARK(BM_Denotation)->Arg(8)->Arg(64)->Arg(256);

void BM_ParseLf(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(semx::parse_lf("woman(x) & wear.v.01(x, y:shirt) & attr:white(y) #x=2 ?x"));
  }
}
BENCHMARK(BM_ParseLf);

}  // namespace
