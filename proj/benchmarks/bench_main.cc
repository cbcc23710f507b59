// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
