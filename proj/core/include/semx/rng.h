// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace semx {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent stream identified by (seed, label, index).
std::uint64_t stream_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t index);

/// Seeded generator with portable sampling helpers. std:: distributions are
/// implementation-defined, so sampling is done here on top of the (fully
/// specified) mt19937_64 output to keep datasets byte-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  /// Uniform in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01();

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[uniform_index(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace semx
