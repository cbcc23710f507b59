// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semx/corpus.h"

namespace semx {

/// Cosine similarity in [-1, 1]. Throws ContractError on a dimension
/// mismatch and DegenerateError if either vector is zero.
double cosine(std::span<const double> u, std::span<const double> v);

/// id -> dense vector, all of one dimension. Keeps insertion order, which is
/// also the row order of the TSV form.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 1);

  int dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Throws ContractError on wrong length or duplicate id.
  void add(std::string id, std::span<const double> values);

  bool contains(std::string_view id) const;
  /// Throws LookupError.
  std::span<const double> vector(std::string_view id) const;
  std::span<const double> row(std::size_t i) const;
  double norm(std::size_t i) const { return norms_[i]; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  bool operator==(const EmbeddingTable& other) const {
    return dim_ == other.dim_ && ids_ == other.ids_ && data_ == other.data_;
  }

 private:
  int dim_;
  std::vector<std::string> ids_;
  std::vector<double> data_;
  std::vector<double> norms_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// TSV: first line `dim=<d>`, then `id<TAB>c1 c2 ... cd` per row.
std::string serialize_embeddings(const EmbeddingTable& table);
EmbeddingTable parse_embeddings(std::string_view text);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);

struct Neighbor {
  std::string id;
  double score = 0;

  bool operator==(const Neighbor&) const = default;
};

/// Top-n rows by descending cosine to `query`, skipping ids in `exclude` and
/// zero rows. Ties go to the lexicographically smaller id.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        std::span<const double> query, std::size_t n,
                                        const std::set<std::string, std::less<>>& exclude = {});

/// Same, querying by the vector stored under `query_id` (LookupError if
/// missing). The query itself is not excluded unless listed.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        std::string_view query_id, std::size_t n,
                                        const std::set<std::string, std::less<>>& exclude = {});

/// Deterministic stand-in for a text encoder: each token maps to a
/// hash-seeded Gaussian direction, and an item is the normalized sum of its
/// token directions. Token overlap therefore raises expected cosine.
/// `items` are (id, text) pairs. Throws ContractError if dim < 2 and
/// DegenerateError if an item has no tokens.
EmbeddingTable fixture_embeddings(const std::vector<std::pair<std::string, std::string>>& items,
                                  int dim, std::uint64_t seed);

/// Image rows x object-type columns, binary presence, projected onto the top
/// singular directions.
class SemanticSpace {
 public:
  const std::map<std::string, std::size_t, std::less<>>& type_index() const { return type_index_; }
  const std::map<std::string, std::size_t, std::less<>>& image_index() const { return image_index_; }
  /// image_id -> projected vector of length rank().
  const EmbeddingTable& projected() const { return projected_; }
  int k() const { return k_; }
  int rank() const { return static_cast<int>(singular_values_.size()); }
  const std::vector<double>& singular_values() const { return singular_values_; }

  /// Projects a many-hot row over type_index() (unknown types are ignored).
  std::vector<double> project(const std::set<std::string, std::less<>>& types) const;

  friend SemanticSpace build_semantic_space(const Corpus& c, int k, std::uint64_t seed);
  friend SemanticSpace build_semantic_space_from_rows(
      const std::vector<std::pair<std::string, std::set<std::string, std::less<>>>>& rows, int k,
      std::uint64_t seed);

 private:
  std::map<std::string, std::size_t, std::less<>> type_index_;
  std::map<std::string, std::size_t, std::less<>> image_index_;
  EmbeddingTable projected_;
  int k_ = 1;
  std::vector<double> singular_values_;
  std::vector<double> right_vectors_;  // types x rank, row-major
};

/// k <= 0 selects the default min(64, #types). Keeps min(k, rank)
/// components. Small problems use a dense SVD; large ones with k well below
/// the matrix size use a seeded randomized range finder. Singular vector
/// signs are fixed so the largest-magnitude entry of each right vector is
/// positive. Throws DegenerateError on an all-zero matrix.
SemanticSpace build_semantic_space(const Corpus& c, int k, std::uint64_t seed);

/// Same, over explicit (row id, type set) pairs.
SemanticSpace build_semantic_space_from_rows(
    const std::vector<std::pair<std::string, std::set<std::string, std::less<>>>>& rows, int k,
    std::uint64_t seed);

/// Cosine of projected vectors. LookupError on unknown ids.
double semantic_similarity(const SemanticSpace& s, std::string_view a, std::string_view b);

/// Set of entity_type() values in an image.
std::set<std::string, std::less<>> image_types(const ImageRecord& img);

}  // namespace semx
