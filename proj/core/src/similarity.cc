// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/similarity.h"

#include <algorithm>
#include <cmath>

#include "semx/error.h"
#include "semx/io.h"
#include "semx/rng.h"
#include "semx/text.h"

namespace semx {
namespace {

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double l2(std::span<const double> u) { return std::sqrt(dot(u, u)); }

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ContractError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()) + ")");
  }
  const double nu = l2(u);
  const double nv = l2(v);
  if (nu == 0 || nv == 0) throw DegenerateError("cosine of a zero vector is undefined");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

EmbeddingTable::EmbeddingTable(int dim) : dim_(dim) {
  if (dim < 1) throw ContractError("embedding dimension must be >= 1");
}

void EmbeddingTable::add(std::string id, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(dim_)) {
    throw ContractError("embedding '" + id + "' has " + std::to_string(values.size()) +
                        " components, expected " + std::to_string(dim_));
  }
  if (index_.count(id)) throw ContractError("duplicate embedding id '" + id + "'");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
  norms_.push_back(l2(values));
}

bool EmbeddingTable::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::row(std::size_t i) const {
  return std::span<const double>(data_).subspan(i * static_cast<std::size_t>(dim_),
                                                static_cast<std::size_t>(dim_));
}

std::span<const double> EmbeddingTable::vector(std::string_view id) const {
  auto i = index_of(id);
  if (!i) throw LookupError("no embedding for '" + std::string(id) + "'");
  return row(*i);
}

std::string serialize_embeddings(const EmbeddingTable& table) {
  std::string out = "dim=" + std::to_string(table.dim()) + "\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += table.ids()[i];
    out += '\t';
    const auto r = table.row(i);
    for (std::size_t d = 0; d < r.size(); ++d) {
      if (d) out += ' ';
      out += format_double(r[d]);
    }
    out += '\n';
  }
  return out;
}

EmbeddingTable parse_embeddings(std::string_view text) {
  std::size_t lineno = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++lineno;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || line.substr(0, 4) != "dim=") {
    throw ParseError("embeddings: first line must be 'dim=<d>'", 1, 0);
  }
  int dim = 0;
  try {
    dim = static_cast<int>(parse_double(line.substr(4)));
  } catch (const ParseError&) {
    throw ParseError("embeddings: bad dimension '" + std::string(line.substr(4)) + "'", 1, 4);
  }
  if (dim < 1) throw ParseError("embeddings: dimension must be >= 1", 1, 4);

  EmbeddingTable table(dim);
  std::vector<double> values;
  while (next_line(line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ParseError("embeddings line " + std::to_string(lineno) + ": expected id<TAB>values", lineno, 0);
    }
    values.clear();
    std::size_t p = tab + 1;
    while (p < line.size()) {
      while (p < line.size() && line[p] == ' ') ++p;
      if (p >= line.size()) break;
      auto q = line.find(' ', p);
      if (q == std::string_view::npos) q = line.size();
      try {
        values.push_back(parse_double(line.substr(p, q - p)));
      } catch (const ParseError&) {
        throw ParseError("embeddings line " + std::to_string(lineno) + ": bad number '" +
                             std::string(line.substr(p, q - p)) + "'",
                         lineno, p);
      }
      p = q;
    }
    if (values.size() != static_cast<std::size_t>(dim)) {
      throw ParseError("embeddings line " + std::to_string(lineno) + ": " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(dim),
                       lineno, tab + 1);
    }
    std::string id(line.substr(0, tab));
    if (table.contains(id)) {
      throw ParseError("embeddings line " + std::to_string(lineno) + ": duplicate id '" + id + "'", lineno, 0);
    }
    table.add(std::move(id), values);
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_file(path));
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  write_file_atomic(path, serialize_embeddings(table));
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, std::span<const double> query,
                                        std::size_t n, const std::set<std::string, std::less<>>& exclude) {
  if (query.size() != static_cast<std::size_t>(table.dim())) {
    throw ContractError("query has " + std::to_string(query.size()) + " components, table has " +
                        std::to_string(table.dim()));
  }
  const double qn = l2(query);
  if (qn == 0) throw DegenerateError("nearest_neighbors: zero query vector");

  std::vector<Neighbor> scored;
  scored.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.norm(i) == 0) continue;
    const std::string& id = table.ids()[i];
    if (exclude.count(id)) continue;
    const double s = std::clamp(dot(query, table.row(i)) / (qn * table.norm(i)), -1.0, 1.0);
    scored.push_back(Neighbor{id, s});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return scored;
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, std::string_view query_id,
                                        std::size_t n, const std::set<std::string, std::less<>>& exclude) {
  return nearest_neighbors(table, table.vector(query_id), n, exclude);
}

EmbeddingTable fixture_embeddings(const std::vector<std::pair<std::string, std::string>>& items, int dim,
                                  std::uint64_t seed) {
  if (dim < 2) throw ContractError("fixture embeddings need dim >= 2");
  EmbeddingTable table(dim);
  std::map<std::string, std::vector<double>> directions;
  auto direction = [&](const std::string& token) -> const std::vector<double>& {
    auto it = directions.find(token);
    if (it != directions.end()) return it->second;
    Rng rng(mix64(fnv1a(token) ^ seed));
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = rng.normal();
    const double n = l2(v);
    for (auto& x : v) x /= n;
    return directions.emplace(token, std::move(v)).first->second;
  };

  std::vector<double> sum(static_cast<std::size_t>(dim));
  for (const auto& [id, text] : items) {
    const auto tokens = tokenize(text);
    if (tokens.empty()) throw DegenerateError("fixture embeddings: '" + id + "' has no tokens");
    std::fill(sum.begin(), sum.end(), 0.0);
    for (const auto& t : tokens) {
      const auto& d = direction(t);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
    }
    const double n = l2(sum);
    if (n == 0) throw DegenerateError("fixture embeddings: '" + id + "' sums to zero");
    for (auto& x : sum) x /= n;
    table.add(id, sum);
  }
  return table;
}

std::set<std::string, std::less<>> image_types(const ImageRecord& img) {
  std::set<std::string, std::less<>> out;
  for (const auto& e : img.entities) {
    if (auto t = entity_type(e); !t.empty()) out.insert(std::move(t));
  }
  return out;
}

}  // namespace semx
