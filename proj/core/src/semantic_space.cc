// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include "semx/error.h"
#include "semx/rng.h"
#include "semx/similarity.h"

namespace semx {
namespace {

using Rows = std::vector<std::pair<std::string, std::set<std::string, std::less<>>>>;

// Dense SVD cost grows with the full matrix; beyond this many cells a
// truncated randomized factorization is used when k is small.
constexpr double kDenseCellLimit = 4.0e6;
constexpr int kOversample = 10;
constexpr int kPowerIterations = 2;

struct Factors {
  Eigen::VectorXd values;
  Eigen::MatrixXd right;  // columns are right singular vectors
};

Factors dense_svd(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixV()};
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

Factors randomized_svd(const Eigen::MatrixXd& m, int k, std::uint64_t seed) {
  const Eigen::Index l = std::min<Eigen::Index>(k + kOversample, std::min(m.rows(), m.cols()));
  Rng rng(stream_seed(seed, "semantic-space", 0));
  Eigen::MatrixXd omega(m.cols(), l);
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < m.cols(); ++i) omega(i, j) = rng.normal();
  }
  Eigen::MatrixXd q = orthonormal_basis(m * omega);
  for (int it = 0; it < kPowerIterations; ++it) {
    const Eigen::MatrixXd z = orthonormal_basis(m.transpose() * q);
    q = orthonormal_basis(m * z);
  }
  const Eigen::MatrixXd b = q.transpose() * m;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixV()};
}

}  // namespace

SemanticSpace build_semantic_space_from_rows(const Rows& rows_in, int k, std::uint64_t seed) {
  Rows rows = rows_in;
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  SemanticSpace s;
  std::set<std::string, std::less<>> all_types;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!s.image_index_.emplace(rows[i].first, i).second) {
      throw ContractError("semantic space: duplicate row id '" + rows[i].first + "'");
    }
    all_types.insert(rows[i].second.begin(), rows[i].second.end());
  }
  for (const auto& t : all_types) s.type_index_.emplace(t, s.type_index_.size());
  if (rows.empty() || all_types.empty()) throw DegenerateError("semantic space: matrix is all zero");

  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_types = static_cast<Eigen::Index>(all_types.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_rows, n_types);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    for (const auto& t : rows[static_cast<std::size_t>(i)].second) m(i, static_cast<Eigen::Index>(s.type_index_.at(t))) = 1.0;
  }

  const int max_rank = static_cast<int>(std::min(n_rows, n_types));
  s.k_ = k <= 0 ? std::min(64, static_cast<int>(n_types)) : k;
  const int want = std::min(s.k_, max_rank);
  const bool randomized = static_cast<double>(n_rows) * static_cast<double>(n_types) > kDenseCellLimit &&
                          want * 4 < max_rank;
  const Factors f = randomized ? randomized_svd(m, want, seed) : dense_svd(m);
  spdlog::debug("semantic space: {}x{} matrix, {} svd", n_rows, n_types, randomized ? "randomized" : "dense");

  const double top = f.values.size() ? f.values(0) : 0.0;
  const double tol = top * static_cast<double>(std::max(n_rows, n_types)) * std::numeric_limits<double>::epsilon();
  int rank = 0;
  while (rank < f.values.size() && f.values(rank) > tol) ++rank;
  const int keep = std::min(want, rank);

  Eigen::MatrixXd v = f.right.leftCols(keep);
  for (int c = 0; c < keep; ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0) v.col(c) = -v.col(c);
  }
  s.singular_values_.assign(f.values.data(), f.values.data() + keep);
  s.right_vectors_.resize(static_cast<std::size_t>(n_types * keep));
  for (Eigen::Index t = 0; t < n_types; ++t) {
    for (int c = 0; c < keep; ++c) s.right_vectors_[static_cast<std::size_t>(t * keep + c)] = v(t, c);
  }

  const Eigen::MatrixXd projected = m * v;
  s.projected_ = EmbeddingTable(std::max(keep, 1));
  std::vector<double> buf(static_cast<std::size_t>(std::max(keep, 1)));
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int c = 0; c < keep; ++c) buf[static_cast<std::size_t>(c)] = projected(i, c);
    s.projected_.add(rows[static_cast<std::size_t>(i)].first, buf);
  }
  return s;
}

std::vector<double> SemanticSpace::project(const std::set<std::string, std::less<>>& types) const {
  const int r = rank();
  std::vector<double> out(static_cast<std::size_t>(std::max(r, 1)), 0.0);
  for (const auto& t : types) {
    auto it = type_index_.find(t);
    if (it == type_index_.end()) continue;
    for (int c = 0; c < r; ++c) out[static_cast<std::size_t>(c)] += right_vectors_[it->second * r + c];
  }
  return out;
}

SemanticSpace build_semantic_space(const Corpus& c, int k, std::uint64_t seed) {
  Rows rows;
  rows.reserve(c.size());
  for (const auto& img : c.images()) rows.emplace_back(img.image_id, image_types(img));
  return build_semantic_space_from_rows(rows, k, seed);
}

double semantic_similarity(const SemanticSpace& s, std::string_view a, std::string_view b) {
  return cosine(s.projected().vector(a), s.projected().vector(b));
}

}  // namespace semx
