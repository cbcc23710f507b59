// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semx/corpus.h"
#include "semx/logical_form.h"

namespace semx {

using EntitySet = std::set<std::string, std::less<>>;
using PairSet = std::set<std::pair<std::string, std::string>>;

/// Finite model <D, I> read off one annotated image.
///
/// Unary symbols: each normalized name (bare, e.g. "woman"), each attribute
/// as "attr:<a>", each synset verbatim. Argument types of region triples are
/// added as unary facts too. Binary symbols come from region triples whose
/// arguments are both grounded; a plural argument contributes every member.
///
/// With `exhaustive` set the annotation is taken as complete, so an
/// unannotated symbol has the empty extension. Without it, a symbol that never
/// occurs in the image has an unknown extension.
class ImageModel {
 public:
  ImageModel() = default;

  const std::string& image_id() const { return image_id_; }
  /// Sorted lexicographically; this is the assignment search order.
  const std::vector<std::string>& domain() const { return domain_; }
  bool exhaustive() const { return exhaustive_; }

  const std::map<std::string, EntitySet, std::less<>>& unary() const { return unary_; }
  const std::map<std::string, PairSet, std::less<>>& binary() const { return binary_; }

  /// True when `symbol` has an annotated extension in this image (unary or
  /// binary). "name:x" is accepted as an alias for the bare name "x".
  bool seen(std::string_view symbol) const;

  friend ImageModel build_model(const ImageRecord& img, bool exhaustive);
  friend ImageModel with_taxonomy(const ImageModel& m,
                                  const std::multimap<std::string, std::string>& ancestors);

 private:
  std::string image_id_;
  std::vector<std::string> domain_;
  std::map<std::string, EntitySet, std::less<>> unary_;
  std::map<std::string, PairSet, std::less<>> binary_;
  bool exhaustive_ = true;
};

ImageModel build_model(const ImageRecord& img, bool exhaustive);

/// child -> ancestor edges (transitively closed by with_taxonomy).
using Taxonomy = std::multimap<std::string, std::string>;

/// Reads TSV lines `child<TAB>ancestor`.
Taxonomy load_taxonomy(const std::filesystem::path& path);

/// Copy of `m` where every unary fact t(e) also yields ancestor(e) for each
/// (transitive) ancestor of t.
ImageModel with_taxonomy(const ImageModel& m, const Taxonomy& ancestors);

/// Result of interpret(): `known` is false for the open-world "unknown
/// extension" signal, in which case the sets are empty and meaningless.
struct Extension {
  bool known = true;
  EntitySet entities;
  PairSet pairs;
};

Extension interpret(const ImageModel& m, std::string_view symbol);

/// Three-valued truth, ordered false < unknown < true.
enum class Truth { kFalse = 0, kUnknown = 1, kTrue = 2 };

std::string_view to_string(Truth t);

struct TruthJudgement {
  Truth value = Truth::kFalse;
  /// Variable name -> entity id; present iff value is true.
  std::optional<std::map<std::string, std::string>> witness;
};

/// Evaluates a sentence (no free variables; ContractError otherwise) by
/// exhaustive search over assignments, variables in declaration order and
/// entities in domain order. Existence is Kleene max, conjunction Kleene min.
/// A counting quantifier `#v>=n` is true when at least n values make the
/// rest true, false when fewer than n can; `#v=n` is true when exactly n do
/// and none are undecided. The first witness found is returned.
TruthJudgement evaluate(const ImageModel& m, const LogicalForm& lf);

/// Entities e such that the formula with its single free variable bound to e
/// is true. A cardinality constraint on the free variable applies to the
/// resulting set as a whole (empty set if it fails). ContractError unless
/// exactly one variable is free.
EntitySet denotation(const ImageModel& m, const LogicalForm& lf);

}  // namespace semx
