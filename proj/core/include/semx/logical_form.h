// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semx {

struct RegionRecord;

/// pred(var) or rel(var, var). Variables are indices into
/// LogicalForm::variables.
struct Atom {
  std::string symbol;
  std::vector<int> args;  // size 1 (unary) or 2 (binary)

  bool binary() const { return args.size() == 2; }
  bool operator==(const Atom&) const = default;
};

enum class Comparator { kAtLeast, kExactly };

struct Cardinality {
  int var = 0;
  Comparator op = Comparator::kAtLeast;
  int n = 1;

  bool operator==(const Cardinality&) const = default;
};

/// Existentially closed conjunction of atoms. Variables are quantified in
/// declaration order; a variable with a Cardinality constraint takes a
/// counting quantifier instead of plain existence. Free variables are left
/// open and are bound by the caller (see denotation()).
struct LogicalForm {
  std::vector<std::string> variables;
  std::vector<Atom> atoms;
  std::vector<Cardinality> cardinality;
  std::vector<int> free_vars;

  /// Index of `name`, declaring it if new.
  int declare(std::string_view name);
  std::optional<int> find_var(std::string_view name) const;

  LogicalForm& add_unary(std::string symbol, int var);
  LogicalForm& add_binary(std::string symbol, int subject, int object);

  /// Throws ContractError on undeclared variables, n < 1, or malformed atoms.
  void check() const;

  bool operator==(const LogicalForm&) const = default;
};

/// Text syntax:
///   lf    := atom ('&' atom)* ('#' var ('>='|'=') int)* ['?' var (',' var)*]
///   atom  := SYMBOL '(' arg [',' arg] ')'
///   arg   := VAR [':' SYMBOL]
/// A typed argument `x:cup` contributes the extra unary atom cup(x), placed
/// after the atom that carries it. Whitespace around tokens is ignored.
/// Throws ParseError with the byte offset of the problem.
LogicalForm parse_lf(std::string_view text);

/// Canonical form: untyped atoms joined by '&', then cardinality, then free
/// variables. parse_lf(serialize_lf(lf)) == lf.
std::string serialize_lf(const LogicalForm& lf);

/// A region-graph triple with its grounding: entity ids per variable.
struct GroundedLf {
  LogicalForm lf;
  std::string surface;
  std::vector<std::vector<std::string>> arguments;  // parallel to lf.variables
};

/// Parses `"surface":REL(id:TYPE, id:TYPE)` into REL(x,y) & TYPE1(x) &
/// TYPE2(y). A '+'-joined id group marks a plural argument and adds
/// `#v>=2`. When `grounding` is given, every id must be one of its
/// grounded_entities (GroundingError otherwise).
GroundedLf parse_region_lf(std::string_view text, const RegionRecord* grounding);

/// Parses the existential frame "there is|are [a|an|(a)|NUM|several|many]
/// ATTR* NAME", e.g. "there is a brown window" -> window(x) & attr:brown(x).
/// Numerals give `#x=n`, "several"/"many" give `#x>=3`, and "there are"
/// without a quantifier gives `#x>=2`.
LogicalForm parse_existential(std::string_view text);

/// Dispatches on syntax: a leading '"' is a region triple, a leading
/// "there " is an existential frame, anything else is LF text.
LogicalForm parse_annotation(std::string_view text, const RegionRecord* grounding);

}  // namespace semx
