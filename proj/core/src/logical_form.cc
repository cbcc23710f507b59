// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/logical_form.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>

#include "semx/corpus.h"
#include "semx/error.h"
#include "semx/text.h"

namespace semx {

int LogicalForm::declare(std::string_view name) {
  if (auto i = find_var(name)) return *i;
  variables.emplace_back(name);
  return static_cast<int>(variables.size()) - 1;
}

std::optional<int> LogicalForm::find_var(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

LogicalForm& LogicalForm::add_unary(std::string symbol, int var) {
  atoms.push_back(Atom{std::move(symbol), {var}});
  return *this;
}

LogicalForm& LogicalForm::add_binary(std::string symbol, int subject, int object) {
  atoms.push_back(Atom{std::move(symbol), {subject, object}});
  return *this;
}

void LogicalForm::check() const {
  const int nvars = static_cast<int>(variables.size());
  if (atoms.empty()) throw ContractError("logical form has no atoms");
  std::vector<int> first_seen;
  for (const auto& a : atoms) {
    if (a.symbol.empty()) throw ContractError("atom with empty symbol");
    if (a.args.empty() || a.args.size() > 2) {
      throw ContractError("atom " + a.symbol + " must be unary or binary");
    }
    for (int v : a.args) {
      if (v < 0 || v >= nvars) throw ContractError("atom " + a.symbol + " uses undeclared variable");
      if (std::find(first_seen.begin(), first_seen.end(), v) == first_seen.end()) {
        first_seen.push_back(v);
      }
    }
  }
  // Variables are declared by first use, which is what keeps the text form
  // canonical.
  for (int i = 0; i < nvars; ++i) {
    if (i >= static_cast<int>(first_seen.size()) || first_seen[i] != i) {
      throw ContractError("variables must be declared in order of first use in atoms");
    }
  }
  std::vector<bool> constrained(nvars, false);
  for (const auto& c : cardinality) {
    if (c.var < 0 || c.var >= nvars) throw ContractError("cardinality on undeclared variable");
    if (c.n < 1) throw ContractError("cardinality bound must be >= 1");
    if (constrained[c.var]) {
      throw ContractError("more than one cardinality constraint on " + variables[c.var]);
    }
    constrained[c.var] = true;
  }
  for (std::size_t i = 0; i < free_vars.size(); ++i) {
    const int v = free_vars[i];
    if (v < 0 || v >= nvars) throw ContractError("free variable is undeclared");
    if (std::count(free_vars.begin(), free_vars.end(), v) > 1) {
      throw ContractError("free variable listed twice");
    }
  }
}

namespace {

bool is_symbol_char(char c) {
  if (std::isspace(static_cast<unsigned char>(c))) return false;
  switch (c) {
    case '(':
    case ')':
    case '&':
    case ',':
    case '#':
    case '?':
    case '"':
      return false;
    default:
      return true;
  }
}

bool is_var_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_var_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string symbol(std::string_view what, bool allow_colon = true) {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_symbol_char(text_[pos_]) &&
           (allow_colon || text_[pos_] != ':')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected " + std::string(what));
    return std::string(text_.substr(start, pos_ - start));
  }
  std::string variable() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= text_.size() || !is_var_start(text_[pos_])) fail("expected variable");
    while (pos_ < text_.size() && is_var_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  int integer() {
    skip_ws();
    int value = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }
  /// Raw text up to (not including) any of `stops`.
  std::string until(std::string_view stops) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && stops.find(text_[pos_]) == std::string_view::npos) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  std::size_t pos() const { return pos_; }

  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError(what + " at offset " + std::to_string(at), 1, at);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

LogicalForm parse_lf(std::string_view text) {
  Cursor cur(text);
  LogicalForm lf;
  do {
    const std::string sym = cur.symbol("predicate symbol");
    cur.expect('(');
    std::vector<int> args;
    std::vector<std::pair<int, std::string>> typed;
    do {
      const int v = lf.declare(cur.variable());
      args.push_back(v);
      if (cur.accept(':')) typed.emplace_back(v, cur.symbol("type symbol"));
    } while (cur.accept(','));
    if (args.size() > 2) cur.fail("atoms take one or two arguments");
    cur.expect(')');
    lf.atoms.push_back(Atom{sym, args});
    for (auto& [v, type] : typed) lf.add_unary(std::move(type), v);
  } while (cur.accept('&'));

  while (cur.accept('#')) {
    const std::size_t at = cur.pos();
    const std::string name = cur.variable();
    const auto v = lf.find_var(name);
    if (!v) cur.fail_at("cardinality on undeclared variable '" + name + "'", at);
    Comparator op;
    if (cur.accept(">=")) {
      op = Comparator::kAtLeast;
    } else if (cur.accept('=')) {
      op = Comparator::kExactly;
    } else {
      cur.fail("expected '>=' or '='");
    }
    const std::size_t nat = cur.pos();
    const int n = cur.integer();
    if (n < 1) cur.fail_at("cardinality bound must be >= 1", nat);
    for (const auto& c : lf.cardinality) {
      if (c.var == *v) cur.fail_at("second cardinality constraint on '" + name + "'", at);
    }
    lf.cardinality.push_back(Cardinality{*v, op, n});
  }

  if (cur.accept('?')) {
    do {
      const std::size_t at = cur.pos();
      const std::string name = cur.variable();
      const auto v = lf.find_var(name);
      if (!v) cur.fail_at("free variable '" + name + "' does not occur in any atom", at);
      if (std::find(lf.free_vars.begin(), lf.free_vars.end(), *v) != lf.free_vars.end()) {
        cur.fail_at("free variable '" + name + "' listed twice", at);
      }
      lf.free_vars.push_back(*v);
    } while (cur.accept(','));
  }
  if (!cur.at_end()) cur.fail("unexpected trailing input");
  return lf;
}

std::string serialize_lf(const LogicalForm& lf) {
  lf.check();
  std::string out;
  for (std::size_t i = 0; i < lf.atoms.size(); ++i) {
    if (i) out += '&';
    const auto& a = lf.atoms[i];
    out += a.symbol;
    out += '(';
    for (std::size_t j = 0; j < a.args.size(); ++j) {
      if (j) out += ',';
      out += lf.variables[a.args[j]];
    }
    out += ')';
  }
  for (const auto& c : lf.cardinality) {
    out += '#';
    out += lf.variables[c.var];
    out += c.op == Comparator::kAtLeast ? ">=" : "=";
    out += std::to_string(c.n);
  }
  if (!lf.free_vars.empty()) {
    out += '?';
    for (std::size_t i = 0; i < lf.free_vars.size(); ++i) {
      if (i) out += ',';
      out += lf.variables[lf.free_vars[i]];
    }
  }
  return out;
}

GroundedLf parse_region_lf(std::string_view text, const RegionRecord* grounding) {
  Cursor cur(text);
  GroundedLf out;
  cur.expect('"');
  out.surface = cur.until("\"");
  cur.expect('"');
  cur.expect(':');
  const std::string rel = cur.symbol("relation symbol");
  cur.expect('(');

  static constexpr std::string_view kVarNames[] = {"x", "y"};
  std::vector<std::pair<int, std::string>> typed;
  std::vector<int> args;
  do {
    if (args.size() == 2) cur.fail("relations take one or two arguments");
    cur.skip_ws();
    const std::size_t at = cur.pos();
    const std::string arg = trim(cur.until(",)"));
    if (arg.empty()) cur.fail_at("expected argument", at);
    const auto colon = arg.find(':');
    const std::string ids = trim(std::string_view(arg).substr(0, colon));
    std::string type = colon == std::string::npos ? "" : trim(std::string_view(arg).substr(colon + 1));
    if (colon != std::string::npos && type.empty()) cur.fail_at("empty argument type", at);

    std::vector<std::string> group;
    std::size_t start = 0;
    while (start <= ids.size()) {
      const auto plus = ids.find('+', start);
      std::string id = trim(std::string_view(ids).substr(start, plus == std::string::npos ? std::string::npos : plus - start));
      if (id.empty()) cur.fail_at("empty entity id", at);
      if (grounding) {
        const auto& known = grounding->grounded_entities;
        if (std::find(known.begin(), known.end(), id) == known.end()) {
          throw GroundingError("entity '" + id + "' is not grounded in region '" +
                               grounding->region_id + "'");
        }
      }
      group.push_back(std::move(id));
      if (plus == std::string::npos) break;
      start = plus + 1;
    }
    const int v = out.lf.declare(kVarNames[args.size()]);
    args.push_back(v);
    if (group.size() > 1) out.lf.cardinality.push_back(Cardinality{v, Comparator::kAtLeast, 2});
    out.arguments.push_back(std::move(group));
    if (!type.empty()) typed.emplace_back(v, std::move(type));
  } while (cur.accept(','));
  cur.expect(')');
  if (!cur.at_end()) cur.fail("unexpected trailing input");

  out.lf.atoms.push_back(Atom{rel, args});
  for (auto& [v, type] : typed) out.lf.add_unary(std::move(type), v);
  // Cardinality was pushed in argument order; keep it sorted by variable.
  std::sort(out.lf.cardinality.begin(), out.lf.cardinality.end(),
            [](const Cardinality& a, const Cardinality& b) { return a.var < b.var; });
  return out;
}

LogicalForm parse_existential(std::string_view text) {
  std::vector<std::string> words;
  {
    std::string w;
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!w.empty()) words.push_back(std::move(w));
        w.clear();
      } else {
        w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
      }
    }
    if (!w.empty()) words.push_back(std::move(w));
  }
  if (!words.empty()) {
    auto& last = words.back();
    while (!last.empty() && (last.back() == '.' || last.back() == '!')) last.pop_back();
    if (last.empty()) words.pop_back();
  }
  if (words.size() < 2 || words[0] != "there") {
    throw ParseError("existential frame must start with 'there is' or 'there are'", 1, 0);
  }
  const bool plural_verb = words[1] == "are";
  if (words[1] != "is" && words[1] != "are" && words[1] != "is/are") {
    throw ParseError("expected 'is' or 'are' after 'there'", 1, 6);
  }
  std::size_t i = 2;
  std::optional<Cardinality> card;
  if (i < words.size()) {
    const std::string& q = words[i];
    if (q == "a" || q == "an" || q == "(a)" || q == "some") {
      ++i;
    } else if (q == "several" || q == "many") {
      card = Cardinality{0, Comparator::kAtLeast, 3};
      ++i;
    } else if (int n = numeral_value(q); n > 0) {
      card = Cardinality{0, Comparator::kExactly, n};
      ++i;
    }
  }
  if (!card && plural_verb) card = Cardinality{0, Comparator::kAtLeast, 2};
  if (i >= words.size()) throw ParseError("existential frame has no noun phrase", 1, text.size());

  LogicalForm lf;
  const int x = lf.declare("x");
  lf.add_unary(normalize_symbol(words.back()), x);
  for (std::size_t j = i; j + 1 < words.size(); ++j) lf.add_unary("attr:" + normalize_symbol(words[j]), x);
  if (card) lf.cardinality.push_back(*card);
  return lf;
}

LogicalForm parse_annotation(std::string_view text, const RegionRecord* grounding) {
  std::size_t b = 0;
  while (b < text.size() && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  const std::string_view rest = text.substr(b);
  if (!rest.empty() && rest.front() == '"') return parse_region_lf(rest, grounding).lf;
  if (rest.size() > 6 && (rest.substr(0, 6) == "there " || rest.substr(0, 6) == "There ")) {
    return parse_existential(rest);
  }
  return parse_lf(rest);
}

}  // namespace semx
