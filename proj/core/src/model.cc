// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "semx/model.h"

#include <algorithm>
#include <sstream>

#include "semx/error.h"
#include "semx/io.h"
#include "semx/text.h"

namespace semx {
namespace {

constexpr std::string_view kNamePrefix = "name:";

std::string_view strip_name_alias(std::string_view symbol) {
  if (symbol.substr(0, kNamePrefix.size()) == kNamePrefix) return symbol.substr(kNamePrefix.size());
  return symbol;
}

Truth kleene_min(Truth a, Truth b) { return a < b ? a : b; }

}  // namespace

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::kTrue:
      return "true";
    case Truth::kFalse:
      return "false";
    case Truth::kUnknown:
      return "unknown";
  }
  return "unknown";
}

bool ImageModel::seen(std::string_view symbol) const {
  symbol = strip_name_alias(symbol);
  return unary_.find(symbol) != unary_.end() || binary_.find(symbol) != binary_.end();
}

ImageModel build_model(const ImageRecord& img, bool exhaustive) {
  ImageModel m;
  m.image_id_ = img.image_id;
  m.exhaustive_ = exhaustive;
  for (const auto& e : img.entities) {
    m.domain_.push_back(e.entity_id);
    for (const auto& n : e.names) {
      if (auto s = normalize_symbol(n); !s.empty()) m.unary_[s].insert(e.entity_id);
    }
    for (const auto& a : e.attributes) {
      if (auto s = normalize_symbol(a); !s.empty()) m.unary_["attr:" + s].insert(e.entity_id);
    }
    for (const auto& s : e.synsets) {
      if (!s.empty()) m.unary_[s].insert(e.entity_id);
    }
  }
  std::sort(m.domain_.begin(), m.domain_.end());
  m.domain_.erase(std::unique(m.domain_.begin(), m.domain_.end()), m.domain_.end());

  auto in_domain = [&](const std::string& id) {
    return std::binary_search(m.domain_.begin(), m.domain_.end(), id);
  };
  for (const auto& r : img.regions) {
    if (!r.lf) continue;
    const GroundedLf g = parse_region_lf(*r.lf, &r);
    for (const auto& atom : g.lf.atoms) {
      if (atom.binary()) {
        const auto& subjects = g.arguments[atom.args[0]];
        const auto& objects = g.arguments[atom.args[1]];
        for (const auto& s : subjects) {
          for (const auto& o : objects) {
            if (in_domain(s) && in_domain(o)) m.binary_[atom.symbol].emplace(s, o);
          }
        }
      } else {
        for (const auto& id : g.arguments[atom.args[0]]) {
          if (in_domain(id)) m.unary_[atom.symbol].insert(id);
        }
      }
    }
  }
  return m;
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  Taxonomy t;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError("taxonomy line " + std::to_string(lineno) + ": expected child<TAB>ancestor",
                       lineno, 0);
    }
    t.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return t;
}

ImageModel with_taxonomy(const ImageModel& m, const Taxonomy& ancestors) {
  ImageModel out = m;
  for (const auto& [symbol, members] : m.unary_) {
    std::vector<std::string> frontier{symbol};
    std::set<std::string> visited{symbol};
    while (!frontier.empty()) {
      const std::string cur = frontier.back();
      frontier.pop_back();
      auto [b, e] = ancestors.equal_range(cur);
      for (auto it = b; it != e; ++it) {
        if (!visited.insert(it->second).second) continue;
        out.unary_[it->second].insert(members.begin(), members.end());
        frontier.push_back(it->second);
      }
    }
  }
  return out;
}

Extension interpret(const ImageModel& m, std::string_view symbol) {
  symbol = strip_name_alias(symbol);
  Extension ext;
  if (auto it = m.unary().find(symbol); it != m.unary().end()) {
    ext.entities = it->second;
    return ext;
  }
  if (auto it = m.binary().find(symbol); it != m.binary().end()) {
    ext.pairs = it->second;
    return ext;
  }
  ext.known = m.exhaustive();
  return ext;
}

namespace {

/// Backtracking evaluator over a fixed quantification order.
class Search {
 public:
  Search(const ImageModel& m, const LogicalForm& lf, std::vector<int> order)
      : m_(m), lf_(lf), order_(std::move(order)), binding_(lf.variables.size(), -1),
        level_of_(lf.variables.size(), 0), quant_(lf.variables.size()),
        found_(lf.variables.size(), -1) {
    for (std::size_t l = 0; l < order_.size(); ++l) level_of_[order_[l]] = static_cast<int>(l);
    atoms_at_.resize(order_.size());
    for (const auto& a : lf.atoms) {
      int level = 0;
      for (int v : a.args) level = std::max(level, level_of_[v]);
      atoms_at_[level].push_back(&a);
    }
    for (const auto& c : lf.cardinality) quant_[c.var] = c;
    resolve_extensions();
  }

  /// Value of the formula given bindings for levels [0, level).
  Truth eval(std::size_t level) {
    if (level == order_.size()) return Truth::kTrue;
    const int var = order_[level];
    const auto& q = quant_[var];
    const Comparator op = q ? q->op : Comparator::kAtLeast;
    const int need = q ? q->n : 1;
    const auto& dom = m_.domain();

    int t = 0;
    int u = 0;
    std::vector<int> witness;
    for (std::size_t e = 0; e < dom.size(); ++e) {
      const Truth r = branch(level, static_cast<int>(e));
      if (r == Truth::kTrue) {
        if (t == 0) {
          witness.assign(found_.begin(), found_.end());
          witness[var] = static_cast<int>(e);
        }
        ++t;
        if (op == Comparator::kAtLeast && t >= need) break;
      } else if (r == Truth::kUnknown) {
        ++u;
      }
    }
    binding_[var] = -1;

    Truth result;
    if (op == Comparator::kAtLeast) {
      result = t >= need ? Truth::kTrue : (t + u < need ? Truth::kFalse : Truth::kUnknown);
    } else {
      if (t == need && u == 0) {
        result = Truth::kTrue;
      } else if (t > need || t + u < need) {
        result = Truth::kFalse;
      } else {
        result = Truth::kUnknown;
      }
    }
    if (result == Truth::kTrue) {
      for (std::size_t l = level; l < order_.size(); ++l) found_[order_[l]] = witness[order_[l]];
    }
    return result;
  }

  /// Binds the variable at `level` to entity `e` and evaluates the rest.
  Truth branch(std::size_t level, int e) {
    binding_[order_[level]] = e;
    Truth here = Truth::kTrue;
    for (const Atom* a : atoms_at_[level]) {
      here = kleene_min(here, atom_value(*a));
      if (here == Truth::kFalse) return Truth::kFalse;
    }
    return kleene_min(here, eval(level + 1));
  }

  std::map<std::string, std::string> witness() const {
    std::map<std::string, std::string> w;
    for (std::size_t v = 0; v < lf_.variables.size(); ++v) {
      if (found_[v] >= 0) w[lf_.variables[v]] = m_.domain()[found_[v]];
    }
    return w;
  }

 private:
  struct Resolved {
    const EntitySet* unary = nullptr;
    const PairSet* binary = nullptr;
  };

  void resolve_extensions() {
    for (const auto& a : lf_.atoms) {
      Resolved r;
      const std::string_view sym = strip_name_alias(a.symbol);
      if (a.binary()) {
        if (auto it = m_.binary().find(sym); it != m_.binary().end()) r.binary = &it->second;
      } else {
        if (auto it = m_.unary().find(sym); it != m_.unary().end()) r.unary = &it->second;
      }
      resolved_.emplace(&a, r);
    }
  }

  Truth atom_value(const Atom& a) const {
    const Resolved& r = resolved_.at(&a);
    const auto& dom = m_.domain();
    if (a.binary()) {
      if (!r.binary) return m_.exhaustive() ? Truth::kFalse : Truth::kUnknown;
      const auto key = std::make_pair(dom[binding_[a.args[0]]], dom[binding_[a.args[1]]]);
      return r.binary->count(key) ? Truth::kTrue : Truth::kFalse;
    }
    if (!r.unary) return m_.exhaustive() ? Truth::kFalse : Truth::kUnknown;
    return r.unary->count(dom[binding_[a.args[0]]]) ? Truth::kTrue : Truth::kFalse;
  }

  const ImageModel& m_;
  const LogicalForm& lf_;
  std::vector<int> order_;
  std::vector<int> binding_;
  std::vector<int> level_of_;
  std::vector<std::optional<Cardinality>> quant_;
  std::vector<std::vector<const Atom*>> atoms_at_;
  std::map<const Atom*, Resolved> resolved_;
  std::vector<int> found_;
};

}  // namespace

TruthJudgement evaluate(const ImageModel& m, const LogicalForm& lf) {
  lf.check();
  if (!lf.free_vars.empty()) {
    throw ContractError("evaluate() needs a sentence; '" + lf.variables[lf.free_vars.front()] +
                        "' is free");
  }
  std::vector<int> order(lf.variables.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Search search(m, lf, std::move(order));
  TruthJudgement j;
  j.value = search.eval(0);
  if (j.value == Truth::kTrue) j.witness = search.witness();
  return j;
}

EntitySet denotation(const ImageModel& m, const LogicalForm& lf) {
  lf.check();
  if (lf.free_vars.size() != 1) {
    throw ContractError("denotation() needs exactly one free variable, got " +
                        std::to_string(lf.free_vars.size()));
  }
  const int free = lf.free_vars.front();
  std::vector<int> order{free};
  for (int v = 0; v < static_cast<int>(lf.variables.size()); ++v) {
    if (v != free) order.push_back(v);
  }
  // The free variable's own cardinality applies to the result set, not to
  // each binding.
  LogicalForm open = lf;
  std::optional<Cardinality> own;
  std::erase_if(open.cardinality, [&](const Cardinality& c) {
    if (c.var != free) return false;
    own = c;
    return true;
  });
  Search search(m, open, std::move(order));
  EntitySet out;
  for (std::size_t e = 0; e < m.domain().size(); ++e) {
    if (search.branch(0, static_cast<int>(e)) == Truth::kTrue) out.insert(m.domain()[e]);
  }
  if (own) {
    const auto size = static_cast<int>(out.size());
    const bool ok = own->op == Comparator::kAtLeast ? size >= own->n : size == own->n;
    if (!ok) out.clear();
  }
  return out;
}

}  // namespace semx
