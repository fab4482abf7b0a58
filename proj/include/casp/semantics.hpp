#pragma once

#include <functional>
#include <vector>

#include "casp/error.hpp"
#include "casp/program.hpp"

namespace casp {

/// Set of atoms as a membership vector indexed by AtomId.
using AtomSet = std::vector<bool>;

inline AtomSet make_atom_set(const GroundProgram& p, const std::vector<AtomId>& members) {
  AtomSet s(p.atoms().size());
  for (AtomId a : members) s.at(a) = true;
  return s;
}

/// True iff the positive dependency graph (head to positive body atoms) is acyclic.
inline bool is_tight(const GroundProgram& p) {
  const std::size_t n = p.atoms().size();
  std::vector<std::vector<AtomId>> edges(n);
  for (const auto& rule : p.rules()) {
    auto add = [&](AtomId h, const std::vector<Literal>& body) {
      for (const auto& l : body)
        if (l.positive) edges[h].push_back(l.atom);
    };
    if (const auto* r = std::get_if<NormalRule>(&rule)) add(r->head, r->body);
    if (const auto* r = std::get_if<ChoiceRule>(&rule))
      for (AtomId h : r->heads) add(h, r->body);
  }
  // Iterative DFS with colours: 0 new, 1 on stack, 2 done.
  std::vector<char> colour(n, 0);
  for (AtomId root = 0; root < n; ++root) {
    if (colour[root]) continue;
    std::vector<std::pair<AtomId, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < edges[v].size()) {
        AtomId w = edges[v][next++];
        if (colour[w] == 1) return false;
        if (colour[w] == 0) {
          colour[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        colour[v] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

/// Gelfond-Lifschitz reduct of `p` relative to `x`. Choice rules contribute
/// `h :- body+` for each head h in `x`; integrity rules keep their positive part.
inline GroundProgram reduct(const GroundProgram& p, const AtomSet& x) {
  if (p.has_cardinality()) throw Error("reduct needs a program without cardinality rules");
  if (x.size() != p.atoms().size()) throw Error("atom set does not match program");
  GroundProgram out;
  for (AtomId a = 0; a < p.atoms().size(); ++a) out.atom(p.atoms()[a].name, p.atoms()[a].args);
  auto reduce = [&](const std::vector<Literal>& body, std::vector<Literal>& positive) {
    for (const auto& l : body) {
      if (l.positive) positive.push_back(l);
      else if (x[l.atom]) return false;
    }
    return true;
  };
  for (const auto& rule : p.rules()) {
    std::vector<Literal> positive;
    if (const auto* r = std::get_if<NormalRule>(&rule)) {
      if (reduce(r->body, positive)) out.add_normal(r->head, std::move(positive));
    } else if (const auto* r = std::get_if<ChoiceRule>(&rule)) {
      if (!reduce(r->body, positive)) continue;
      for (AtomId h : r->heads)
        if (x[h]) out.add_normal(h, positive);
    } else if (const auto* r = std::get_if<IntegrityRule>(&rule)) {
      if (reduce(r->body, positive)) out.add_integrity(std::move(positive));
    }
  }
  return out;
}

/// Least model of a positive program, by iterating the one-step consequence
/// operator to its fixpoint. Integrity rules are ignored here.
inline AtomSet least_model(const GroundProgram& positive) {
  AtomSet m(positive.atoms().size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& rule : positive.rules()) {
      const auto* r = std::get_if<NormalRule>(&rule);
      if (!r || m[r->head]) continue;
      bool fires = true;
      for (const auto& l : r->body) {
        if (!l.positive) throw Error("least model needs a positive program");
        if (!m[l.atom]) {
          fires = false;
          break;
        }
      }
      if (fires) {
        m[r->head] = true;
        changed = true;
      }
    }
  }
  return m;
}

/// True iff `x` is the least model of the reduct and violates no integrity rule.
inline bool is_answer_set(const GroundProgram& p, const AtomSet& x) {
  GroundProgram red = reduct(p, x);
  if (least_model(red) != x) return false;
  for (const auto& rule : red.rules()) {
    const auto* r = std::get_if<IntegrityRule>(&rule);
    if (!r) continue;
    bool violated = true;
    for (const auto& l : r->body)
      if (!x[l.atom]) violated = false;
    if (violated) return false;
  }
  return true;
}

/// True iff `x` satisfies every rule of `p` read classically. Choice rules
/// always hold. Every answer set is such a model.
inline bool is_classical_model(const GroundProgram& p, const AtomSet& x) {
  auto holds = [&](const std::vector<Literal>& body) {
    for (const auto& l : body)
      if (x[l.atom] != l.positive) return false;
    return true;
  };
  for (const auto& rule : p.rules()) {
    if (const auto* r = std::get_if<NormalRule>(&rule)) {
      if (!x[r->head] && holds(r->body)) return false;
    } else if (const auto* r = std::get_if<IntegrityRule>(&rule)) {
      if (holds(r->body)) return false;
    }
  }
  return true;
}

/// Every answer set of `p` over its atoms, by exhaustive enumeration.
inline std::vector<AtomSet> answer_sets_brute_force(const GroundProgram& p, std::size_t max_atoms = 20) {
  const std::size_t n = p.atoms().size();
  if (n > max_atoms) throw CapExceeded("too many atoms for exhaustive enumeration");
  if (p.has_cardinality()) throw Error("enumeration needs a program without cardinality rules");
  std::vector<AtomSet> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    AtomSet x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1;
    if (is_classical_model(p, x) && is_answer_set(p, x)) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace casp
