#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "casp/error.hpp"
#include "casp/program.hpp"

namespace casp {

/// Atom or body index in a nogood store: atoms first, then bodies.
using Entity = std::uint32_t;

/// Signed literal over an entity: T e or F e.
class Lit {
 public:
  constexpr Lit() = default;
  static constexpr Lit T(Entity e) { return Lit(e << 1); }
  static constexpr Lit F(Entity e) { return Lit((e << 1) | 1U); }
  static constexpr Lit from_code(std::uint32_t code) { return Lit(code); }

  constexpr Entity entity() const { return code_ >> 1; }
  constexpr bool is_true() const { return (code_ & 1U) == 0; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr Lit operator~() const { return Lit(code_ ^ 1U); }

  constexpr auto operator<=>(const Lit&) const = default;

 private:
  constexpr explicit Lit(std::uint32_t code) : code_(code) {}
  std::uint32_t code_ = 0;
};

enum class Truth : std::int8_t { Unassigned = 0, True = 1, False = -1 };

using Nogood = std::vector<Lit>;

/// The completion of a program as nogoods. Immutable once built.
struct NogoodStore {
  std::size_t atom_count = 0;
  std::vector<std::vector<Literal>> bodies;  // body i is entity atom_count + i
  std::vector<std::string> atom_names;
  std::vector<Nogood> nogoods;

  std::size_t entity_count() const { return atom_count + bodies.size(); }
  Entity body_entity(std::size_t i) const { return static_cast<Entity>(atom_count + i); }
  bool is_atom(Entity e) const { return e < atom_count; }

  std::string name(Entity e) const {
    if (is_atom(e)) return atom_names.at(e);
    return "body#" + std::to_string(e - atom_count);
  }
  std::string to_string(Lit l) const { return (l.is_true() ? "T " : "F ") + name(l.entity()); }
};

/// Sorted, duplicate-free copy; nullopt if it holds a complementary pair
/// (such a nogood can never be violated).
inline std::optional<Nogood> normalize_nogood(Nogood n) {
  std::sort(n.begin(), n.end());
  n.erase(std::unique(n.begin(), n.end()), n.end());
  for (std::size_t i = 1; i < n.size(); ++i)
    if (n[i].entity() == n[i - 1].entity()) return std::nullopt;
  return n;
}

/// Completion nogoods of a program with normal, choice and integrity rules.
///
/// For every distinct body B = {l1..lm}: {F B, t(l1)..t(lm)} and {T B, f(li)}.
/// For every atom a with supporting bodies B1..Bk: {T a, F B1, .., F Bk}, and
/// for normal-rule bodies {T Bi, F a}. Choice bodies only support their heads.
/// An integrity rule with body B gives {T B}.
inline NogoodStore completion_nogoods(const GroundProgram& p) {
  if (p.has_cardinality()) throw Error("completion needs a program without cardinality rules");
  NogoodStore store;
  store.atom_count = p.atoms().size();
  for (AtomId a = 0; a < p.atoms().size(); ++a) store.atom_names.push_back(p.atoms().to_string(a));

  std::map<std::vector<Literal>, std::size_t> body_ids;
  auto intern = [&](std::vector<Literal> body) {
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    auto [it, fresh] = body_ids.emplace(body, store.bodies.size());
    if (fresh) store.bodies.push_back(std::move(body));
    return it->second;
  };

  std::vector<std::vector<std::size_t>> supports(store.atom_count);
  std::vector<std::vector<std::size_t>> forcing(store.atom_count);
  std::vector<std::size_t> integrity;
  for (const auto& rule : p.rules()) {
    if (const auto* r = std::get_if<NormalRule>(&rule)) {
      auto b = intern(r->body);
      supports[r->head].push_back(b);
      forcing[r->head].push_back(b);
    } else if (const auto* r = std::get_if<ChoiceRule>(&rule)) {
      auto b = intern(r->body);
      for (AtomId h : r->heads) supports[h].push_back(b);
    } else if (const auto* r = std::get_if<IntegrityRule>(&rule)) {
      integrity.push_back(intern(r->body));
    }
  }

  std::set<Nogood> seen;
  auto emit = [&](Nogood n) {
    auto norm = normalize_nogood(std::move(n));
    if (norm && seen.insert(*norm).second) store.nogoods.push_back(std::move(*norm));
  };
  auto holds = [](const Literal& l) { return l.positive ? Lit::T(l.atom) : Lit::F(l.atom); };

  for (std::size_t b = 0; b < store.bodies.size(); ++b) {
    const Entity be = store.body_entity(b);
    Nogood all{Lit::F(be)};
    for (const auto& l : store.bodies[b]) {
      all.push_back(holds(l));
      emit({Lit::T(be), ~holds(l)});
    }
    emit(std::move(all));
  }
  for (AtomId a = 0; a < store.atom_count; ++a) {
    Nogood unsupported{Lit::T(a)};
    for (auto b : supports[a]) unsupported.push_back(Lit::F(store.body_entity(b)));
    emit(std::move(unsupported));
    for (auto b : forcing[a]) emit({Lit::T(store.body_entity(b)), Lit::F(a)});
  }
  for (auto b : integrity) emit({Lit::T(store.body_entity(b))});
  return store;
}

/// One nogood per line, literals in sorted order.
inline std::string dump_nogoods(const NogoodStore& store) {
  std::ostringstream out;
  for (const auto& n : store.nogoods) {
    out << '{';
    for (std::size_t i = 0; i < n.size(); ++i) out << (i ? ", " : "") << store.to_string(n[i]);
    out << "}\n";
  }
  return out.str();
}

/// Whether the total assignment `values` (indexed by entity) violates no nogood.
inline bool is_solution(const NogoodStore& store, const std::vector<Truth>& values) {
  for (const auto& n : store.nogoods) {
    bool violated = true;
    for (Lit l : n) {
      Truth t = values.at(l.entity());
      if (t == Truth::Unassigned) throw Error("assignment is not total");
      if ((t == Truth::True) != l.is_true()) {
        violated = false;
        break;
      }
    }
    if (violated) return false;
  }
  return true;
}

}  // namespace casp
