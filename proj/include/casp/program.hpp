#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "casp/error.hpp"

namespace casp {

using AtomId = std::uint32_t;

struct Atom {
  std::string name;
  std::vector<int> args;

  std::string to_string() const {
    if (args.empty()) return name;
    std::string s = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + std::to_string(args[i]);
    return s + ")";
  }

  auto operator<=>(const Atom&) const = default;
};

struct Literal {
  AtomId atom = 0;
  bool positive = true;

  auto operator<=>(const Literal&) const = default;
};

inline Literal pos(AtomId a) { return {a, true}; }
inline Literal neg(AtomId a) { return {a, false}; }

/// Interns (name, args) pairs; equal atoms always get the same id.
class AtomTable {
 public:
  AtomId intern(std::string_view name, std::vector<int> args = {}) {
    Atom key{std::string(name), std::move(args)};
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<AtomId>(atoms_.size());
    atoms_.push_back(key);
    ids_.emplace(std::move(key), id);
    names_[atoms_.back().name]++;
    return id;
  }

  std::optional<AtomId> find(std::string_view name, const std::vector<int>& args = {}) const {
    auto it = ids_.find(Atom{std::string(name), args});
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  bool uses_name(std::string_view name) const { return names_.count(std::string(name)) != 0; }

  const Atom& operator[](AtomId id) const { return atoms_.at(id); }
  std::size_t size() const { return atoms_.size(); }
  std::string to_string(AtomId id) const { return atoms_.at(id).to_string(); }
  std::string to_string(Literal l) const { return (l.positive ? "" : "not ") + to_string(l.atom); }

 private:
  std::vector<Atom> atoms_;
  std::map<Atom, AtomId> ids_;
  std::map<std::string, std::size_t> names_;
};

struct NormalRule {
  AtomId head;
  std::vector<Literal> body;
  bool operator==(const NormalRule&) const = default;
};

struct ChoiceRule {
  std::vector<AtomId> heads;
  std::vector<Literal> body;
  bool operator==(const ChoiceRule&) const = default;
};

struct IntegrityRule {
  std::vector<Literal> body;
  bool operator==(const IntegrityRule&) const = default;
};

/// `:- k { l1; ...; ln }`: no answer set satisfies k or more of the literals.
struct CardinalityRule {
  std::size_t bound;
  std::vector<Literal> literals;
  bool operator==(const CardinalityRule&) const = default;
};

using Rule = std::variant<NormalRule, ChoiceRule, IntegrityRule, CardinalityRule>;

/// A ground program: an atom table plus rules in construction order.
class GroundProgram {
 public:
  AtomTable& atoms() { return atoms_; }
  const AtomTable& atoms() const { return atoms_; }
  AtomId atom(std::string_view name, std::vector<int> args = {}) {
    return atoms_.intern(name, std::move(args));
  }

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  void add_normal(AtomId head, std::vector<Literal> body) {
    for (const auto& l : body)
      if (!l.positive && l.atom == head)
        throw Error("rule head " + atoms_.to_string(head) + " occurs in its own negative body");
    check_ids(body);
    check_id(head);
    rules_.push_back(NormalRule{head, std::move(body)});
  }

  void add_choice(std::vector<AtomId> heads, std::vector<Literal> body = {}) {
    for (AtomId h : heads) check_id(h);
    check_ids(body);
    rules_.push_back(ChoiceRule{std::move(heads), std::move(body)});
  }

  void add_integrity(std::vector<Literal> body) {
    check_ids(body);
    rules_.push_back(IntegrityRule{std::move(body)});
  }

  /// Adds `:- k {literals}`. A rule with k > |literals| excludes nothing and is
  /// dropped (returns false).
  bool add_cardinality(std::size_t k, std::vector<Literal> literals) {
    if (k == 0) throw Error("cardinality bound must be at least 1");
    check_ids(literals);
    if (k > literals.size()) return false;
    rules_.push_back(CardinalityRule{k, std::move(literals)});
    return true;
  }

  void add(Rule r) {
    std::visit(
        [&](auto&& rule) {
          using T = std::decay_t<decltype(rule)>;
          if constexpr (std::is_same_v<T, NormalRule>) add_normal(rule.head, std::move(rule.body));
          else if constexpr (std::is_same_v<T, ChoiceRule>) add_choice(std::move(rule.heads), std::move(rule.body));
          else if constexpr (std::is_same_v<T, IntegrityRule>) add_integrity(std::move(rule.body));
          else add_cardinality(rule.bound, std::move(rule.literals));
        },
        std::move(r));
  }

  bool has_cardinality() const {
    return std::any_of(rules_.begin(), rules_.end(),
                       [](const Rule& r) { return std::holds_alternative<CardinalityRule>(r); });
  }

  /// Calls `f(atom)` for every atom occurrence in rule order.
  template <typename F>
  static void for_each_atom(const Rule& r, F&& f) {
    std::visit(
        [&](const auto& rule) {
          using T = std::decay_t<decltype(rule)>;
          if constexpr (std::is_same_v<T, NormalRule>) {
            f(rule.head);
            for (const auto& l : rule.body) f(l.atom);
          } else if constexpr (std::is_same_v<T, ChoiceRule>) {
            for (AtomId h : rule.heads) f(h);
            for (const auto& l : rule.body) f(l.atom);
          } else if constexpr (std::is_same_v<T, IntegrityRule>) {
            for (const auto& l : rule.body) f(l.atom);
          } else {
            for (const auto& l : rule.literals) f(l.atom);
          }
        },
        r);
  }

  /// Copy whose atom table holds exactly the atoms occurring in rules, numbered
  /// by first occurrence. Parsing the emitted text yields the same numbering.
  GroundProgram canonical() const {
    std::vector<std::optional<AtomId>> remap(atoms_.size());
    GroundProgram out;
    for (const auto& r : rules_)
      for_each_atom(r, [&](AtomId a) {
        if (!remap[a]) remap[a] = out.atoms_.intern(atoms_[a].name, atoms_[a].args);
      });
    auto lits = [&](const std::vector<Literal>& ls) {
      std::vector<Literal> o;
      o.reserve(ls.size());
      for (const auto& l : ls) o.push_back({*remap[l.atom], l.positive});
      return o;
    };
    for (const auto& r : rules_) {
      std::visit(
          [&](const auto& rule) {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, NormalRule>) {
              out.rules_.push_back(NormalRule{*remap[rule.head], lits(rule.body)});
            } else if constexpr (std::is_same_v<T, ChoiceRule>) {
              std::vector<AtomId> heads;
              for (AtomId h : rule.heads) heads.push_back(*remap[h]);
              out.rules_.push_back(ChoiceRule{std::move(heads), lits(rule.body)});
            } else if constexpr (std::is_same_v<T, IntegrityRule>) {
              out.rules_.push_back(IntegrityRule{lits(rule.body)});
            } else {
              out.rules_.push_back(CardinalityRule{rule.bound, lits(rule.literals)});
            }
          },
          r);
    }
    return out;
  }

  /// Number of distinct atoms occurring in rules.
  std::size_t atom_count() const {
    std::vector<bool> seen(atoms_.size());
    std::size_t n = 0;
    for (const auto& r : rules_)
      for_each_atom(r, [&](AtomId a) {
        if (!seen[a]) {
          seen[a] = true;
          ++n;
        }
      });
    return n;
  }

 private:
  void check_id(AtomId a) const {
    if (a >= atoms_.size()) throw Error("rule references unknown atom id " + std::to_string(a));
  }
  void check_ids(const std::vector<Literal>& ls) const {
    for (const auto& l : ls) check_id(l.atom);
  }

  AtomTable atoms_;
  std::vector<Rule> rules_;
};

/// Rule-by-rule equality with atoms compared by name and arguments.
inline bool structurally_equal(const GroundProgram& a, const GroundProgram& b) {
  if (a.size() != b.size()) return false;
  auto same_atom = [&](AtomId x, AtomId y) { return a.atoms()[x] == b.atoms()[y]; };
  auto same_lits = [&](const std::vector<Literal>& x, const std::vector<Literal>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].positive != y[i].positive || !same_atom(x[i].atom, y[i].atom)) return false;
    return true;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Rule& ra = a.rules()[i];
    const Rule& rb = b.rules()[i];
    if (ra.index() != rb.index()) return false;
    bool eq = std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(rb);
          if constexpr (std::is_same_v<T, NormalRule>) {
            return same_atom(x.head, y.head) && same_lits(x.body, y.body);
          } else if constexpr (std::is_same_v<T, ChoiceRule>) {
            if (x.heads.size() != y.heads.size()) return false;
            for (std::size_t k = 0; k < x.heads.size(); ++k)
              if (!same_atom(x.heads[k], y.heads[k])) return false;
            return same_lits(x.body, y.body);
          } else if constexpr (std::is_same_v<T, IntegrityRule>) {
            return same_lits(x.body, y.body);
          } else {
            return x.bound == y.bound && same_lits(x.literals, y.literals);
          }
        },
        ra);
    if (!eq) return false;
  }
  return true;
}

}  // namespace casp
