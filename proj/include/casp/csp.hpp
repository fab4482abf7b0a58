#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "casp/error.hpp"

namespace casp {

using Value = int;
using VarIndex = std::size_t;
using Tuple = std::vector<Value>;

// Variable with a finite, sorted, duplicate-free, non-empty domain.
struct VariableDecl {
  std::string name;
  std::vector<Value> domain;

  bool contains(Value v) const { return std::binary_search(domain.begin(), domain.end(), v); }
  Value min() const { return domain.front(); }
  Value max() const { return domain.back(); }

  /// 0-based position of `v` in the domain, if present.
  std::optional<std::size_t> index_of(Value v) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), v);
    if (it == domain.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - domain.begin());
  }

  bool operator==(const VariableDecl&) const = default;
};

enum class ConstraintKind { AllDifferent, Permutation, Table };
enum class TablePolarity { Allowed, Forbidden };

struct Constraint {
  ConstraintKind kind = ConstraintKind::AllDifferent;
  std::vector<VarIndex> scope;
  TablePolarity polarity = TablePolarity::Allowed;
  std::vector<Tuple> tuples;  // sorted and deduplicated; empty unless kind == Table

  static Constraint all_different(std::vector<VarIndex> scope) {
    return Constraint{ConstraintKind::AllDifferent, std::move(scope), TablePolarity::Allowed, {}};
  }
  static Constraint permutation(std::vector<VarIndex> scope) {
    return Constraint{ConstraintKind::Permutation, std::move(scope), TablePolarity::Allowed, {}};
  }
  static Constraint table(std::vector<VarIndex> scope, TablePolarity polarity,
                          std::vector<Tuple> tuples) {
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    return Constraint{ConstraintKind::Table, std::move(scope), polarity, std::move(tuples)};
  }

  bool is_alldiff_like() const {
    return kind == ConstraintKind::AllDifferent || kind == ConstraintKind::Permutation;
  }

  bool lists(std::span<const Value> tuple) const {
    return std::binary_search(tuples.begin(), tuples.end(), tuple,
                              [](const auto& a, const auto& b) {
                                return std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                                                    b.end());
                              });
  }

  /// Whether the scope-ordered tuple satisfies the constraint.
  bool accepts(std::span<const Value> tuple) const {
    switch (kind) {
      case ConstraintKind::AllDifferent:
      case ConstraintKind::Permutation: {
        std::vector<Value> sorted(tuple.begin(), tuple.end());
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
      }
      case ConstraintKind::Table:
        return lists(tuple) == (polarity == TablePolarity::Allowed);
    }
    return false;
  }

  bool operator==(const Constraint&) const = default;
};

/// Variables with finite integer domains plus a list of constraints over them.
class CspInstance {
 public:
  VarIndex add_variable(std::string name, std::vector<Value> domain) {
    if (name.empty()) throw Error("variable name must not be empty");
    if (index_.count(name)) throw Error("duplicate variable '" + name + "'");
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    if (domain.empty()) throw Error("empty domain for variable '" + name + "'");
    index_.emplace(name, variables_.size());
    variables_.push_back(VariableDecl{std::move(name), std::move(domain)});
    return variables_.size() - 1;
  }

  /// Restricts the domain of `var` to the single value `v`.
  void assign(VarIndex var, Value v) {
    auto& decl = variables_.at(var);
    if (!decl.contains(v))
      throw Error("value " + std::to_string(v) + " outside domain of '" + decl.name + "'");
    assignments_.push_back({var, v, decl.domain, constraints_.size()});
    decl.domain = {v};
  }

  struct Assignment {
    VarIndex var;
    Value value;
    std::vector<Value> previous_domain;
    std::size_t after_constraints;  // number of constraints added before this event
  };
  /// `assign` events in order, with the domain each one replaced.
  const std::vector<Assignment>& assignments() const { return assignments_; }

  void add_constraint(Constraint c) {
    validate(c);
    constraints_.push_back(std::move(c));
  }

  const std::vector<VariableDecl>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const VariableDecl& variable(VarIndex i) const { return variables_.at(i); }
  std::size_t size() const { return variables_.size(); }

  std::optional<VarIndex> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Sorted union of the domains of `scope`.
  std::vector<Value> value_union(std::span<const VarIndex> scope) const {
    std::set<Value> values;
    for (VarIndex v : scope) values.insert(variables_[v].domain.begin(), variables_[v].domain.end());
    return {values.begin(), values.end()};
  }

  /// Product of domain sizes, saturating at `cap + 1`.
  std::size_t search_space(std::size_t cap) const {
    std::size_t total = 1;
    for (const auto& v : variables_) {
      if (total > cap / v.domain.size()) return cap + 1;
      total *= v.domain.size();
    }
    return total;
  }

  bool operator==(const CspInstance& o) const {
    return variables_ == o.variables_ && constraints_ == o.constraints_;
  }

 private:
  void validate(const Constraint& c) const {
    if (c.scope.empty()) throw Error("constraint with empty scope");
    std::vector<VarIndex> sorted = c.scope;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error("constraint scope repeats a variable");
    if (sorted.back() >= variables_.size()) throw Error("constraint references undeclared variable");
    if (c.kind == ConstraintKind::Permutation) {
      auto values = value_union(c.scope);
      if (values.size() != c.scope.size())
        throw Error("permutation over " + std::to_string(c.scope.size()) + " variables spans " +
                    std::to_string(values.size()) + " values");
    }
    if (c.kind != ConstraintKind::Table) return;
    for (const auto& t : c.tuples) {
      if (t.size() != c.scope.size())
        throw Error("tuple arity " + std::to_string(t.size()) + " does not match scope size " +
                    std::to_string(c.scope.size()));
      for (std::size_t j = 0; j < t.size(); ++j)
        if (!variables_[c.scope[j]].contains(t[j]))
          throw Error("tuple value " + std::to_string(t[j]) + " outside domain of '" +
                      variables_[c.scope[j]].name + "'");
    }
  }

  std::vector<VariableDecl> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Assignment> assignments_;
  std::unordered_map<std::string, VarIndex> index_;
};

/// Current value set of every variable; a subset of the declared domains.
struct DomainState {
  std::vector<std::vector<Value>> domains;

  static DomainState full(const CspInstance& inst) {
    DomainState s;
    for (const auto& v : inst.variables()) s.domains.push_back(v.domain);
    return s;
  }

  bool inconsistent() const {
    return std::any_of(domains.begin(), domains.end(), [](const auto& d) { return d.empty(); });
  }

  /// Values of the declared domains that are absent here, per variable.
  std::vector<std::vector<Value>> removed_from(const CspInstance& inst) const {
    std::vector<std::vector<Value>> out(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i)
      std::set_difference(inst.variable(i).domain.begin(), inst.variable(i).domain.end(),
                          domains[i].begin(), domains[i].end(), std::back_inserter(out[i]));
    return out;
  }

  bool operator==(const DomainState&) const = default;
};

/// Total map from variables (by index) to values.
struct CspAssignment {
  std::vector<Value> values;

  auto operator<=>(const CspAssignment&) const = default;
};

inline Tuple project(std::span<const Value> values, std::span<const VarIndex> scope) {
  Tuple t;
  t.reserve(scope.size());
  for (VarIndex v : scope) t.push_back(values[v]);
  return t;
}

/// True iff `a` satisfies every constraint. Throws if `a` is not a total
/// assignment within the declared domains.
inline bool check_solution(const CspInstance& inst, const CspAssignment& a) {
  if (a.values.size() != inst.size())
    throw Error("assignment has " + std::to_string(a.values.size()) + " values for " +
                std::to_string(inst.size()) + " variables");
  for (std::size_t i = 0; i < inst.size(); ++i)
    if (!inst.variable(i).contains(a.values[i]))
      throw Error("value " + std::to_string(a.values[i]) + " outside domain of '" +
                  inst.variable(i).name + "'");
  return std::all_of(inst.constraints().begin(), inst.constraints().end(), [&](const Constraint& c) {
    return c.accepts(project(a.values, c.scope));
  });
}

/// Pairwise `v_i != v_j` forbidden tables for an all-different (or permutation)
/// constraint, one per unordered pair in scope order.
inline std::vector<Constraint> binary_decomposition(const CspInstance& inst, const Constraint& c) {
  if (!c.is_alldiff_like()) throw Error("binary decomposition needs an all-different constraint");
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < c.scope.size(); ++i) {
    for (std::size_t j = i + 1; j < c.scope.size(); ++j) {
      const auto& a = inst.variable(c.scope[i]).domain;
      const auto& b = inst.variable(c.scope[j]).domain;
      std::vector<Value> common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      std::vector<Tuple> tuples;
      for (Value v : common) tuples.push_back({v, v});
      out.push_back(Constraint::table({c.scope[i], c.scope[j]}, TablePolarity::Forbidden,
                                      std::move(tuples)));
    }
  }
  return out;
}

}  // namespace casp
