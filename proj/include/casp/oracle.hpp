#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "casp/csp.hpp"
#include "casp/error.hpp"

// Brute-force reference implementations. Nothing here shares code with the
// encoders or the propagation engine; they exist to check those.

namespace casp {

inline constexpr std::size_t kDefaultSearchCap = 10'000'000;

/// Every solution in lexicographic (variable order, ascending value) order,
/// truncated at `limit`.
inline std::vector<CspAssignment> enumerate_solutions(const CspInstance& inst,
                                                      std::size_t limit = SIZE_MAX,
                                                      std::size_t cap = kDefaultSearchCap) {
  if (inst.search_space(cap) > cap)
    throw CapExceeded("search space exceeds " + std::to_string(cap) + " assignments");

  // A constraint is checked at the deepest variable of its scope.
  std::vector<std::vector<const Constraint*>> due(inst.size());
  for (const auto& c : inst.constraints())
    due[*std::max_element(c.scope.begin(), c.scope.end())].push_back(&c);

  std::vector<CspAssignment> out;
  std::vector<Value> values(inst.size());
  std::function<void(std::size_t)> rec = [&](std::size_t var) {
    if (out.size() >= limit) return;
    if (var == inst.size()) {
      out.push_back(CspAssignment{values});
      return;
    }
    for (Value v : inst.variable(var).domain) {
      values[var] = v;
      bool ok = std::all_of(due[var].begin(), due[var].end(),
                            [&](const Constraint* c) { return c->accepts(project(values, c->scope)); });
      if (ok) rec(var + 1);
      if (out.size() >= limit) return;
    }
  };
  if (inst.size() == 0) {
    out.push_back(CspAssignment{});
    return out;
  }
  rec(0);
  return out;
}

enum class Consistency { ArcBinary, Bound, Range, Domain };

inline std::string_view to_string(Consistency c) {
  switch (c) {
    case Consistency::ArcBinary: return "ac";
    case Consistency::Bound: return "bound";
    case Consistency::Range: return "range";
    case Consistency::Domain: return "domain";
  }
  return "?";
}

namespace detail {

class SupportSearch {
 public:
  explicit SupportSearch(std::size_t cap) : cap_(cap) {}

  // Is there a tuple of `c` with position `pos` = `value` and every other
  // position drawn from `candidates`?
  bool supported(const Constraint& c, std::size_t pos, Value value,
                 const std::vector<std::vector<Value>>& candidates) {
    tuple_.assign(c.scope.size(), 0);
    tuple_[pos] = value;
    return search(c, pos, candidates, 0);
  }

 private:
  bool search(const Constraint& c, std::size_t fixed, const std::vector<std::vector<Value>>& cand,
              std::size_t j) {
    if (++work_ > cap_) throw CapExceeded("support search exceeds " + std::to_string(cap_) + " steps");
    if (j == c.scope.size()) return c.accepts(tuple_);
    if (j == fixed) return search(c, fixed, cand, j + 1);
    for (Value v : cand[j]) {
      tuple_[j] = v;
      if (c.is_alldiff_like() && clashes(c, fixed, j)) continue;
      if (search(c, fixed, cand, j + 1)) return true;
    }
    return false;
  }

  bool clashes(const Constraint&, std::size_t fixed, std::size_t j) const {
    for (std::size_t k = 0; k < j; ++k)
      if (tuple_[k] == tuple_[j]) return true;
    return fixed > j && tuple_[fixed] == tuple_[j];
  }

  std::size_t cap_;
  std::size_t work_ = 0;
  Tuple tuple_;
};

// Values of `decl` inside the interval hull of `current`.
inline std::vector<Value> hull_values(const VariableDecl& decl, const std::vector<Value>& current) {
  std::vector<Value> out;
  for (Value v : decl.domain)
    if (v >= current.front() && v <= current.back()) out.push_back(v);
  return out;
}

// Arity-2 relation of `c` projected onto scope positions (i, j), as a table.
inline Constraint pair_projection(const CspInstance& inst, const Constraint& c, std::size_t i,
                                  std::size_t j) {
  std::vector<Tuple> tuples;
  std::vector<std::vector<Value>> doms;
  for (VarIndex v : c.scope) doms.push_back(inst.variable(v).domain);
  Tuple t(c.scope.size());
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == c.scope.size()) {
      if (c.accepts(t)) tuples.push_back({t[i], t[j]});
      return;
    }
    for (Value v : doms[k]) {
      t[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return Constraint::table({c.scope[i], c.scope[j]}, TablePolarity::Allowed, std::move(tuples));
}

}  // namespace detail

/// The largest sub-state of `state` in which every remaining value has the
/// support demanded by `level`, computed by a naive fixpoint: constraints in
/// declaration order, scope variables in order, repeated until nothing changes.
///
///  - ArcBinary: arc consistency on the binary decomposition (all-different
///    split into pairwise disequalities; tables of arity >= 3 split into their
///    pairwise projections; unary tables filter values directly).
///  - Domain: every value extends to a satisfying tuple over current domains.
///  - Range: every value extends to a satisfying tuple whose other entries come
///    from the declared domain clipped to the current interval hull.
///  - Bound: as Range, but only the current minimum and maximum are tested.
///
/// An inconsistent result has every domain empty.
inline DomainState consistency_oracle(const CspInstance& inst, const DomainState& state,
                                      Consistency level, std::size_t cap = kDefaultSearchCap) {
  DomainState s = state;
  if (s.domains.size() != inst.size()) throw Error("domain state does not match instance");
  for (std::size_t i = 0; i < inst.size(); ++i) {
    auto& d = s.domains[i];
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    for (Value v : d)
      if (!inst.variable(i).contains(v))
        throw Error("state value " + std::to_string(v) + " outside domain of '" +
                    inst.variable(i).name + "'");
  }
  auto wipe = [&] {
    for (auto& d : s.domains) d.clear();
    return s;
  };
  if (s.inconsistent()) return wipe();

  std::vector<Constraint> work;
  for (const auto& c : inst.constraints()) {
    if (level != Consistency::ArcBinary) {
      work.push_back(c);
    } else if (c.is_alldiff_like()) {
      for (auto& b : binary_decomposition(inst, c)) work.push_back(std::move(b));
    } else if (c.scope.size() <= 2) {
      work.push_back(c);
    } else {
      for (std::size_t i = 0; i < c.scope.size(); ++i)
        for (std::size_t j = i + 1; j < c.scope.size(); ++j)
          work.push_back(detail::pair_projection(inst, c, i, j));
    }
  }

  detail::SupportSearch search(cap);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : work) {
      for (std::size_t pos = 0; pos < c.scope.size(); ++pos) {
        auto candidates = [&] {
          std::vector<std::vector<Value>> cand;
          for (VarIndex v : c.scope) {
            bool hull = level == Consistency::Range || level == Consistency::Bound;
            cand.push_back(hull ? detail::hull_values(inst.variable(v), s.domains[v]) : s.domains[v]);
          }
          return cand;
        };
        auto& dom = s.domains[c.scope[pos]];
        if (level == Consistency::Bound) {
          while (!dom.empty() && !search.supported(c, pos, dom.front(), candidates())) {
            dom.erase(dom.begin());
            changed = true;
          }
          while (!dom.empty() && !search.supported(c, pos, dom.back(), candidates())) {
            dom.pop_back();
            changed = true;
          }
        } else {
          auto cand = candidates();
          std::vector<Value> kept;
          for (Value v : dom)
            if (search.supported(c, pos, v, cand)) kept.push_back(v);
          if (kept.size() != dom.size()) {
            dom = std::move(kept);
            changed = true;
          }
        }
        if (dom.empty()) return wipe();
      }
    }
  }
  return s;
}

}  // namespace casp
