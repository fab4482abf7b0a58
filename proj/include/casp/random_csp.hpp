#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "casp/csp.hpp"

namespace casp {

/// Uniform integer in [0, n). Defined on the raw engine output so that results
/// do not depend on the standard library's distributions.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline bool coin(std::mt19937_64& rng, unsigned percent) { return rng() % 100 < percent; }

/// Portable Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

struct RandomCspOptions {
  std::size_t max_vars = 5;
  std::size_t max_domain = 5;
  unsigned alldiff_percent = 70;
  unsigned permutation_percent = 0;  // share of all-different constraints made permutations
  std::size_t max_tables = 3;
  std::size_t max_table_arity = 2;
  unsigned tuple_percent = 35;  // chance that a combination is listed in a table
};

/// Small random instance: contiguous domains, optional all-different (or
/// permutation) over a random scope, and random unary/binary tables.
inline CspInstance random_csp(std::mt19937_64& rng, const RandomCspOptions& o = {}) {
  CspInstance inst;
  const std::size_t n = 1 + uniform_index(rng, o.max_vars);
  std::vector<std::size_t> sizes(n);
  for (auto& d : sizes) d = 1 + uniform_index(rng, o.max_domain);

  std::vector<VarIndex> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<VarIndex> alldiff_scope;
  bool permutation = false;
  if (n >= 2 && coin(rng, o.alldiff_percent)) {
    shuffle(all, rng);
    std::size_t k = 2 + uniform_index(rng, n - 1);
    alldiff_scope.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(alldiff_scope.begin(), alldiff_scope.end());
    permutation = k <= o.max_domain && coin(rng, o.permutation_percent);
    if (permutation)
      for (VarIndex v : alldiff_scope) sizes[v] = k;
  }
  for (std::size_t i = 0; i < n; ++i) {
    Value low = static_cast<Value>(uniform_index(rng, 3));
    if (permutation && std::count(alldiff_scope.begin(), alldiff_scope.end(), i)) low = 1;
    std::vector<Value> dom;
    for (std::size_t k = 0; k < sizes[i]; ++k) dom.push_back(low + static_cast<Value>(k));
    inst.add_variable("x" + std::to_string(i + 1), std::move(dom));
  }
  if (!alldiff_scope.empty())
    inst.add_constraint(permutation ? Constraint::permutation(alldiff_scope) : Constraint::all_different(alldiff_scope));

  const std::size_t tables = uniform_index(rng, o.max_tables + 1);
  for (std::size_t t = 0; t < tables; ++t) {
    std::size_t arity = 1 + uniform_index(rng, std::min(o.max_table_arity, n));
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    shuffle(all, rng);
    std::vector<VarIndex> scope(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(arity));
    std::vector<Tuple> tuples;
    Tuple cur(arity);
    auto rec = [&](auto&& self, std::size_t j) -> void {
      if (j == arity) {
        if (coin(rng, o.tuple_percent)) tuples.push_back(cur);
        return;
      }
      for (Value v : inst.variable(scope[j]).domain) {
        cur[j] = v;
        self(self, j + 1);
      }
    };
    rec(rec, 0);
    auto polarity = coin(rng, 50) ? TablePolarity::Allowed : TablePolarity::Forbidden;
    inst.add_constraint(Constraint::table(std::move(scope), polarity, std::move(tuples)));
  }
  return inst;
}

/// Random non-empty sub-domains; with `interval`, each is a contiguous slice
/// of the declared domain.
inline DomainState random_state(const CspInstance& inst, std::mt19937_64& rng, bool interval) {
  DomainState s;
  for (const auto& v : inst.variables()) {
    const std::size_t d = v.domain.size();
    std::vector<Value> cur;
    if (interval) {
      std::size_t l = uniform_index(rng, d);
      std::size_t u = l + uniform_index(rng, d - l);
      cur.assign(v.domain.begin() + static_cast<std::ptrdiff_t>(l),
                 v.domain.begin() + static_cast<std::ptrdiff_t>(u + 1));
    } else {
      for (Value x : v.domain)
        if (coin(rng, 70)) cur.push_back(x);
      if (cur.empty()) cur.push_back(v.domain[uniform_index(rng, d)]);
    }
    s.domains.push_back(std::move(cur));
  }
  return s;
}

}  // namespace casp
