#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "casp/error.hpp"
#include "casp/program.hpp"

namespace casp {

enum class CardinalityMethod { Counter, Binomial };

inline std::string_view to_string(CardinalityMethod m) {
  return m == CardinalityMethod::Counter ? "counter" : "binomial";
}

inline constexpr std::size_t kBinomialCap = 1'000'000;

/// C(n, k), saturating at `cap + 1`.
inline std::size_t binomial(std::size_t n, std::size_t k, std::size_t cap = SIZE_MAX - 1) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // Multiplicative formula kept exact with 128-bit intermediates.
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return static_cast<std::size_t>(r);
}

/// Name for counter atoms that no atom of `atoms` uses.
inline std::string fresh_counter_name(const AtomTable& atoms) {
  std::string name = "_l";
  while (atoms.uses_name(name)) name.insert(name.begin(), '_');
  return name;
}

/// Replaces every cardinality rule by normal and integrity rules. Atom ids of
/// `p` are preserved; counter atoms are appended.
///
/// Counter: atom (c,i,j) holds when at least j of literals i..n of the c-th
/// cardinality rule hold. Binomial: one integrity rule per k-subset.
inline GroundProgram normalize_cardinality(const GroundProgram& p, CardinalityMethod method,
                                           std::size_t binomial_cap = kBinomialCap) {
  GroundProgram out;
  for (AtomId a = 0; a < p.atoms().size(); ++a) out.atom(p.atoms()[a].name, p.atoms()[a].args);
  const std::string counter = fresh_counter_name(p.atoms());
  int card_index = 0;

  for (const auto& rule : p.rules()) {
    const auto* card = std::get_if<CardinalityRule>(&rule);
    if (!card) {
      out.add(rule);
      continue;
    }
    ++card_index;
    const auto& lits = card->literals;
    const std::size_t n = lits.size();
    const std::size_t k = card->bound;

    if (method == CardinalityMethod::Binomial) {
      if (binomial(n, k, binomial_cap) > binomial_cap)
        throw CapExceeded("binomial expansion of a cardinality rule exceeds " +
                          std::to_string(binomial_cap) + " rules");
      std::vector<std::size_t> pick(k);
      for (std::size_t i = 0; i < k; ++i) pick[i] = i;
      for (;;) {
        std::vector<Literal> body;
        for (std::size_t i : pick) body.push_back(lits[i]);
        out.add_integrity(std::move(body));
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
      }
      continue;
    }

    // Only levels j <= min(k, n - i + 1) are reachable from suffix i.
    auto l = [&](std::size_t i, std::size_t j) {
      return out.atom(counter, {card_index, static_cast<int>(i), static_cast<int>(j)});
    };
    for (std::size_t i = n; i >= 1; --i) {
      const std::size_t top = std::min(k, n - i + 1);
      out.add_normal(l(i, 1), {lits[i - 1]});
      if (i < n) {
        for (std::size_t j = 1; j <= std::min(k, n - i); ++j) {
          out.add_normal(l(i, j), {pos(l(i + 1, j))});
          if (j + 1 <= top) out.add_normal(l(i, j + 1), {lits[i - 1], pos(l(i + 1, j))});
        }
      }
    }
    out.add_integrity({pos(l(1, k))});
  }
  return out;
}

}  // namespace casp
