#pragma once

#include <optional>
#include <random>
#include <vector>

#include "casp/cardinality.hpp"
#include "casp/csp.hpp"
#include "casp/encoder.hpp"
#include "casp/oracle.hpp"
#include "casp/pipeline.hpp"
#include "casp/random_csp.hpp"

namespace casp {

struct CheckOptions {
  EncodingKind kind;
  Consistency level = Consistency::ArcBinary;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::size_t states_per_trial = 50;
  CardinalityMethod method = CardinalityMethod::Counter;
  RandomCspOptions csp;
};

struct Disagreement {
  CspInstance instance;
  DomainState seed;
  DomainState expected;  // oracle
  DomainState actual;    // propagation
};

struct CheckReport {
  std::size_t trials = 0;
  std::size_t agreed = 0;
  std::optional<Disagreement> witness;  // smallest disagreement found, shrunk
};

/// Propagated domains with any empty domain widened to all-empty, matching
/// the oracle's convention for inconsistent states.
inline DomainState propagate_normalized(const Prepared& p, const DomainState& seed) {
  DomainState s = propagate_state(p, seed);
  if (s.inconsistent())
    for (auto& d : s.domains) d.clear();
  return s;
}

namespace detail {

inline std::size_t witness_weight(const Disagreement& d) {
  std::size_t w = d.instance.size() * 1000 + d.instance.constraints().size() * 100;
  for (const auto& v : d.instance.variables()) w += v.domain.size();
  return w;
}

// Drops constraints one at a time while the disagreement persists.
inline Disagreement shrink(Disagreement d, const CheckOptions& o) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t skip = 0; skip < d.instance.constraints().size(); ++skip) {
      CspInstance smaller;
      for (const auto& v : d.instance.variables()) smaller.add_variable(v.name, v.domain);
      for (std::size_t c = 0; c < d.instance.constraints().size(); ++c)
        if (c != skip) smaller.add_constraint(d.instance.constraints()[c]);
      auto expected = consistency_oracle(smaller, d.seed, o.level);
      auto actual = propagate_normalized(prepare(smaller, o.kind, o.method), d.seed);
      if (expected != actual) {
        d = Disagreement{std::move(smaller), d.seed, std::move(expected), std::move(actual)};
        changed = true;
        break;
      }
    }
  }
  return d;
}

}  // namespace detail

/// Compares the propagation fixpoint of an encoding with a consistency oracle
/// on seeded random instances and domain states. A trial agrees when every
/// state of its instance agrees. Bound-level checks use interval seeds.
inline CheckReport run_consistency_check(const CheckOptions& o) {
  std::mt19937_64 rng(o.seed);
  CheckReport report;
  const bool intervals = o.level == Consistency::Bound;
  for (std::size_t t = 0; t < o.trials; ++t) {
    CspInstance inst = random_csp(rng, o.csp);
    Prepared p = prepare(inst, o.kind, o.method);
    bool agree = true;
    for (std::size_t s = 0; s < o.states_per_trial; ++s) {
      DomainState seed = random_state(inst, rng, intervals);
      auto expected = consistency_oracle(inst, seed, o.level);
      auto actual = propagate_normalized(p, seed);
      if (expected == actual) continue;
      agree = false;
      Disagreement d{inst, seed, std::move(expected), std::move(actual)};
      if (!report.witness || detail::witness_weight(d) < detail::witness_weight(*report.witness))
        report.witness = std::move(d);
    }
    ++report.trials;
    if (agree) ++report.agreed;
  }
  if (report.witness) report.witness = detail::shrink(std::move(*report.witness), o);
  return report;
}

}  // namespace casp
