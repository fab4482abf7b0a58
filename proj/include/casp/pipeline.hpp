#pragma once

#include <optional>
#include <vector>

#include "casp/cardinality.hpp"
#include "casp/csp.hpp"
#include "casp/encoder.hpp"
#include "casp/nogoods.hpp"
#include "casp/propagator.hpp"
#include "casp/solver.hpp"

namespace casp {

/// An encoding together with its normalized program and completion.
struct Prepared {
  Encoding encoding;
  GroundProgram normalized;
  NogoodStore store;
};

inline Prepared prepare(Encoding enc, CardinalityMethod method = CardinalityMethod::Counter) {
  GroundProgram normalized = normalize_cardinality(enc.program, method);
  NogoodStore store = completion_nogoods(normalized);
  return Prepared{std::move(enc), std::move(normalized), std::move(store)};
}

inline Prepared prepare(const CspInstance& inst, EncodingKind kind,
                        CardinalityMethod method = CardinalityMethod::Counter) {
  return prepare(encode(inst, kind), method);
}

/// Seeds `state` at level 0, propagates to a fixpoint and reads the domains
/// back. A conflict yields all-empty domains.
inline DomainState propagate_state(const Prepared& p, const DomainState& state) {
  Propagator prop(p.store);
  bool ok = true;
  for (Lit l : seed_assignment(p.encoding, state)) ok = prop.assign(l, kNoReason) && ok;
  if (ok && !prop.propagate()) return pruned_domains(p.encoding, prop.values());
  DomainState empty;
  empty.domains.resize(state.domains.size());
  return empty;
}

struct InstanceResult {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<CspAssignment> solution;
  SolverStats stats;
};

inline InstanceResult solve_instance(const Prepared& p, const SolverConfig& cfg = {}) {
  SolveResult r = solve(p.store, cfg);
  InstanceResult out{r.status, std::nullopt, r.stats};
  if (r.status == SolveStatus::Sat) out.solution = decode(p.encoding, r.assignment);
  return out;
}

struct InstanceEnumeration {
  SolveStatus status = SolveStatus::Unknown;  // Unsat when every solution was found
  std::vector<CspAssignment> solutions;       // sorted, duplicate-free
  SolverStats stats;
};

inline InstanceEnumeration enumerate_instance(const Prepared& p, std::size_t k, const SolverConfig& cfg = {}) {
  EnumerateResult r = enumerate(p.store, k, cfg);
  InstanceEnumeration out{r.status, {}, r.stats};
  for (const auto& a : r.solutions) out.solutions.push_back(decode(p.encoding, a));
  std::sort(out.solutions.begin(), out.solutions.end());
  out.solutions.erase(std::unique(out.solutions.begin(), out.solutions.end()), out.solutions.end());
  return out;
}

}  // namespace casp
