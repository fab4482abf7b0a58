#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "casp/nogoods.hpp"
#include "casp/propagator.hpp"

namespace casp {

enum class Heuristic { Activity, Lexicographic };
enum class PhasePolicy { Saved, AlwaysFalse, AlwaysTrue };

struct SolverConfig {
  Heuristic heuristic = Heuristic::Activity;
  PhasePolicy phase = PhasePolicy::Saved;  // saved phases start at F
  double activity_decay = 0.95;
  bool restarts = true;
  std::uint64_t restart_unit = 64;        // conflicts per Luby unit
  double learned_cap_factor = 10.0;      // learned store cap relative to static size
  std::uint64_t seed = 0;
  double random_decision_rate = 0.0;
  std::optional<std::uint64_t> conflict_budget;
  std::optional<double> time_limit_seconds;
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned = 0;
  double time_ms = 0;

  std::string to_string() const {
    std::ostringstream out;
    out << "decisions=" << decisions << " conflicts=" << conflicts << " propagations=" << propagations
        << " restarts=" << restarts << " learned=" << learned << " time_ms=" << static_cast<long long>(time_ms);
    return out.str();
  }
};

enum class SolveStatus { Sat, Unsat, Unknown };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  std::vector<Truth> assignment;  // total when Sat
  SolverStats stats;
};

struct EnumerateResult {
  SolveStatus status = SolveStatus::Unknown;  // Unsat once the space is exhausted
  std::vector<std::vector<Truth>> solutions;
  SolverStats stats;
};

struct Analysis {
  Nogood learned;          // learned[0] is the unique literal from the conflict level
  std::size_t level = 0;   // backjump target
};

/// i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ...
inline std::uint64_t luby(std::uint64_t i) {
  for (;;) {
    std::uint64_t k = 1;
    while ((std::uint64_t{1} << k) - 1 < i) ++k;
    if (i == (std::uint64_t{1} << k) - 1) return std::uint64_t{1} << (k - 1);
    i -= (std::uint64_t{1} << (k - 1)) - 1;
  }
}

/// Conflict-driven nogood learning over a nogood store.
class Solver {
 public:
  explicit Solver(const NogoodStore& store, SolverConfig cfg = {})
      : Solver(store.entity_count(), store.nogoods, cfg) {}

  Solver(std::size_t entity_count, const std::vector<Nogood>& nogoods, SolverConfig cfg = {})
      : cfg_(cfg),
        prop_(entity_count, nogoods),
        activity_(entity_count, 0.0),
        phase_(entity_count, false),
        heap_index_(entity_count, kAbsent),
        rng_(cfg.seed) {
    for (Entity e = 0; e < entity_count; ++e) heap_insert(e);
  }

  Propagator& propagator() { return prop_; }
  const Propagator& propagator() const { return prop_; }
  const SolverStats& stats() const { return stats_; }

  /// Runs until a solution, unsatisfiability, or budget exhaustion.
  SolveResult solve() {
    auto start = std::chrono::steady_clock::now();
    SolveResult r;
    r.status = search(start);
    if (r.status == SolveStatus::Sat) r.assignment = prop_.values();
    finish(r.stats, start);
    return r;
  }

  /// Up to `k` distinct solutions, each blocked by its decision literals.
  EnumerateResult enumerate(std::size_t k) {
    if (k == 0) throw Error("enumeration limit must be at least 1");
    auto start = std::chrono::steady_clock::now();
    EnumerateResult r;
    while (r.solutions.size() < k) {
      SolveStatus s = search(start);
      if (s != SolveStatus::Sat) {
        r.status = s;
        finish(r.stats, start);
        return r;
      }
      r.solutions.push_back(prop_.values());
      if (!block_current()) {
        exhausted_ = true;
        r.status = SolveStatus::Unsat;
        finish(r.stats, start);
        return r;
      }
    }
    r.status = SolveStatus::Sat;
    finish(r.stats, start);
    return r;
  }

  // Single steps, exposed for tests.

  void decide(Lit l) {
    prop_.new_level();
    if (!prop_.assign(l, kDecision)) throw std::logic_error("decision on an assigned entity");
    ++stats_.decisions;
  }

  std::optional<NogoodId> propagate() {
    auto before = prop_.propagations();
    auto c = prop_.propagate();
    stats_.propagations += prop_.propagations() - before;
    return c;
  }

  /// First-UIP analysis of a conflict above level 0.
  Analysis analyze(NogoodId conflict) {
    const std::size_t current = prop_.level();
    if (current == 0) throw std::logic_error("conflict at level 0 has no analysis");
    seen_.assign(prop_.entity_count(), false);
    Nogood tail;
    std::size_t open = 0;
    auto absorb = [&](const Nogood& n, std::optional<Entity> skip) {
      for (Lit l : n) {
        Entity e = l.entity();
        if ((skip && e == *skip) || seen_[e]) continue;
        if (prop_.level_of(e) == 0) continue;
        seen_[e] = true;
        bump(e);
        if (prop_.level_of(e) == current) ++open;
        else tail.push_back(l);
      }
    };
    bump_nogood(conflict);
    absorb(prop_.nogood(conflict), std::nullopt);
    std::size_t idx = prop_.trail().size();
    Lit uip;
    for (;;) {
      do {
        --idx;
      } while (!seen_[prop_.trail()[idx].entity()]);
      Lit implied = prop_.trail()[idx];
      --open;
      if (open == 0) {
        uip = implied;
        break;
      }
      NogoodId reason = prop_.reason_of(implied.entity());
      bump_nogood(reason);
      // The reason holds ~implied; the rest of it replaces `implied`.
      absorb(prop_.nogood(reason), implied.entity());
    }
    Analysis a;
    a.learned.push_back(uip);
    std::size_t best = 0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
      if (best == 0 || prop_.level_of(tail[i].entity()) > prop_.level_of(tail[best - 1].entity()))
        best = i + 1;
    }
    if (best) std::swap(tail[0], tail[best - 1]);
    for (Lit l : tail) a.learned.push_back(l);
    a.level = tail.empty() ? 0 : prop_.level_of(tail[0].entity());
    return a;
  }

  void backjump(std::size_t level) {
    prop_.backjump(level, [&](Lit l) {
      phase_[l.entity()] = l.is_true();
      heap_insert(l.entity());
      if (l.entity() < lex_next_) lex_next_ = l.entity();
    });
  }

  AddResult add_nogood(Nogood n, bool learned = true) {
    auto r = prop_.add_nogood(std::move(n), learned);
    if (r.id && learned) {
      learned_ids_.push_back(*r.id);
      nogood_activity_.resize(prop_.nogood_count(), 0.0);
      nogood_activity_[*r.id] = nogood_inc_;
      ++stats_.learned;
    }
    if (r.status == AddStatus::Unit) ++stats_.propagations;
    return r;
  }

 private:
  static constexpr std::size_t kAbsent = SIZE_MAX;

  SolveStatus search(std::chrono::steady_clock::time_point start) {
    if (exhausted_) return SolveStatus::Unsat;
    for (;;) {
      auto c = propagate();
      if (c) {
        ++stats_.conflicts;
        ++conflicts_since_restart_;
        if (prop_.level() == 0) {
          exhausted_ = true;
          return SolveStatus::Unsat;
        }
        Analysis a = analyze(*c);
        backjump(a.level);
        auto r = add_nogood(std::move(a.learned), true);
        if (r.status == AddStatus::Conflict) {
          exhausted_ = prop_.level() == 0;
          if (exhausted_) return SolveStatus::Unsat;
        }
        activity_inc_ /= cfg_.activity_decay;
        nogood_inc_ /= 0.999;
        if (cfg_.conflict_budget && stats_.conflicts >= *cfg_.conflict_budget) return SolveStatus::Unknown;
        if (out_of_time(start)) return SolveStatus::Unknown;
        continue;
      }
      if (cfg_.restarts && conflicts_since_restart_ >= luby(restart_index_) * cfg_.restart_unit) {
        conflicts_since_restart_ = 0;
        ++restart_index_;
        ++stats_.restarts;
        backjump(0);
        continue;
      }
      reduce_learned();
      auto e = pick_entity();
      if (!e) return SolveStatus::Sat;
      if ((stats_.decisions & 1023) == 0 && out_of_time(start)) return SolveStatus::Unknown;
      bool positive = false;
      switch (cfg_.phase) {
        case PhasePolicy::Saved: positive = phase_[*e]; break;
        case PhasePolicy::AlwaysFalse: positive = false; break;
        case PhasePolicy::AlwaysTrue: positive = true; break;
      }
      decide(positive ? Lit::T(*e) : Lit::F(*e));
    }
  }

  // Adds the nogood of the current decisions after backjumping below the last
  // one. False when there are no decisions, i.e. nothing is left to find.
  bool block_current() {
    Nogood decisions;
    for (Lit l : prop_.trail())
      if (prop_.reason_of(l.entity()) == kDecision) decisions.push_back(l);
    if (decisions.empty()) return false;
    backjump(decisions.size() - 1);
    auto r = add_nogood(std::move(decisions), false);
    if (r.status == AddStatus::Conflict && prop_.level() == 0) return false;
    return true;
  }

  bool out_of_time(std::chrono::steady_clock::time_point start) const {
    if (!cfg_.time_limit_seconds) return false;
    std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start;
    return spent.count() >= *cfg_.time_limit_seconds;
  }

  void finish(SolverStats& out, std::chrono::steady_clock::time_point start) {
    stats_.time_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out = stats_;
  }

  std::optional<Entity> pick_entity() {
    if (cfg_.random_decision_rate > 0 &&
        std::uniform_real_distribution<double>(0, 1)(rng_) < cfg_.random_decision_rate) {
      std::vector<Entity> free;
      for (Entity e = 0; e < prop_.entity_count(); ++e)
        if (!prop_.assigned(e)) free.push_back(e);
      if (!free.empty()) return free[rng_() % free.size()];
    }
    if (cfg_.heuristic == Heuristic::Lexicographic) {
      while (lex_next_ < prop_.entity_count() && prop_.assigned(lex_next_)) ++lex_next_;
      if (lex_next_ == prop_.entity_count()) return std::nullopt;
      return lex_next_;
    }
    while (!heap_.empty()) {
      Entity e = heap_pop();
      if (!prop_.assigned(e)) return e;
    }
    return std::nullopt;
  }

  void bump(Entity e) {
    activity_[e] += activity_inc_;
    if (activity_[e] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      activity_inc_ *= 1e-100;
    }
    if (heap_index_[e] != kAbsent) sift_up(heap_index_[e]);
  }

  void bump_nogood(NogoodId id) {
    if (!prop_.is_learned(id) || id >= nogood_activity_.size()) return;
    nogood_activity_[id] += nogood_inc_;
    if (nogood_activity_[id] > 1e100) {
      for (auto& a : nogood_activity_) a *= 1e-100;
      nogood_inc_ *= 1e-100;
    }
  }

  // Drops the less active half of the unlocked learned nogoods once the live
  // count passes the cap.
  void reduce_learned() {
    const double cap = cfg_.learned_cap_factor * static_cast<double>(std::max<std::size_t>(prop_.static_count(), 1));
    if (static_cast<double>(learned_ids_.size()) <= cap) return;
    std::vector<NogoodId> candidates;
    std::vector<NogoodId> kept;
    for (NogoodId id : learned_ids_) {
      if (prop_.locked(id)) kept.push_back(id);
      else candidates.push_back(id);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](NogoodId a, NogoodId b) { return nogood_activity_[a] < nogood_activity_[b]; });
    std::size_t drop = candidates.size() / 2;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (i < drop) prop_.remove_nogood(candidates[i]);
      else kept.push_back(candidates[i]);
    }
    std::sort(kept.begin(), kept.end());
    learned_ids_ = std::move(kept);
  }

  // Max-heap on activity; ties go to the lower entity index.
  bool before(Entity a, Entity b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }
  void heap_insert(Entity e) {
    if (heap_index_[e] != kAbsent) return;
    heap_index_[e] = heap_.size();
    heap_.push_back(e);
    sift_up(heap_.size() - 1);
  }
  Entity heap_pop() {
    Entity top = heap_[0];
    heap_index_[top] = kAbsent;
    Entity last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_index_[last] = 0;
      sift_down(0);
    }
    return top;
  }
  void sift_up(std::size_t i) {
    Entity e = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!before(e, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_index_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = e;
    heap_index_[e] = i;
  }
  void sift_down(std::size_t i) {
    Entity e = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size()) break;
      if (child + 1 < heap_.size() && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], e)) break;
      heap_[i] = heap_[child];
      heap_index_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = e;
    heap_index_[e] = i;
  }

  SolverConfig cfg_;
  Propagator prop_;
  SolverStats stats_;
  std::vector<double> activity_;
  double activity_inc_ = 1.0;
  std::vector<bool> phase_;
  std::vector<std::size_t> heap_index_;
  std::vector<Entity> heap_;
  Entity lex_next_ = 0;
  std::vector<bool> seen_;
  std::vector<NogoodId> learned_ids_;
  std::vector<double> nogood_activity_;
  double nogood_inc_ = 1.0;
  std::uint64_t conflicts_since_restart_ = 0;
  std::uint64_t restart_index_ = 1;
  bool exhausted_ = false;
  std::mt19937_64 rng_;
};

inline SolveResult solve(const NogoodStore& store, const SolverConfig& cfg = {}) {
  return Solver(store, cfg).solve();
}

inline EnumerateResult enumerate(const NogoodStore& store, std::size_t k, const SolverConfig& cfg = {}) {
  return Solver(store, cfg).enumerate(k);
}

}  // namespace casp
