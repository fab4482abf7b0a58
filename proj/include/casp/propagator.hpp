#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "casp/nogoods.hpp"

namespace casp {

using NogoodId = std::uint32_t;

inline constexpr NogoodId kDecision = std::numeric_limits<NogoodId>::max();
inline constexpr NogoodId kNoReason = kDecision - 1;  // level-0 seed or unit nogood

enum class AddStatus { Success, Unit, Conflict };

struct AddResult {
  AddStatus status;
  std::optional<NogoodId> id;  // absent for tautologies and unit nogoods
};

/// Assignment trail plus watched nogoods. Static nogoods come from a store;
/// learned ones may be added and removed later.
class Propagator {
 public:
  explicit Propagator(const NogoodStore& store) : Propagator(store.entity_count(), store.nogoods) {}

  Propagator(std::size_t entity_count, const std::vector<Nogood>& nogoods)
      : value_(entity_count, Truth::Unassigned),
        level_(entity_count, 0),
        reason_(entity_count, kNoReason),
        position_(entity_count, 0),
        watches_(2 * entity_count) {
    for (const auto& n : nogoods) {
      for (Lit l : n)
        if (l.entity() >= entity_count) throw std::out_of_range("nogood literal outside entity range");
      auto norm = normalize_nogood(n);
      if (!norm) continue;
      if (norm->empty()) {
        if (!pending_conflict_) pending_conflict_ = install(*norm, Origin::Static);
        continue;
      }
      NogoodId id = install(*norm, Origin::Static);
      if (norm->size() == 1) {
        Lit l = (*norm)[0];
        if (!assign(~l, id) && !pending_conflict_) pending_conflict_ = id;
      } else {
        watch(id);
      }
    }
    static_count_ = nogoods_.size();
  }

  std::size_t entity_count() const { return value_.size(); }
  Truth value(Entity e) const { return value_[e]; }
  bool assigned(Entity e) const { return value_[e] != Truth::Unassigned; }
  bool holds(Lit l) const { return value_[l.entity()] == (l.is_true() ? Truth::True : Truth::False); }
  bool is_false(Lit l) const { return holds(~l); }
  std::size_t level_of(Entity e) const { return level_[e]; }
  NogoodId reason_of(Entity e) const { return reason_[e]; }
  std::size_t trail_position(Entity e) const { return position_[e]; }
  const std::vector<Lit>& trail() const { return trail_; }
  const std::vector<Truth>& values() const { return value_; }
  std::size_t level() const { return level_starts_.size(); }
  bool total() const { return trail_.size() == value_.size(); }

  std::size_t nogood_count() const { return nogoods_.size(); }
  std::size_t static_count() const { return static_count_; }
  const Nogood& nogood(NogoodId id) const { return nogoods_.at(id).lits; }
  bool is_live(NogoodId id) const { return !nogoods_.at(id).deleted; }
  bool is_learned(NogoodId id) const { return nogoods_.at(id).origin == Origin::Learned; }
  std::uint64_t propagations() const { return propagations_; }

  void new_level() { level_starts_.push_back(trail_.size()); }

  /// Makes `l` hold at the current level. False if its complement holds.
  bool assign(Lit l, NogoodId reason) {
    Entity e = l.entity();
    if (value_[e] != Truth::Unassigned) return holds(l);
    value_[e] = l.is_true() ? Truth::True : Truth::False;
    level_[e] = level();
    reason_[e] = reason;
    position_[e] = trail_.size();
    trail_.push_back(l);
    return true;
  }

  /// Unit propagation to a fixpoint. Returns the violated nogood on conflict.
  std::optional<NogoodId> propagate() {
    if (pending_conflict_) {
      auto c = *pending_conflict_;
      if (level() == 0) return c;
      pending_conflict_.reset();
    }
    while (head_ < trail_.size()) {
      Lit p = trail_[head_++];
      auto& ws = watches_[p.code()];
      std::size_t i = 0, j = 0;
      std::optional<NogoodId> conflict;
      for (; i < ws.size(); ++i) {
        NogoodId id = ws[i];
        auto& ng = nogoods_[id];
        if (ng.deleted) continue;
        auto& lits = ng.lits;
        if (lits[0] == p) std::swap(lits[0], lits[1]);
        // lits[1] == p now holds.
        if (is_false(lits[0])) {
          ws[j++] = id;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (!holds(lits[k])) {
            std::swap(lits[1], lits[k]);
            watches_[lits[1].code()].push_back(id);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = id;
        if (!assigned(lits[0].entity())) {
          assign(~lits[0], id);
          ++propagations_;
        } else {
          conflict = id;
          for (++i; i < ws.size(); ++i) ws[j++] = ws[i];
          break;
        }
      }
      ws.resize(j);
      if (conflict) {
        head_ = trail_.size();
        return conflict;
      }
    }
    return std::nullopt;
  }

  /// Installs a nogood under the current assignment, reporting whether it is
  /// satisfied, unit (its last literal's complement is then assigned) or
  /// violated. A unit result is asserted at the current level, so callers
  /// backjump to the assertion level first. Unit nogoods need level 0.
  AddResult add_nogood(Nogood n, bool learned = true) {
    auto norm = normalize_nogood(std::move(n));
    if (!norm) return {AddStatus::Success, std::nullopt};
    auto& lits = *norm;
    if (lits.empty()) return {AddStatus::Conflict, install(lits, origin(learned))};
    if (lits.size() == 1) {
      if (level() != 0) throw std::logic_error("unit nogood added above level 0");
      NogoodId id = install(lits, origin(learned));
      if (holds(lits[0])) return {AddStatus::Conflict, id};
      if (is_false(lits[0])) return {AddStatus::Success, id};
      assign(~lits[0], id);
      ++propagations_;
      return {AddStatus::Unit, id};
    }
    // Watch order: not-holding literals first, then holding ones latest first.
    std::stable_sort(lits.begin(), lits.end(), [&](Lit a, Lit b) {
      bool ha = holds(a), hb = holds(b);
      if (ha != hb) return !ha;
      if (ha) return position_[a.entity()] > position_[b.entity()];
      return false;
    });
    NogoodId id = install(lits, origin(learned));
    watch(id);
    const auto& w = nogoods_[id].lits;
    if (holds(w[0])) return {AddStatus::Conflict, id};
    if (!holds(w[1])) return {AddStatus::Success, id};
    if (is_false(w[0])) return {AddStatus::Success, id};
    assign(~w[0], id);
    ++propagations_;
    return {AddStatus::Unit, id};
  }

  /// Removes a learned nogood. Watches are dropped lazily.
  void remove_nogood(NogoodId id) {
    auto& ng = nogoods_.at(id);
    if (ng.origin == Origin::Static) throw std::logic_error("static nogoods cannot be removed");
    ng.deleted = true;
    ng.lits.clear();
    ng.lits.shrink_to_fit();
  }

  /// Whether `id` is the reason of a current assignment.
  bool locked(NogoodId id) const {
    const auto& ng = nogoods_.at(id);
    if (ng.deleted || ng.lits.empty()) return false;
    Entity e = ng.lits[0].entity();
    return assigned(e) && reason_[e] == id;
  }

  /// Undoes every assignment above `target` level, calling `on_unassign` for
  /// each in reverse trail order.
  void backjump(std::size_t target, const std::function<void(Lit)>& on_unassign = {}) {
    if (target >= level()) return;
    std::size_t keep = level_starts_[target];
    for (std::size_t i = trail_.size(); i-- > keep;) {
      Lit l = trail_[i];
      value_[l.entity()] = Truth::Unassigned;
      reason_[l.entity()] = kNoReason;
      if (on_unassign) on_unassign(l);
    }
    trail_.resize(keep);
    level_starts_.resize(target);
    head_ = std::min(head_, keep);
  }

 private:
  enum class Origin : std::uint8_t { Static, Learned, Blocking };
  struct Stored {
    Nogood lits;
    Origin origin;
    bool deleted = false;
  };

  static Origin origin(bool learned) { return learned ? Origin::Learned : Origin::Blocking; }

  NogoodId install(const Nogood& lits, Origin o) {
    nogoods_.push_back({lits, o, false});
    return static_cast<NogoodId>(nogoods_.size() - 1);
  }

  void watch(NogoodId id) {
    const auto& lits = nogoods_[id].lits;
    watches_[lits[0].code()].push_back(id);
    watches_[lits[1].code()].push_back(id);
  }

  std::vector<Truth> value_;
  std::vector<std::uint32_t> level_;
  std::vector<NogoodId> reason_;
  std::vector<std::size_t> position_;
  std::vector<std::vector<NogoodId>> watches_;  // by literal code: nogoods to visit when it holds
  std::vector<Stored> nogoods_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> level_starts_;
  std::size_t head_ = 0;
  std::size_t static_count_ = 0;
  std::optional<NogoodId> pending_conflict_;
  std::uint64_t propagations_ = 0;
};

}  // namespace casp
