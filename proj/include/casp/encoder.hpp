#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "casp/csp.hpp"
#include "casp/error.hpp"
#include "casp/nogoods.hpp"
#include "casp/program.hpp"
#include "casp/table.hpp"

namespace casp {

enum class EncodingType { Direct, Support, Range, Bound };

inline std::string_view to_string(EncodingType t) {
  switch (t) {
    case EncodingType::Direct: return "direct";
    case EncodingType::Support: return "support";
    case EncodingType::Range: return "range";
    case EncodingType::Bound: return "bound";
  }
  return "?";
}

inline EncodingType parse_encoding_type(std::string_view s) {
  if (s == "direct") return EncodingType::Direct;
  if (s == "support") return EncodingType::Support;
  if (s == "range") return EncodingType::Range;
  if (s == "bound") return EncodingType::Bound;
  throw Error("unknown encoding '" + std::string(s) + "'");
}

struct EncodingKind {
  EncodingType type = EncodingType::Direct;
  std::optional<std::size_t> hall_limit;  // Range and Bound only

  std::string to_string() const {
    std::string s(casp::to_string(type));
    if (hall_limit) s += " hall=" + std::to_string(*hall_limit);
    return s;
  }
};

/// What an encoding atom stands for. Indices are 1-based positions in the
/// variable's domain.
struct AtomMeaning {
  enum class Kind { Equals, AtMost, Within } kind;  // e(v,i), b(v,i), r(v,l,u)
  VarIndex var;
  std::size_t lo;
  std::size_t hi;
};

struct VarAtoms {
  std::vector<Value> values;                               // index i-1 holds value i
  std::vector<AtomId> equals;                              // e(v,i), Direct and Support
  std::vector<AtomId> at_most;                             // b(v,i), Bound
  std::map<std::pair<std::size_t, std::size_t>, AtomId> within;  // r(v,l,u), Range; Bound where used

  std::optional<AtomId> range(std::size_t l, std::size_t u) const {
    auto it = within.find({l, u});
    if (it == within.end()) return std::nullopt;
    return it->second;
  }
};

struct EncodingMap {
  std::vector<VarAtoms> vars;
  std::vector<std::optional<AtomMeaning>> meaning;  // by AtomId

  /// Looks the encoding atoms of `inst` up in `atoms` by name and arguments.
  static EncodingMap bind(const CspInstance& inst, EncodingType type, const AtomTable& atoms) {
    EncodingMap m;
    m.meaning.assign(atoms.size(), std::nullopt);
    for (VarIndex v = 0; v < inst.size(); ++v) {
      VarAtoms va;
      va.values = inst.variable(v).domain;
      const int vn = static_cast<int>(v + 1);
      const std::size_t d = va.values.size();
      auto need = [&](std::string_view name, std::vector<int> args) {
        auto id = atoms.find(name, args);
        if (!id) throw Error("encoding lacks atom " + Atom{std::string(name), args}.to_string());
        return *id;
      };
      for (std::size_t i = 1; i <= d; ++i) {
        if (type == EncodingType::Direct || type == EncodingType::Support) {
          AtomId a = need("e", {vn, static_cast<int>(i)});
          va.equals.push_back(a);
          m.meaning[a] = AtomMeaning{AtomMeaning::Kind::Equals, v, i, i};
        } else if (type == EncodingType::Bound) {
          AtomId a = need("b", {vn, static_cast<int>(i)});
          va.at_most.push_back(a);
          m.meaning[a] = AtomMeaning{AtomMeaning::Kind::AtMost, v, 1, i};
        }
      }
      if (type == EncodingType::Range || type == EncodingType::Bound) {
        for (std::size_t l = 1; l <= d; ++l) {
          for (std::size_t u = l; u <= d; ++u) {
            std::vector<int> args{vn, static_cast<int>(l), static_cast<int>(u)};
            auto a = type == EncodingType::Range ? std::optional<AtomId>(need("r", args)) : atoms.find("r", args);
            if (!a) continue;
            va.within.emplace(std::pair{l, u}, *a);
            m.meaning[*a] = AtomMeaning{AtomMeaning::Kind::Within, v, l, u};
          }
        }
      }
      m.vars.push_back(std::move(va));
    }
    return m;
  }
};

struct Encoding {
  GroundProgram program;
  EncodingMap map;
  EncodingKind kind;
  CspInstance source;
};

/// Candidate boxes examined before a table falls back to one box per
/// forbidden tuple.
inline constexpr std::size_t kBoxBudget = 4'000'000;

namespace detail {

// Accumulates one encoding. Atom arguments are 1-based: variable number, then
// domain index (or index range).
class EncodingBuilder {
 public:
  EncodingBuilder(const CspInstance& inst, EncodingKind kind) : inst_(inst), kind_(kind) {
    if (kind.hall_limit) {
      if (kind.type == EncodingType::Direct || kind.type == EncodingType::Support)
        throw Error("a Hall interval limit applies only to the range and bound encodings");
      if (*kind.hall_limit < 1) throw Error("Hall interval limit must be at least 1");
    }
    if (kind.type == EncodingType::Bound) bound_links_.resize(inst.size());
  }

  GroundProgram build() {
    for (VarIndex v = 0; v < inst_.size(); ++v) variable_rules(v);
    for (const auto& c : inst_.constraints()) {
      if (c.is_alldiff_like()) {
        switch (kind_.type) {
          case EncodingType::Direct: alldiff_direct(c); break;
          case EncodingType::Support: alldiff_support(c); break;
          case EncodingType::Range:
          case EncodingType::Bound: alldiff_intervals(c); break;
        }
      } else {
        switch (kind_.type) {
          case EncodingType::Direct: table_direct(c); break;
          case EncodingType::Support: table_support(c); break;
          case EncodingType::Range:
          case EncodingType::Bound: table_boxes(c); break;
        }
      }
    }
    return prog_.canonical();
  }

 private:
  std::size_t dsize(VarIndex v) const { return inst_.variable(v).domain.size(); }
  static int arg(std::size_t x) { return static_cast<int>(x); }

  AtomId e(VarIndex v, std::size_t i) { return prog_.atom("e", {arg(v + 1), arg(i)}); }
  AtomId b(VarIndex v, std::size_t i) { return prog_.atom("b", {arg(v + 1), arg(i)}); }
  AtomId r(VarIndex v, std::size_t l, std::size_t u) { return prog_.atom("r", {arg(v + 1), arg(l), arg(u)}); }

  // r(v,l,u) in the bound encoding, adding its link rules on first use.
  AtomId linked_range(VarIndex v, std::size_t l, std::size_t u) {
    AtomId a = r(v, l, u);
    if (!bound_links_[v].insert({l, u}).second) return a;
    std::vector<Literal> support;
    if (l >= 2) support.push_back(neg(b(v, l - 1)));
    support.push_back(pos(b(v, u)));
    prog_.add_normal(a, std::move(support));
    if (l >= 2) prog_.add_integrity({pos(a), pos(b(v, l - 1))});
    prog_.add_integrity({pos(a), neg(b(v, u))});
    return a;
  }

  AtomId interval_atom(VarIndex v, std::size_t l, std::size_t u) {
    return kind_.type == EncodingType::Bound ? linked_range(v, l, u) : r(v, l, u);
  }

  void variable_rules(VarIndex v) {
    const std::size_t d = dsize(v);
    switch (kind_.type) {
      case EncodingType::Direct:
      case EncodingType::Support: {
        std::vector<AtomId> heads;
        std::vector<Literal> none, some;
        for (std::size_t i = 1; i <= d; ++i) {
          heads.push_back(e(v, i));
          none.push_back(neg(e(v, i)));
          some.push_back(pos(e(v, i)));
        }
        prog_.add_choice(std::move(heads));
        prog_.add_integrity(std::move(none));
        prog_.add_cardinality(2, std::move(some));
        break;
      }
      case EncodingType::Range:
        for (std::size_t l = 1; l <= d; ++l) {
          for (std::size_t u = l; u <= d; ++u) {
            std::vector<Literal> body;
            if (l >= 2) body.push_back(neg(r(v, 1, l - 1)));
            if (u < d) body.push_back(neg(r(v, u + 1, d)));
            AtomId head = r(v, l, u);
            prog_.add_normal(head, std::move(body));
            if (l >= 2) prog_.add_integrity({pos(head), neg(r(v, l - 1, u))});
            if (u < d) prog_.add_integrity({pos(head), neg(r(v, l, u + 1))});
          }
        }
        break;
      case EncodingType::Bound: {
        std::vector<AtomId> heads;
        for (std::size_t i = 1; i <= d; ++i) heads.push_back(b(v, i));
        prog_.add_choice(std::move(heads));
        for (std::size_t i = 1; i < d; ++i) prog_.add_integrity({pos(b(v, i)), neg(b(v, i + 1))});
        prog_.add_integrity({neg(b(v, d))});
        break;
      }
    }
  }

  // 1-based index of `value` in the domain of `v`, if present.
  std::optional<std::size_t> index(VarIndex v, Value value) const {
    auto i = inst_.variable(v).index_of(value);
    if (!i) return std::nullopt;
    return *i + 1;
  }

  void alldiff_direct(const Constraint& c) {
    for (std::size_t p = 0; p < c.scope.size(); ++p) {
      for (std::size_t q = p + 1; q < c.scope.size(); ++q) {
        VarIndex v = c.scope[p], w = c.scope[q];
        for (Value x : inst_.variable(v).domain) {
          auto j = index(w, x);
          if (j) prog_.add_integrity({pos(e(v, *index(v, x))), pos(e(w, *j))});
        }
      }
    }
  }

  void alldiff_support(const Constraint& c) {
    for (Value x : inst_.value_union(c.scope)) {
      std::vector<Literal> taken, free;
      for (VarIndex v : c.scope) {
        if (auto i = index(v, x)) {
          taken.push_back(pos(e(v, *i)));
          free.push_back(neg(e(v, *i)));
        }
      }
      prog_.add_cardinality(2, std::move(taken));
      if (c.kind == ConstraintKind::Permutation) prog_.add_integrity(std::move(free));
    }
  }

  // Range and bound form: no interval of the value union holds more variables
  // than it has values; for a permutation, none holds fewer.
  void alldiff_intervals(const Constraint& c) {
    const auto values = inst_.value_union(c.scope);
    const std::size_t n = values.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t z = a; z < n; ++z) {
        const std::size_t size = z - a + 1;
        if (kind_.hall_limit && size > *kind_.hall_limit) continue;
        std::vector<std::pair<VarIndex, std::pair<std::size_t, std::size_t>>> ranges;
        for (VarIndex v : c.scope) {
          const auto& dom = inst_.variable(v).domain;
          auto first = std::lower_bound(dom.begin(), dom.end(), values[a]);
          auto last = std::upper_bound(dom.begin(), dom.end(), values[z]);
          if (first == last) continue;
          ranges.push_back({v, {static_cast<std::size_t>(first - dom.begin()) + 1,
                                static_cast<std::size_t>(last - dom.begin())}});
        }
        const std::size_t never_inside = c.scope.size() - ranges.size();
        const bool too_many = size + 1 <= ranges.size();
        const std::size_t room = n - size + 1;  // permutation: at most n - size variables outside
        const bool too_few = c.kind == ConstraintKind::Permutation &&
                             (room <= never_inside || room - never_inside <= ranges.size());
        if (!too_many && !too_few) continue;
        std::vector<Literal> inside, outside;
        for (const auto& [v, lu] : ranges) {
          AtomId at = interval_atom(v, lu.first, lu.second);
          inside.push_back(pos(at));
          outside.push_back(neg(at));
        }
        if (too_many) prog_.add_cardinality(size + 1, std::move(inside));
        if (too_few) {
          if (room <= never_inside) prog_.add_integrity({});
          else prog_.add_cardinality(room - never_inside, std::move(outside));
        }
      }
    }
  }

  void table_direct(const Constraint& c) {
    auto forbid = [&](const std::vector<std::size_t>& idx) {
      std::vector<Literal> body;
      for (std::size_t j = 0; j < idx.size(); ++j) body.push_back(pos(e(c.scope[j], idx[j] + 1)));
      prog_.add_integrity(std::move(body));
    };
    if (c.polarity == TablePolarity::Forbidden) {
      for (auto& idx : listed_indices(c)) forbid(idx);
      return;
    }
    TableGrid grid(inst_, c);
    for (const auto& idx : grid.forbidden()) forbid(idx);
  }

  // Forbidden tuples inside the current domains, as 0-based index tuples.
  std::vector<std::vector<std::size_t>> listed_indices(const Constraint& c) const {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& t : c.tuples) {
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < t.size(); ++j) {
        auto i = inst_.variable(c.scope[j]).index_of(t[j]);
        if (!i) break;
        idx.push_back(*i);
      }
      if (idx.size() == t.size()) out.push_back(std::move(idx));
    }
    return out;
  }

  void table_support(const Constraint& c) {
    const std::size_t k = c.scope.size();
    TableGrid grid(inst_, c);
    if (k == 1) {
      for (const auto& idx : grid.forbidden()) prog_.add_integrity({pos(e(c.scope[0], idx[0] + 1))});
      return;
    }
    // supported[p][q][i] = indices of position q compatible with index i at p.
    std::vector<std::vector<std::vector<std::set<std::size_t>>>> supported(
        k, std::vector<std::vector<std::set<std::size_t>>>(k));
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = 0; q < k; ++q) supported[p][q].resize(grid.dim(p));
    for (std::size_t cell = 0; cell < grid.cells(); ++cell) {
      if (!grid.allowed(cell)) continue;
      auto idx = grid.index_of(cell);
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = 0; q < k; ++q)
          if (p != q) supported[p][q][idx[p]].insert(idx[q]);
    }
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = 0; q < k; ++q) {
        if (p == q) continue;
        for (std::size_t i = 0; i < grid.dim(p); ++i) {
          std::vector<Literal> body{pos(e(c.scope[p], i + 1))};
          for (std::size_t j : supported[p][q][i]) body.push_back(neg(e(c.scope[q], j + 1)));
          prog_.add_integrity(std::move(body));
        }
      }
    }
    if (k >= 3) {
      for (const auto& idx : grid.forbidden()) {
        std::vector<Literal> body;
        for (std::size_t j = 0; j < k; ++j) body.push_back(pos(e(c.scope[j], idx[j] + 1)));
        prog_.add_integrity(std::move(body));
      }
    }
  }

  void box_rule(const Constraint& c, const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) {
    std::vector<Literal> body;
    for (std::size_t j = 0; j < lo.size(); ++j) {
      VarIndex v = c.scope[j];
      std::size_t l = lo[j] + 1, u = hi[j] + 1;
      if (kind_.type == EncodingType::Range) {
        body.push_back(pos(r(v, l, u)));
      } else {
        body.push_back(pos(b(v, u)));
        if (l >= 2) body.push_back(neg(b(v, l - 1)));
      }
    }
    prog_.add_integrity(std::move(body));
  }

  void table_boxes(const Constraint& c) {
    std::optional<TableGrid> grid;
    try {
      grid.emplace(inst_, c);
    } catch (const CapExceeded&) {
      if (c.polarity == TablePolarity::Allowed) throw;
    }
    std::optional<std::vector<TableGrid::Box>> boxes;
    if (grid) boxes = grid->maximal_forbidden_boxes(kBoxBudget);
    if (boxes) {
      for (const auto& box : *boxes) box_rule(c, box.lo, box.hi);
      return;
    }
    auto cells = grid ? grid->forbidden() : listed_indices(c);
    for (const auto& idx : cells) box_rule(c, idx, idx);
  }

  const CspInstance& inst_;
  EncodingKind kind_;
  GroundProgram prog_;
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> bound_links_;
};

}  // namespace detail

/// Compiles `inst` into a ground program under `kind`. Atom ids follow first
/// occurrence in the rules, so emitting and re-parsing the program reproduces
/// them.
inline Encoding encode(const CspInstance& inst, EncodingKind kind) {
  GroundProgram program = detail::EncodingBuilder(inst, kind).build();
  EncodingMap map = EncodingMap::bind(inst, kind.type, program.atoms());
  return Encoding{std::move(program), std::move(map), kind, inst};
}

/// Rebinds an already encoded program (e.g. parsed back from text).
inline Encoding attach(const CspInstance& inst, EncodingKind kind, GroundProgram program) {
  EncodingMap map = EncodingMap::bind(inst, kind.type, program.atoms());
  return Encoding{std::move(program), std::move(map), kind, inst};
}

/// Literals over encoding atoms (as entities) stating the current domains.
/// Bound states only their interval hull.
inline std::vector<Lit> seed_assignment(const Encoding& enc, const DomainState& state) {
  const auto& inst = enc.source;
  if (state.domains.size() != inst.size()) throw Error("domain state does not match instance");
  std::vector<Lit> out;
  for (VarIndex v = 0; v < inst.size(); ++v) {
    const auto& cur = state.domains[v];
    if (cur.empty()) throw Error("empty domain for variable '" + inst.variable(v).name + "'");
    const auto& decl = inst.variable(v);
    for (Value x : cur)
      if (!decl.contains(x))
        throw Error("value " + std::to_string(x) + " outside domain of '" + decl.name + "'");
    const auto& va = enc.map.vars[v];
    if (enc.kind.type == EncodingType::Bound) {
      std::size_t l = *decl.index_of(*std::min_element(cur.begin(), cur.end())) + 1;
      std::size_t u = *decl.index_of(*std::max_element(cur.begin(), cur.end())) + 1;
      if (u < decl.domain.size()) out.push_back(Lit::T(va.at_most[u - 1]));
      if (l >= 2) out.push_back(Lit::F(va.at_most[l - 2]));
      continue;
    }
    for (std::size_t i = 0; i < decl.domain.size(); ++i) {
      if (std::find(cur.begin(), cur.end(), decl.domain[i]) != cur.end()) continue;
      AtomId a = enc.kind.type == EncodingType::Range ? *va.range(i + 1, i + 1) : va.equals[i];
      out.push_back(Lit::F(a));
    }
  }
  return out;
}

/// Domains left by a (partial) assignment over the encoding's entities.
inline DomainState pruned_domains(const Encoding& enc, const std::vector<Truth>& values) {
  const auto& inst = enc.source;
  DomainState s;
  for (VarIndex v = 0; v < inst.size(); ++v) {
    const auto& decl = inst.variable(v);
    const auto& va = enc.map.vars[v];
    const std::size_t d = decl.domain.size();
    std::vector<Value> keep;
    if (enc.kind.type == EncodingType::Bound) {
      std::size_t l = 1, u = d;
      for (std::size_t i = 1; i <= d; ++i) {
        Truth t = values.at(va.at_most[i - 1]);
        if (t == Truth::False) l = std::max(l, i + 1);
        if (t == Truth::True) u = std::min(u, i);
      }
      for (std::size_t i = l; i <= u; ++i) keep.push_back(decl.domain[i - 1]);
    } else {
      for (std::size_t i = 1; i <= d; ++i) {
        AtomId a = enc.kind.type == EncodingType::Range ? *va.range(i, i) : va.equals[i - 1];
        if (values.at(a) != Truth::False) keep.push_back(decl.domain[i - 1]);
      }
    }
    s.domains.push_back(std::move(keep));
  }
  return s;
}

/// The CSP solution represented by a total solution of the encoding.
inline CspAssignment decode(const Encoding& enc, const std::vector<Truth>& values) {
  const auto& inst = enc.source;
  CspAssignment out;
  for (VarIndex v = 0; v < inst.size(); ++v) {
    const auto& decl = inst.variable(v);
    const auto& va = enc.map.vars[v];
    const std::size_t d = decl.domain.size();
    std::optional<std::size_t> found;
    bool unique = true;
    for (std::size_t i = 1; i <= d; ++i) {
      bool on = false;
      switch (enc.kind.type) {
        case EncodingType::Direct:
        case EncodingType::Support: on = values.at(va.equals[i - 1]) == Truth::True; break;
        case EncodingType::Range: on = values.at(*va.range(i, i)) == Truth::True; break;
        case EncodingType::Bound: on = values.at(va.at_most[i - 1]) == Truth::True; break;
      }
      if (!on) continue;
      if (!found) found = i;
      else if (enc.kind.type != EncodingType::Bound) unique = false;
      if (enc.kind.type == EncodingType::Bound) break;
    }
    if (!found || !unique) throw Error("no unique value for variable '" + decl.name + "'");
    out.values.push_back(decl.domain[*found - 1]);
  }
  return out;
}

}  // namespace casp
