#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "casp/csp.hpp"
#include "casp/encoder.hpp"
#include "casp/error.hpp"
#include "casp/pipeline.hpp"
#include "casp/random_csp.hpp"

namespace casp {

// ---------------------------------------------------------------- pigeons

/// n pigeons, n - 1 holes, all pigeons in distinct holes.
inline CspInstance gen_php(std::size_t n) {
  if (n < 2) throw Error("pigeon-hole instances need at least 2 pigeons");
  CspInstance inst;
  std::vector<Value> holes;
  for (std::size_t h = 1; h < n; ++h) holes.push_back(static_cast<Value>(h));
  std::vector<VarIndex> all;
  for (std::size_t p = 1; p <= n; ++p) all.push_back(inst.add_variable("p" + std::to_string(p), holes));
  inst.add_constraint(Constraint::all_different(all));
  return inst;
}

// ---------------------------------------------------------------- Latin squares

inline std::string cell_name(std::size_t row, std::size_t col) {
  return "c" + std::to_string(row) + "_" + std::to_string(col);
}

/// A complete Latin square over 1..order (row-major), found by backtracking
/// that fills the most constrained cell first and tries values in random order.
inline std::vector<Value> random_latin_square(std::size_t order, std::mt19937_64& rng) {
  if (order < 1) throw Error("Latin square order must be positive");
  const std::size_t n = order;
  for (;;) {
    std::vector<Value> grid(n * n, 0);
    std::vector<std::vector<bool>> row_used(n, std::vector<bool>(n + 1)), col_used = row_used;
    std::size_t budget = 20 * n * n * n + 1000;
    std::function<bool(std::size_t)> fill = [&](std::size_t placed) -> bool {
      if (placed == n * n) return true;
      if (budget-- == 0) return false;
      std::size_t best = SIZE_MAX, best_count = n + 1;
      for (std::size_t c = 0; c < n * n; ++c) {
        if (grid[c]) continue;
        std::size_t count = 0;
        for (std::size_t v = 1; v <= n; ++v)
          if (!row_used[c / n][v] && !col_used[c % n][v]) ++count;
        if (count < best_count) {
          best = c;
          best_count = count;
          if (count <= 1) break;
        }
      }
      if (best_count == 0) return false;
      std::vector<Value> values;
      for (std::size_t v = 1; v <= n; ++v)
        if (!row_used[best / n][v] && !col_used[best % n][v]) values.push_back(static_cast<Value>(v));
      shuffle(values, rng);
      for (Value v : values) {
        grid[best] = v;
        row_used[best / n][v] = col_used[best % n][v] = true;
        if (fill(placed + 1)) return true;
        row_used[best / n][v] = col_used[best % n][v] = false;
        grid[best] = 0;
        if (budget == 0) return false;
      }
      return false;
    };
    if (fill(0)) return grid;
  }
}

inline void add_latin_constraints(CspInstance& inst, std::size_t order, bool permutation) {
  auto add = [&](std::vector<VarIndex> scope) {
    inst.add_constraint(permutation ? Constraint::permutation(std::move(scope))
                                    : Constraint::all_different(std::move(scope)));
  };
  for (std::size_t r = 0; r < order; ++r) {
    std::vector<VarIndex> scope;
    for (std::size_t c = 0; c < order; ++c) scope.push_back(r * order + c);
    add(std::move(scope));
  }
  for (std::size_t c = 0; c < order; ++c) {
    std::vector<VarIndex> scope;
    for (std::size_t r = 0; r < order; ++r) scope.push_back(r * order + c);
    add(std::move(scope));
  }
}

/// Quasigroup completion: a random complete Latin square with `fill_percent`
/// of its cells kept as assignments.
inline CspInstance gen_qcp(std::size_t order, unsigned fill_percent, std::uint64_t seed,
                           bool permutation = false) {
  if (order < 2) throw Error("quasigroup completion needs order at least 2");
  if (fill_percent > 100) throw Error("fill percentage must be within 0..100");
  std::mt19937_64 rng(seed);
  auto square = random_latin_square(order, rng);
  CspInstance inst;
  std::vector<Value> symbols;
  for (std::size_t v = 1; v <= order; ++v) symbols.push_back(static_cast<Value>(v));
  for (std::size_t r = 1; r <= order; ++r)
    for (std::size_t c = 1; c <= order; ++c) inst.add_variable(cell_name(r, c), symbols);
  add_latin_constraints(inst, order, permutation);
  std::vector<std::size_t> cells(order * order);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  shuffle(cells, rng);
  const std::size_t keep = (cells.size() * fill_percent + 50) / 100;
  cells.resize(keep);
  std::sort(cells.begin(), cells.end());
  for (std::size_t c : cells) inst.assign(c, square[c]);
  return inst;
}

// ---------------------------------------------------------------- quasigroup existence

enum class QgAxiom { QG3, QG4, QG5, QG6, QG7 };

inline QgAxiom parse_axiom(std::string_view s) {
  if (s == "QG3" || s == "qg3") return QgAxiom::QG3;
  if (s == "QG4" || s == "qg4") return QgAxiom::QG4;
  if (s == "QG5" || s == "qg5") return QgAxiom::QG5;
  if (s == "QG6" || s == "qg6") return QgAxiom::QG6;
  if (s == "QG7" || s == "qg7") return QgAxiom::QG7;
  throw Error("unsupported quasigroup axiom '" + std::string(s) + "'");
}

inline std::string_view to_string(QgAxiom a) {
  switch (a) {
    case QgAxiom::QG3: return "QG3";
    case QgAxiom::QG4: return "QG4";
    case QgAxiom::QG5: return "QG5";
    case QgAxiom::QG6: return "QG6";
    case QgAxiom::QG7: return "QG7";
  }
  return "?";
}

/// Term over the variables x, y and the quasigroup operation.
struct QgTerm {
  enum class Kind { X, Y, Mul } kind;
  int left = -1, right = -1;  // node indices for Mul
};

/// Both sides of an identity as nodes of one term graph; shared subterms
/// share nodes, and every Mul node comes after its operands.
struct QgIdentity {
  std::vector<QgTerm> nodes;
  int lhs, rhs;
};

inline QgIdentity qg_identity(QgAxiom a) {
  QgIdentity id;
  auto leaf = [&](QgTerm::Kind k) {
    id.nodes.push_back({k});
    return static_cast<int>(id.nodes.size() - 1);
  };
  auto mul = [&](int l, int r) {
    for (std::size_t i = 0; i < id.nodes.size(); ++i)
      if (id.nodes[i].kind == QgTerm::Kind::Mul && id.nodes[i].left == l && id.nodes[i].right == r)
        return static_cast<int>(i);
    id.nodes.push_back({QgTerm::Kind::Mul, l, r});
    return static_cast<int>(id.nodes.size() - 1);
  };
  int x = leaf(QgTerm::Kind::X), y = leaf(QgTerm::Kind::Y);
  switch (a) {
    case QgAxiom::QG3: id.lhs = mul(mul(x, y), mul(y, x)); id.rhs = x; break;          // (x*y)*(y*x) = x
    case QgAxiom::QG4: id.lhs = mul(mul(y, x), mul(x, y)); id.rhs = x; break;          // (y*x)*(x*y) = x
    case QgAxiom::QG5: id.lhs = mul(mul(mul(y, x), y), y); id.rhs = x; break;          // ((y*x)*y)*y = x
    case QgAxiom::QG6: id.lhs = mul(mul(x, y), y); id.rhs = mul(x, mul(x, y)); break;  // (x*y)*y = x*(x*y)
    case QgAxiom::QG7: id.lhs = mul(mul(y, x), y); id.rhs = mul(x, mul(y, x)); break;  // (y*x)*y = x*(y*x)
  }
  return id;
}

/// Quasigroup existence: an idempotent Latin square of the given order
/// (elements 1..order) satisfying the axiom's identity, with the last column
/// bounded below by a * order >= a - 1. The identity becomes forbidden tables
/// over the cells each instantiation of x, y touches.
inline CspInstance gen_qep(QgAxiom axiom, std::size_t order) {
  if (order < 3) throw Error("quasigroup existence needs order at least 3");
  const std::size_t n = order;
  CspInstance inst;
  std::vector<Value> symbols;
  for (std::size_t v = 1; v <= n; ++v) symbols.push_back(static_cast<Value>(v));
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t c = 1; c <= n; ++c) inst.add_variable(cell_name(r, c), symbols);
  for (std::size_t a = 1; a <= n; ++a) inst.assign((a - 1) * n + (a - 1), static_cast<Value>(a));
  add_latin_constraints(inst, n, false);

  for (std::size_t a = 1; a <= n; ++a) {
    VarIndex cell = (a - 1) * n + (n - 1);
    std::vector<Tuple> low;
    for (Value v : inst.variable(cell).domain)
      if (v < static_cast<Value>(a) - 1) low.push_back({v});
    if (!low.empty()) inst.add_constraint(Constraint::table({cell}, TablePolarity::Forbidden, std::move(low)));
  }

  const QgIdentity id = qg_identity(axiom);
  std::map<std::vector<VarIndex>, std::vector<Tuple>> forbidden;
  std::vector<int> value(id.nodes.size(), 0);
  std::map<VarIndex, Value> bound;  // cell -> value in the current instantiation
  std::function<void(std::size_t)> expand = [&](std::size_t k) {
    if (k == id.nodes.size()) {
      if (value[id.lhs] == value[id.rhs]) return;
      std::vector<VarIndex> scope;
      Tuple t;
      for (const auto& [cell, v] : bound) {
        scope.push_back(cell);
        t.push_back(v);
      }
      forbidden[scope].push_back(std::move(t));
      return;
    }
    const QgTerm& node = id.nodes[k];
    if (node.kind != QgTerm::Kind::Mul) return expand(k + 1);
    VarIndex cell = static_cast<VarIndex>(value[node.left] - 1) * n + static_cast<VarIndex>(value[node.right] - 1);
    if (auto it = bound.find(cell); it != bound.end()) {
      value[k] = it->second;
      return expand(k + 1);
    }
    for (Value v : inst.variable(cell).domain) {
      value[k] = v;
      bound[cell] = v;
      expand(k + 1);
    }
    bound.erase(cell);
  };
  for (std::size_t x = 1; x <= n; ++x) {
    for (std::size_t y = 1; y <= n; ++y) {
      for (std::size_t k = 0; k < id.nodes.size(); ++k) {
        if (id.nodes[k].kind == QgTerm::Kind::X) value[k] = static_cast<int>(x);
        if (id.nodes[k].kind == QgTerm::Kind::Y) value[k] = static_cast<int>(y);
      }
      expand(0);
    }
  }
  for (auto& [scope, tuples] : forbidden)
    inst.add_constraint(Constraint::table(scope, TablePolarity::Forbidden, std::move(tuples)));
  return inst;
}

// ---------------------------------------------------------------- graceful graphs

struct Graph {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Hub plus two n-cycles, every cycle vertex joined to the hub.
inline Graph double_wheel(std::size_t n) {
  if (n < 3) throw Error("double wheel needs cycles of at least 3 vertices");
  Graph g;
  g.vertices.push_back("hub");
  for (char side : {'a', 'b'})
    for (std::size_t i = 1; i <= n; ++i) g.vertices.push_back(std::string(1, side) + std::to_string(i));
  for (std::size_t side = 0; side < 2; ++side) {
    std::size_t base = 1 + side * n;
    for (std::size_t i = 0; i < n; ++i) g.edges.push_back({base + i, base + (i + 1) % n});
    for (std::size_t i = 0; i < n; ++i) g.edges.push_back({0, base + i});
  }
  return g;
}

/// Graceful labelling of `g`: vertex labels in 0..m distinct, edge labels
/// |f(v) - f(w)| a permutation of 1..m, m = |E|.
inline CspInstance gen_graceful(const Graph& g) {
  const std::size_t m = g.edges.size();
  CspInstance inst;
  std::vector<Value> labels, diffs;
  for (std::size_t v = 0; v <= m; ++v) labels.push_back(static_cast<Value>(v));
  for (std::size_t v = 1; v <= m; ++v) diffs.push_back(static_cast<Value>(v));
  std::vector<VarIndex> nodes, edges;
  for (const auto& name : g.vertices) nodes.push_back(inst.add_variable(name, labels));
  for (std::size_t e = 1; e <= m; ++e) edges.push_back(inst.add_variable("d" + std::to_string(e), diffs));
  inst.add_constraint(Constraint::all_different(nodes));
  inst.add_constraint(Constraint::permutation(edges));
  std::vector<Tuple> link;
  for (Value p : labels)
    for (Value q : labels)
      if (p != q) link.push_back({p, q, p > q ? p - q : q - p});
  for (std::size_t e = 0; e < m; ++e)
    inst.add_constraint(Constraint::table({nodes[g.edges[e].first], nodes[g.edges[e].second], edges[e]},
                                          TablePolarity::Allowed, link));
  return inst;
}

inline CspInstance gen_ggp_double_wheel(std::size_t n) { return gen_graceful(double_wheel(n)); }

/// Independent check of a vertex labelling (first |V| values of `a`).
inline bool is_graceful(const Graph& g, const std::vector<Value>& labels) {
  const std::size_t m = g.edges.size();
  if (labels.size() < g.vertices.size()) return false;
  std::vector<bool> used_v(m + 1), used_e(m + 1);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    Value f = labels[v];
    if (f < 0 || static_cast<std::size_t>(f) > m || used_v[f]) return false;
    used_v[f] = true;
  }
  for (const auto& [v, w] : g.edges) {
    Value d = std::abs(labels[v] - labels[w]);
    if (d < 1 || static_cast<std::size_t>(d) > m || used_e[d]) return false;
    used_e[d] = true;
  }
  return true;
}

// ---------------------------------------------------------------- suites

enum class Family { PHP, QCP, QEP, GGP };

struct BenchSpec {
  Family family = Family::PHP;
  std::size_t n = 0;  // pigeons, order, or cycle length
  unsigned fill = 0;
  std::uint64_t seed = 0;
  QgAxiom axiom = QgAxiom::QG5;
  bool permutation = false;

  std::string family_name() const {
    switch (family) {
      case Family::PHP: return "php";
      case Family::QCP: return "qcp";
      case Family::QEP: return "qep";
      case Family::GGP: return "ggp";
    }
    return "?";
  }

  std::string params() const {
    switch (family) {
      case Family::PHP: return "n=" + std::to_string(n);
      case Family::QCP:
        return "order=" + std::to_string(n) + " fill=" + std::to_string(fill) + " seed=" + std::to_string(seed) +
               (permutation ? " perm" : "");
      case Family::QEP: return std::string(to_string(axiom)) + " order=" + std::to_string(n);
      case Family::GGP: return "DW" + std::to_string(n);
    }
    return "";
  }

  CspInstance generate() const {
    switch (family) {
      case Family::PHP: return gen_php(n);
      case Family::QCP: return gen_qcp(n, fill, seed, permutation);
      case Family::QEP: return gen_qep(axiom, n);
      case Family::GGP: return gen_ggp_double_wheel(n);
    }
    throw Error("unknown family");
  }
};

namespace detail {

inline std::vector<std::size_t> parse_range(std::string_view s) {
  auto num = [&](std::string_view t) {
    std::size_t v{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) throw Error("bad number '" + std::string(t) + "'");
    return v;
  };
  std::vector<std::size_t> out;
  auto dots = s.find("..");
  if (dots == std::string_view::npos) {
    out.push_back(num(s));
    return out;
  }
  std::size_t lo = num(s.substr(0, dots)), hi = num(s.substr(dots + 2));
  if (hi < lo || hi - lo > 10000) throw Error("bad range '" + std::string(s) + "'");
  for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

}  // namespace detail

/// Expands a spec string. Numeric fields accept ranges `a..b`.
///   php:N  qcp:ORDER:FILL:SEED[:perm]  qep:AXIOM:ORDER  ggp:N
inline std::vector<BenchSpec> parse_bench_specs(std::string_view text) {
  auto parts = detail::split(text, ':');
  std::vector<BenchSpec> out;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw Error("malformed benchmark spec '" + std::string(text) + "'");
  };
  if (parts[0] == "php") {
    need(2, 2);
    for (auto n : detail::parse_range(parts[1])) out.push_back({Family::PHP, n});
  } else if (parts[0] == "ggp") {
    need(2, 2);
    for (auto n : detail::parse_range(parts[1])) out.push_back({Family::GGP, n});
  } else if (parts[0] == "qep") {
    need(3, 3);
    auto axiom = parse_axiom(parts[1]);
    for (auto n : detail::parse_range(parts[2])) {
      BenchSpec s{Family::QEP, n};
      s.axiom = axiom;
      out.push_back(s);
    }
  } else if (parts[0] == "qcp") {
    need(4, 5);
    bool perm = parts.size() == 5;
    if (perm && parts[4] != "perm") throw Error("malformed benchmark spec '" + std::string(text) + "'");
    for (auto n : detail::parse_range(parts[1]))
      for (auto fill : detail::parse_range(parts[2]))
        for (auto seed : detail::parse_range(parts[3])) {
          if (fill > 100) throw Error("fill percentage must be within 0..100");
          out.push_back({Family::QCP, n, static_cast<unsigned>(fill), seed, QgAxiom::QG5, perm});
        }
  } else {
    throw Error("unknown benchmark family '" + std::string(parts[0]) + "'");
  }
  return out;
}

struct SuiteOptions {
  SolverConfig solver;
  double timeout_seconds = 600;
  CardinalityMethod method = CardinalityMethod::Counter;
};

struct BenchRow {
  BenchSpec spec;
  EncodingKind kind;
  SolveStatus status = SolveStatus::Unknown;
  SolverStats stats;
  std::size_t atoms = 0;  // of the encoding before cardinality normalization
  std::size_t rules = 0;
  bool verified = true;   // SAT answers decode to checked solutions
  std::string error;      // set when the run could not be carried out
};

inline BenchRow run_one(const BenchSpec& spec, const CspInstance& inst, const EncodingKind& kind,
                        const SuiteOptions& o) {
  BenchRow row;
  row.spec = spec;
  row.kind = kind;
  try {
    Prepared p = prepare(inst, kind, o.method);
    row.atoms = p.encoding.program.atom_count();
    row.rules = p.encoding.program.size();
    SolverConfig cfg = o.solver;
    cfg.time_limit_seconds = o.timeout_seconds;
    auto r = solve_instance(p, cfg);
    row.status = r.status;
    row.stats = r.stats;
    if (r.solution) row.verified = check_solution(inst, *r.solution);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

/// Every spec under every encoding, in spec order. Failures and timeouts are
/// recorded in the row and never stop the suite.
inline std::vector<BenchRow> run_suite(const std::vector<BenchSpec>& specs, const std::vector<EncodingKind>& kinds,
                                       const SuiteOptions& o = {}) {
  std::vector<BenchRow> rows;
  for (const auto& spec : specs) {
    CspInstance inst = spec.generate();
    for (const auto& kind : kinds) rows.push_back(run_one(spec, inst, kind, o));
  }
  return rows;
}

inline std::string row_status(const BenchRow& r) {
  if (!r.error.empty()) return "ERROR";
  if (!r.verified) return "WRONG";
  return std::string(to_string(r.status));
}

inline std::string format_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "family,params,encoding,hall_limit,status,decisions,conflicts,propagations,time_ms,atoms,rules\n";
  for (const auto& r : rows) {
    out << r.spec.family_name() << ',' << r.spec.params() << ',' << to_string(r.kind.type) << ','
        << (r.kind.hall_limit ? std::to_string(*r.kind.hall_limit) : "") << ',' << row_status(r) << ','
        << r.stats.decisions << ',' << r.stats.conflicts << ',' << r.stats.propagations << ','
        << std::fixed << std::setprecision(1) << r.stats.time_ms << ',' << r.atoms << ',' << r.rules << '\n';
  }
  return out.str();
}

inline std::string format_table(const std::vector<BenchRow>& rows) {
  std::vector<std::vector<std::string>> cells{
      {"family", "params", "encoding", "status", "decisions", "conflicts", "time_ms", "atoms", "rules"}};
  for (const auto& r : rows) {
    std::ostringstream t;
    t << std::fixed << std::setprecision(1) << r.stats.time_ms;
    cells.push_back({r.spec.family_name(), r.spec.params(), r.kind.to_string(), row_status(r),
                     std::to_string(r.stats.decisions), std::to_string(r.stats.conflicts), t.str(),
                     std::to_string(r.atoms), std::to_string(r.rules)});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      bool numeric = i >= 4;
      out << (i ? "  " : "") << (numeric ? std::right : std::left) << std::setw(static_cast<int>(width[i])) << row[i];
    }
    out << '\n';
  }
  return out.str();
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

}  // namespace casp
