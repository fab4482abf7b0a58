#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "casp/benchmarks.hpp"
#include "casp/csp_io.hpp"
#include "casp/oracle.hpp"

using namespace casp;

namespace {

// Product of a multiplication table over 1..n stored row-major.
int mul(const std::vector<int>& t, int n, int a, int b) { return t[(a - 1) * n + (b - 1)]; }

bool identity_holds(QgAxiom axiom, const std::vector<int>& t, int n) {
  for (int x = 1; x <= n; ++x) {
    for (int y = 1; y <= n; ++y) {
      auto m = [&](int a, int b) { return mul(t, n, a, b); };
      bool ok = true;
      switch (axiom) {
        case QgAxiom::QG3: ok = m(m(x, y), m(y, x)) == x; break;
        case QgAxiom::QG4: ok = m(m(y, x), m(x, y)) == x; break;
        case QgAxiom::QG5: ok = m(m(m(y, x), y), y) == x; break;
        case QgAxiom::QG6: ok = m(m(x, y), y) == m(x, m(x, y)); break;
        case QgAxiom::QG7: ok = m(m(y, x), y) == m(x, m(y, x)); break;
      }
      if (!ok) return false;
    }
  }
  return true;
}

bool table_ok(QgAxiom axiom, const std::vector<int>& t, int n) {
  for (int a = 1; a <= n; ++a)
    if (mul(t, n, a, a) != a || mul(t, n, a, n) < a - 1) return false;
  return identity_holds(axiom, t, n);
}

// Latin squares by row-major backtracking, then filtered.
std::size_t count_quasigroups_backtracking(QgAxiom axiom, int n) {
  std::vector<int> t(static_cast<std::size_t>(n * n), 0);
  std::size_t count = 0;
  std::function<void(int)> rec = [&](int cell) {
    if (cell == n * n) {
      count += table_ok(axiom, t, n);
      return;
    }
    int r = cell / n, c = cell % n;
    for (int v = 1; v <= n; ++v) {
      bool ok = true;
      for (int k = 0; k < c && ok; ++k) ok = t[static_cast<std::size_t>(r * n + k)] != v;
      for (int k = 0; k < r && ok; ++k) ok = t[static_cast<std::size_t>(k * n + c)] != v;
      if (!ok) continue;
      t[static_cast<std::size_t>(cell)] = v;
      rec(cell + 1);
    }
    t[static_cast<std::size_t>(cell)] = 0;
  };
  rec(0);
  return count;
}

// Graceful labellings of `g` by backtracking over vertices.
bool has_graceful_labelling(const Graph& g) {
  const std::size_t m = g.edges.size(), nv = g.vertices.size();
  std::vector<Value> labels(nv);
  std::vector<bool> used(m + 1), diff(m + 1);
  std::function<bool(std::size_t)> rec = [&](std::size_t v) {
    if (v == nv) return true;
    for (Value x = 0; x <= static_cast<Value>(m); ++x) {
      if (used[x]) continue;
      std::vector<Value> added;
      bool ok = true;
      for (const auto& [a, b] : g.edges) {
        std::size_t other = a == v ? b : b == v ? a : nv;
        if (other >= v) continue;
        Value d = std::abs(x - labels[other]);
        if (diff[d] || d == 0 || std::find(added.begin(), added.end(), d) != added.end()) {
          ok = false;
          break;
        }
        added.push_back(d);
      }
      if (!ok) continue;
      labels[v] = x;
      used[x] = true;
      for (Value d : added) diff[d] = true;
      if (rec(v + 1)) return true;
      used[x] = false;
      for (Value d : added) diff[d] = false;
    }
    return false;
  };
  return rec(0);
}

std::size_t count_quasigroups(QgAxiom axiom, int n) {
  std::size_t cells = static_cast<std::size_t>(n * n), total = 1, count = 0;
  for (std::size_t i = 0; i < cells; ++i) total *= static_cast<std::size_t>(n);
  std::vector<int> t(cells);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (auto& v : t) {
      v = static_cast<int>(c % static_cast<std::size_t>(n)) + 1;
      c /= static_cast<std::size_t>(n);
    }
    bool ok = true;
    for (int a = 1; a <= n && ok; ++a) ok = mul(t, n, a, a) == a && mul(t, n, a, n) >= a - 1;
    for (int r = 1; r <= n && ok; ++r)
      for (int c1 = 1; c1 <= n && ok; ++c1)
        for (int c2 = c1 + 1; c2 <= n && ok; ++c2)
          ok = mul(t, n, r, c1) != mul(t, n, r, c2) && mul(t, n, c1, r) != mul(t, n, c2, r);
    if (ok && identity_holds(axiom, t, n)) ++count;
  }
  return count;
}

}  // namespace

TEST(Php, Small) {
  auto two = gen_php(2);
  EXPECT_EQ(two.size(), 2u);
  EXPECT_EQ(two.variable(0).domain, (std::vector<Value>{1}));
  EXPECT_TRUE(enumerate_solutions(two).empty());
  EXPECT_TRUE(enumerate_solutions(gen_php(4)).empty());
  EXPECT_THROW(gen_php(1), Error);
  EXPECT_EQ(solve_instance(prepare(gen_php(10), {EncodingType::Bound})).status, SolveStatus::Unsat);
}

TEST(Qcp, LatinSquaresAreValid) {
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 12; ++n) {
    auto sq = random_latin_square(n, rng);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<bool> row(n + 1), col(n + 1);
      for (std::size_t j = 0; j < n; ++j) {
        Value r = sq[i * n + j], c = sq[j * n + i];
        ASSERT_TRUE(r >= 1 && r <= static_cast<Value>(n) && !row[r]);
        ASSERT_TRUE(c >= 1 && c <= static_cast<Value>(n) && !col[c]);
        row[r] = col[c] = true;
      }
    }
  }
}

TEST(Qcp, OrderTwoEmpty) {
  auto inst = gen_qcp(2, 0, 1);
  EXPECT_EQ(inst.size(), 4u);
  EXPECT_EQ(inst.constraints().size(), 4u);
  EXPECT_EQ(enumerate_solutions(inst).size(), 2u);
}

TEST(Qcp, FilledInstancesAreSatisfiable) {
  auto inst = gen_qcp(5, 30, 1);
  std::size_t fixed = 0;
  for (const auto& v : inst.variables()) fixed += v.domain.size() == 1;
  EXPECT_EQ(fixed, 8u);
  EXPECT_EQ(inst.assignments().size(), 8u);
  auto r = solve_instance(prepare(inst, {EncodingType::Support}));
  ASSERT_EQ(r.status, SolveStatus::Sat);
  EXPECT_TRUE(check_solution(inst, *r.solution));
  auto perm = gen_qcp(5, 30, 1, true);
  EXPECT_EQ(perm.constraints()[0].kind, ConstraintKind::Permutation);
  EXPECT_EQ(solve_instance(prepare(perm, {EncodingType::Range})).status, SolveStatus::Sat);
}

TEST(Qcp, Deterministic) {
  EXPECT_EQ(write_instance(gen_qcp(9, 42, 3)), write_instance(gen_qcp(9, 42, 3)));
  EXPECT_NE(write_instance(gen_qcp(9, 42, 3)), write_instance(gen_qcp(9, 42, 4)));
}

TEST(Qep, OrderThreeMatchesExhaustiveCount) {
  for (auto axiom : {QgAxiom::QG3, QgAxiom::QG4, QgAxiom::QG5, QgAxiom::QG6, QgAxiom::QG7}) {
    auto inst = gen_qep(axiom, 3);
    auto sols = enumerate_solutions(inst);
    EXPECT_EQ(sols.size(), count_quasigroups(axiom, 3)) << to_string(axiom);
    for (const auto& s : sols)
      for (std::size_t a = 0; a < 3; ++a) EXPECT_EQ(s.values[a * 3 + a], static_cast<Value>(a + 1));
  }
}

TEST(Qep, OrderFourMatchesLatinSquareCount) {
  for (auto axiom : {QgAxiom::QG3, QgAxiom::QG4, QgAxiom::QG5, QgAxiom::QG6, QgAxiom::QG7}) {
    auto p = prepare(gen_qep(axiom, 4), {EncodingType::Direct});
    auto sols = enumerate_instance(p, 10000);
    EXPECT_EQ(sols.status, SolveStatus::Unsat);
    EXPECT_EQ(sols.solutions.size(), count_quasigroups_backtracking(axiom, 4)) << to_string(axiom);
  }
  EXPECT_EQ(count_quasigroups_backtracking(QgAxiom::QG5, 3), count_quasigroups(QgAxiom::QG5, 3));
}

TEST(Qep, Errors) {
  EXPECT_THROW(gen_qep(QgAxiom::QG5, 2), Error);
  EXPECT_THROW(parse_axiom("QG1"), Error);
}

TEST(Ggp, DoubleWheelShape) {
  for (std::size_t n = 3; n <= 6; ++n) {
    auto g = double_wheel(n);
    EXPECT_EQ(g.vertices.size(), 2 * n + 1);
    EXPECT_EQ(g.edges.size(), 4 * n);
  }
  EXPECT_THROW(double_wheel(2), Error);
}

TEST(Ggp, DoubleWheelThreeHasNoGracefulLabelling) {
  auto g = double_wheel(3);
  EXPECT_FALSE(has_graceful_labelling(g));
  auto r = solve_instance(prepare(gen_graceful(g), {EncodingType::Support}));
  EXPECT_EQ(r.status, SolveStatus::Unsat);
}

TEST(Ggp, DoubleWheelFourIsGraceful) {
  auto g = double_wheel(4);
  EXPECT_TRUE(has_graceful_labelling(g));
  auto inst = gen_graceful(g);
  auto r = solve_instance(prepare(inst, {EncodingType::Support}));
  ASSERT_EQ(r.status, SolveStatus::Sat);
  EXPECT_TRUE(check_solution(inst, *r.solution));
  EXPECT_TRUE(is_graceful(g, r.solution->values));
  std::vector<Value> edge_labels(r.solution->values.begin() + static_cast<std::ptrdiff_t>(g.vertices.size()),
                                 r.solution->values.end());
  std::sort(edge_labels.begin(), edge_labels.end());
  for (std::size_t i = 0; i < edge_labels.size(); ++i) EXPECT_EQ(edge_labels[i], static_cast<Value>(i + 1));
}

TEST(Ggp, CheckerRejects) {
  auto g = double_wheel(3);
  std::vector<Value> labels(g.vertices.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<Value>(i);
  EXPECT_FALSE(is_graceful(g, labels));
  EXPECT_FALSE(is_graceful(g, {0, 1}));
}

TEST(Specs, Parsing) {
  auto php = parse_bench_specs("php:8..10");
  ASSERT_EQ(php.size(), 3u);
  EXPECT_EQ(php[2].n, 10u);
  auto qcp = parse_bench_specs("qcp:10:30:1..20");
  ASSERT_EQ(qcp.size(), 20u);
  EXPECT_EQ(qcp[0].params(), "order=10 fill=30 seed=1");
  EXPECT_TRUE(parse_bench_specs("qcp:5:40:1:perm")[0].permutation);
  EXPECT_EQ(parse_bench_specs("qep:QG5:3")[0].axiom, QgAxiom::QG5);
  EXPECT_EQ(parse_bench_specs("ggp:3")[0].params(), "DW3");
  for (auto bad : {"php", "php:x", "php:5..3", "qcp:5:101:1", "qcp:5:40", "qcp:5:40:1:x", "qep:QG9:4", "sat:3"})
    EXPECT_THROW(parse_bench_specs(bad), Error) << bad;
}

TEST(Suite, EmptyAndPigeonSweep) {
  EXPECT_TRUE(run_suite({}, {{EncodingType::Range}}).empty());
  auto rows = run_suite(parse_bench_specs("php:6..8"), {{EncodingType::Support}, {EncodingType::Bound}, {EncodingType::Range}});
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.status, SolveStatus::Unsat);
    if (r.kind.type != EncodingType::Support) EXPECT_EQ(r.stats.decisions, 0u);
    EXPECT_GT(r.atoms, 0u);
  }
  auto csv = format_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "family,params,encoding,hall_limit,status,decisions,conflicts,propagations,time_ms,atoms,rules");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
  EXPECT_NE(format_table(rows).find("range"), std::string::npos);
}

TEST(Suite, TimeoutIsRecorded) {
  SuiteOptions o;
  o.timeout_seconds = 0.01;
  auto rows = run_suite(parse_bench_specs("php:11"), {{EncodingType::Support}}, o);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].status, SolveStatus::Unknown);
  EXPECT_EQ(row_status(rows[0]), "UNKNOWN");
}

TEST(Slope, ExactPowerLaw) {
  std::vector<double> x{2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3 * std::pow(v, 2.5));
  EXPECT_NEAR(loglog_slope(x, y), 2.5, 1e-9);
  EXPECT_THROW(loglog_slope({1}, {1}), Error);
}
