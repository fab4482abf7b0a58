// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "casp/casp.hpp"
#include "support/naive_propagation.hpp"

using namespace casp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CspInstance fixture(const std::string& name) {
  return parse_instance(read_file(std::filesystem::path(CASP_TEST_DATA) / name));
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f s", s);
  return buf;
}

bool subset(const DomainState& small, const DomainState& big) {
  if (small.inconsistent()) return true;
  if (big.inconsistent()) return false;
  for (std::size_t v = 0; v < small.domains.size(); ++v)
    if (!std::includes(big.domains[v].begin(), big.domains[v].end(), small.domains[v].begin(),
                       small.domains[v].end()))
      return false;
  return true;
}

// ---------------------------------------------------------------- 1..3

Outcome consistency_suite(EncodingType type, Consistency level, std::uint64_t seed, double budget_seconds) {
  Outcome out;
  auto start = Clock::now();
  CheckOptions o;
  o.kind = {type};
  o.level = level;
  o.seed = seed;
  o.trials = 500;
  o.states_per_trial = 50;
  auto r = run_consistency_check(o);
  double took = seconds_since(start);
  out.detail = std::to_string(r.agreed) + "/" + std::to_string(r.trials) + " trials agree, " +
               std::to_string(r.trials * o.states_per_trial) + " states, " + format_seconds(took);
  if (r.agreed != r.trials || r.trials != 500) {
    out.fail(out.detail);
    if (r.witness) out.fail("witness:\n" + write_instance(r.witness->instance));
  }
  if (took > budget_seconds) out.fail("took " + format_seconds(took));
  return out;
}

Outcome criterion_range() {
  Outcome out = consistency_suite(EncodingType::Range, Consistency::Range, 2, 120);
  auto inst = fixture("hall_holes.csp");
  auto s = propagate_normalized(prepare(inst, {EncodingType::Range}), DomainState::full(inst));
  const std::vector<Value> ends{1, 4};
  bool example = s.domains[1] == ends && s.domains[3] == ends && s.domains[0] == std::vector<Value>{2, 3} &&
                 s.domains[2] == std::vector<Value>{2, 3};
  if (!example) out.fail("Hall example not pruned to {1 4}");
  else out.detail += "; Hall example prunes v2, v4 to {1 4}";
  return out;
}

// ---------------------------------------------------------------- 4

Outcome criterion_direct_weaker() {
  Outcome out;
  std::mt19937_64 rng(4);
  std::size_t trials = 500, states = 50, strict = 0, violations = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto inst = random_csp(rng);
    auto p = prepare(inst, {EncodingType::Direct});
    for (std::size_t s = 0; s < states; ++s) {
      auto seed = random_state(inst, rng, false);
      auto direct = propagate_normalized(p, seed);
      auto ac = consistency_oracle(inst, seed, Consistency::ArcBinary);
      if (!subset(ac, direct)) ++violations;
      else strict += ac != direct;
    }
  }
  auto inst = fixture("direct_weaker.csp");
  auto full = DomainState::full(inst);
  auto direct = propagate_normalized(prepare(inst, {EncodingType::Direct}), full);
  auto ac = consistency_oracle(inst, full, Consistency::ArcBinary);
  bool fixture_strict = subset(ac, direct) && ac != direct;

  out.detail = "pruning within arc consistency on " + std::to_string(trials * states - violations) + "/" +
               std::to_string(trials * states) + " states, " + std::to_string(strict) +
               " strictly weaker; regression fixture " + (fixture_strict ? "strict" : "NOT strict");
  if (violations) out.fail(std::to_string(violations) + " states where direct pruned more than arc consistency");
  if (!strict) out.fail("no strict case among random trials");
  if (!fixture_strict) out.fail("fixture direct_weaker.csp is not a strict case");
  return out;
}

// ---------------------------------------------------------------- 5

std::vector<CspInstance> solution_corpus() {
  std::vector<CspInstance> corpus;
  for (const auto& entry : std::filesystem::directory_iterator(CASP_TEST_DATA)) {
    if (entry.path().extension() != ".csp") continue;
    try {
      corpus.push_back(parse_instance(read_file(entry.path())));
    } catch (const Error&) {
      // malformed fixtures are there on purpose
    }
  }
  for (auto spec : {"php:2..5", "qcp:2:0:1", "qcp:3:0..60:1", "qcp:4:60:1..5", "qep:QG3:3", "qep:QG4:3",
                    "qep:QG5:3", "qep:QG6:3", "qep:QG7:3"})
    for (const auto& s : parse_bench_specs(spec)) corpus.push_back(s.generate());
  std::mt19937_64 rng(5);
  RandomCspOptions mixed;
  mixed.permutation_percent = 30;
  mixed.max_table_arity = 3;
  for (int i = 0; i < 300; ++i) corpus.push_back(random_csp(rng, i % 2 ? mixed : RandomCspOptions{}));
  return corpus;
}

Outcome criterion_solutions() {
  Outcome out;
  const EncodingType types[] = {EncodingType::Direct, EncodingType::Support, EncodingType::Range,
                                EncodingType::Bound};
  std::size_t instances = 0, runs = 0, answer_set_checks = 0;
  for (const auto& inst : solution_corpus()) {
    if (inst.search_space(10'000) > 10'000) continue;
    ++instances;
    auto expected = enumerate_solutions(inst);
    for (auto type : types) {
      auto enc = encode(inst, {type});
      auto got = enumerate_instance(prepare(enc), expected.size() + 1);
      ++runs;
      if (got.status != SolveStatus::Unsat || got.solutions != expected) {
        out.fail(std::string(to_string(type)) + " differs on\n" + write_instance(inst));
        continue;
      }
      auto normal = normalize_cardinality(enc.program, CardinalityMethod::Binomial);
      if (normal.atoms().size() > 20) continue;
      std::vector<CspAssignment> decoded;
      for (const auto& x : answer_sets_brute_force(normal)) {
        std::vector<Truth> values(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) values[i] = x[i] ? Truth::True : Truth::False;
        decoded.push_back(decode(enc, values));
      }
      std::sort(decoded.begin(), decoded.end());
      ++answer_set_checks;
      if (decoded != expected) out.fail(std::string(to_string(type)) + " answer sets differ on\n" + write_instance(inst));
    }
  }
  if (out.pass)
    out.detail = std::to_string(instances) + " instances x 4 encodings = " + std::to_string(runs) +
                 " enumerations match brute force; " + std::to_string(answer_set_checks) +
                 " also checked through answer sets";
  return out;
}

// ---------------------------------------------------------------- 6

Outcome criterion_pigeonhole() {
  Outcome out;
  auto start = Clock::now();
  std::size_t root_refutations = 0, needs_search = 0;
  SolverConfig probe;
  probe.conflict_budget = 1;
  for (std::size_t n = 3; n <= 16; ++n) {
    auto inst = gen_php(n);
    if (n >= 4) {
      for (auto type : {EncodingType::Bound, EncodingType::Range}) {
        auto r = solve_instance(prepare(inst, {type}));
        if (r.status != SolveStatus::Unsat || r.stats.decisions != 0)
          out.fail(std::string(to_string(type)) + " php " + std::to_string(n) + ": " +
                   std::string(to_string(r.status)) + " after " + std::to_string(r.stats.decisions) + " decisions");
        else ++root_refutations;
      }
      for (std::size_t k = 1; k + 3 <= n; ++k) {
        for (auto type : {EncodingType::Bound, EncodingType::Range}) {
          auto r = solve_instance(prepare(inst, {type, k}), probe);
          if (r.stats.decisions == 0)
            out.fail(std::string(to_string(type)) + " hall " + std::to_string(k) + " php " + std::to_string(n) +
                     " refuted without decisions");
          else ++needs_search;
        }
      }
    }
    auto r = solve_instance(prepare(inst, {EncodingType::Support}), probe);
    if (r.stats.decisions == 0) out.fail("support php " + std::to_string(n) + " refuted without decisions");
    else ++needs_search;
  }
  double took = seconds_since(start);
  if (took > 60) out.fail("took " + format_seconds(took));
  if (out.pass)
    out.detail = std::to_string(root_refutations) + " bound/range runs refuted with 0 decisions; " +
                 std::to_string(needs_search) + " support or capped runs needed decisions; " + format_seconds(took);
  return out;
}

// ---------------------------------------------------------------- 7

Outcome criterion_sizes() {
  Outcome out;
  std::vector<double> ns{8, 10, 12, 14, 16};
  std::ostringstream detail;
  detail.precision(3);
  for (auto [type, want] : {std::pair{EncodingType::Support, 2.0}, std::pair{EncodingType::Bound, 3.0},
                            std::pair{EncodingType::Range, 3.0}}) {
    std::vector<double> atoms;
    for (double n : ns) atoms.push_back(static_cast<double>(encode(gen_php(static_cast<std::size_t>(n)), {type}).program.atom_count()));
    double slope = loglog_slope(ns, atoms);
    detail << (type == EncodingType::Support ? "" : ", ") << to_string(type) << " atoms slope " << slope;
    if (std::abs(slope - want) > 0.2) out.fail(std::string(to_string(type)) + " slope out of range");
  }
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

// ---------------------------------------------------------------- 8

std::vector<AtomSet> projected_answer_sets(const GroundProgram& p, std::size_t keep) {
  std::vector<AtomSet> out;
  for (const auto& s : answer_sets_brute_force(p, 24)) out.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Outcome criterion_cardinality() {
  Outcome out;
  std::size_t programs = 0;
  // Every literal list over up to four atoms (each atom absent, positive or
  // negative), every bound, with the atoms left free by a choice rule or
  // defined by a small normal rule set.
  for (int shape = 0; shape < 2; ++shape) {
    for (int code = 1; code < 81; ++code) {
      std::vector<int> pick(4);
      for (int i = 0, c = code; i < 4; ++i, c /= 3) pick[i] = c % 3;
      GroundProgram base;
      std::vector<AtomId> atoms;
      for (int i = 0; i < 4; ++i) atoms.push_back(base.atom("a", {i}));
      if (shape == 0) {
        base.add_choice(atoms);
      } else {
        auto extra = base.atom("c");
        base.add_choice({atoms[0], atoms[1], extra});
        base.add_normal(atoms[2], {neg(atoms[0])});
        base.add_normal(atoms[3], {pos(atoms[1]), neg(extra)});
      }
      std::vector<Literal> lits;
      for (int i = 0; i < 4; ++i)
        if (pick[i]) lits.push_back({atoms[i], pick[i] == 1});
      for (std::size_t k = 1; k <= lits.size(); ++k) {
        GroundProgram p = base;
        p.add_cardinality(k, lits);
        const std::size_t keep = base.atoms().size();
        auto a = projected_answer_sets(normalize_cardinality(p, CardinalityMethod::Counter), keep);
        auto b = projected_answer_sets(normalize_cardinality(p, CardinalityMethod::Binomial), keep);
        ++programs;
        if (a != b) out.fail("methods differ on\n" + emit_ground(p));
      }
    }
  }
  auto php = gen_php(5);
  std::size_t php_runs = 0;
  for (auto type : {EncodingType::Direct, EncodingType::Support, EncodingType::Range, EncodingType::Bound}) {
    auto counter = solve_instance(prepare(php, {type}, CardinalityMethod::Counter));
    auto binom = solve_instance(prepare(php, {type}, CardinalityMethod::Binomial));
    ++php_runs;
    if (counter.status != binom.status || counter.status != SolveStatus::Unsat)
      out.fail(std::string(to_string(type)) + " php 5: counter " + std::string(to_string(counter.status)) +
               ", binomial " + std::string(to_string(binom.status)));
  }
  if (out.pass)
    out.detail = std::to_string(programs) + " programs with identical projected answer sets; php 5 UNSAT under both methods for " +
                 std::to_string(php_runs) + " encodings";
  return out;
}

// ---------------------------------------------------------------- 9

Outcome criterion_propagation() {
  Outcome out;
  std::mt19937_64 rng(9);
  std::size_t conflicts = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t entities = 1 + uniform_index(rng, 12);
    std::vector<Nogood> store(uniform_index(rng, 21));
    for (auto& n : store) {
      std::size_t len = 1 + uniform_index(rng, std::min<std::size_t>(entities, 4));
      for (std::size_t i = 0; i < len; ++i) {
        Entity e = static_cast<Entity>(uniform_index(rng, entities));
        n.push_back(coin(rng, 50) ? Lit::T(e) : Lit::F(e));
      }
    }
    std::vector<Lit> seed;
    for (std::size_t i = uniform_index(rng, 4); i > 0; --i) {
      Entity e = static_cast<Entity>(uniform_index(rng, entities));
      seed.push_back(coin(rng, 50) ? Lit::T(e) : Lit::F(e));
    }
    auto naive = testing::naive_propagate(entities, store, seed);
    Propagator p(entities, store);
    bool conflict = p.propagate().has_value();
    if (!conflict) {
      p.new_level();
      bool ok = true;
      for (Lit l : seed) ok = p.assign(l, kNoReason) && ok;
      conflict = !ok || p.propagate().has_value();
    }
    conflicts += conflict;
    if (conflict != naive.conflict || (!conflict && p.values() != naive.values)) {
      out.fail("store " + std::to_string(t) + " differs from the naive scanner");
      break;
    }
  }
  std::vector<Nogood> example{{Lit::T(0), Lit::F(1), Lit::T(2), Lit::T(3)},
                              {Lit::F(0), Lit::T(3)},
                              {Lit::F(2), Lit::T(3)}};
  Propagator p(4, example);
  p.assign(Lit::T(3), kNoReason);
  bool ok = !p.propagate() && p.trail() == std::vector<Lit>{Lit::T(3), Lit::T(0), Lit::T(2), Lit::T(1)};
  if (!ok) out.fail("worked example trail differs");
  if (out.pass)
    out.detail = "10000 stores agree (" + std::to_string(conflicts) +
                 " conflicts); worked example extends T a4 by T a1, T a3, T a2";
  return out;
}

// ---------------------------------------------------------------- 10

std::size_t qg5_order3_oracle() {
  // Idempotent order-3 tables with the last-column bound, Latin rows and
  // columns and ((y*x)*y)*y = x, by exhaustion over all 3^9 tables.
  std::size_t count = 0;
  std::vector<int> t(9);
  for (int code = 0; code < 19683; ++code) {
    for (int i = 0, c = code; i < 9; ++i, c /= 3) t[static_cast<std::size_t>(i)] = c % 3 + 1;
    auto m = [&](int a, int b) { return t[static_cast<std::size_t>((a - 1) * 3 + (b - 1))]; };
    bool ok = true;
    for (int a = 1; a <= 3 && ok; ++a) ok = m(a, a) == a && m(a, 3) >= a - 1;
    for (int r = 1; r <= 3 && ok; ++r)
      for (int c1 = 1; c1 <= 3 && ok; ++c1)
        for (int c2 = c1 + 1; c2 <= 3 && ok; ++c2) ok = m(r, c1) != m(r, c2) && m(c1, r) != m(c2, r);
    for (int x = 1; x <= 3 && ok; ++x)
      for (int y = 1; y <= 3 && ok; ++y) ok = m(m(m(y, x), y), y) == x;
    count += ok;
  }
  return count;
}

Outcome criterion_benchmarks() {
  Outcome out;
  std::ostringstream detail;
  double slowest = 0;
  std::size_t solved = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto inst = gen_qcp(10, 30, seed);
    SolverConfig cfg;
    cfg.time_limit_seconds = 10;
    auto start = Clock::now();
    auto r = solve_instance(prepare(inst, {EncodingType::Support}), cfg);
    double took = seconds_since(start);
    slowest = std::max(slowest, took);
    if (r.status == SolveStatus::Sat && check_solution(inst, *r.solution) && took <= 10) ++solved;
    else out.fail("qcp seed " + std::to_string(seed) + ": " + std::string(to_string(r.status)));
  }
  detail << "qcp order 10 fill 30: " << solved << "/20 SAT, slowest " << format_seconds(slowest);

  auto g = double_wheel(3);
  SolverConfig cfg;
  cfg.time_limit_seconds = 60;
  auto start = Clock::now();
  auto r = solve_instance(prepare(gen_graceful(g), {EncodingType::Support}), cfg);
  double took = seconds_since(start);
  bool graceful = r.status == SolveStatus::Sat && is_graceful(g, r.solution->values);
  detail << "; DW3 " << to_string(r.status) << " in " << format_seconds(took);
  if (!graceful || took > 60)
    out.fail("DW3 is " + std::string(to_string(r.status)) + " in " + format_seconds(took) +
             ", no graceful labelling to verify");

  auto qg5 = enumerate_solutions(gen_qep(QgAxiom::QG5, 3)).size();
  auto oracle = qg5_order3_oracle();
  auto solver = enumerate_instance(prepare(gen_qep(QgAxiom::QG5, 3), {EncodingType::Direct}), 1000).solutions.size();
  detail << "; QG5 order 3: " << solver << " solutions, oracle " << oracle;
  if (qg5 != oracle || solver != oracle) out.fail("QG5 order 3 count differs from oracle");
  if (out.pass) out.detail = detail.str();
  else out.detail += " (" + detail.str() + ")";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "support propagation equals arc consistency on the binary decomposition",
       [] { return consistency_suite(EncodingType::Support, Consistency::ArcBinary, 1, 120); }},
      {2, "range propagation equals range consistency", criterion_range},
      {3, "bound propagation equals bound consistency on interval states",
       [] { return consistency_suite(EncodingType::Bound, Consistency::Bound, 3, 120); }},
      {4, "direct propagation is weaker than arc consistency", criterion_direct_weaker},
      {5, "every encoding preserves the solution set", criterion_solutions},
      {6, "pigeon-hole refutation structure", criterion_pigeonhole},
      {7, "encoding size growth", criterion_sizes},
      {8, "counter and binomial cardinality transforms agree", criterion_cardinality},
      {9, "watched propagation matches the naive scanner", criterion_propagation},
      {10, "benchmark sanity", criterion_benchmarks},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto start = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " | " << o.detail << " ["
              << format_seconds(seconds_since(start)) << "]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass"
            << std::endl;
  return failed ? 1 : 0;
}
