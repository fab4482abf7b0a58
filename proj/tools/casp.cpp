// Command-line front end: encode, solve, check, gen, bench.

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casp/casp.hpp"

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitUsage = 1;
constexpr int kExitResource = 2;

constexpr std::string_view kEncodingTag = "casp-encoding ";
constexpr std::string_view kSourceTag = "casp-source ";

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw casp::Error("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw casp::Error("cannot write '" + path + "'");
  out << text;
}

struct EncodingFlags {
  std::string encoding = "direct";
  std::optional<std::size_t> hall_limit;
  std::string method = "counter";

  void attach(CLI::App* app) {
    app->add_option("--encoding", encoding, "direct, support, bound or range")
        ->check(CLI::IsMember({"direct", "support", "bound", "range"}));
    app->add_option("--hall-limit", hall_limit, "largest Hall interval encoded (bound, range)");
    app->add_option("--method", method, "cardinality transform")->check(CLI::IsMember({"counter", "binomial"}));
  }
  casp::EncodingKind kind() const { return {casp::parse_encoding_type(encoding), hall_limit}; }
  casp::CardinalityMethod cardinality() const {
    return method == "binomial" ? casp::CardinalityMethod::Binomial : casp::CardinalityMethod::Counter;
  }
};

std::vector<std::string> encoding_header(const casp::CspInstance& inst, const casp::EncodingKind& kind) {
  std::string tag(kEncodingTag);
  tag += casp::to_string(kind.type);
  if (kind.hall_limit) tag += " " + std::to_string(*kind.hall_limit);
  std::vector<std::string> header{tag};
  std::istringstream lines(casp::write_instance(inst));
  for (std::string line; std::getline(lines, line);) header.push_back(std::string(kSourceTag) + line);
  return header;
}

// An encoding read back from `encode` output: its header names the encoding
// and carries the source instance.
std::optional<casp::Encoding> read_encoded(const std::string& text) {
  auto header = casp::ground_header(text);
  if (header.empty() || header[0].rfind(kEncodingTag, 0) != 0) return std::nullopt;
  std::istringstream tag(header[0].substr(kEncodingTag.size()));
  std::string type;
  tag >> type;
  casp::EncodingKind kind{casp::parse_encoding_type(type), std::nullopt};
  std::size_t h;
  if (tag >> h) kind.hall_limit = h;
  std::string source;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].rfind(kSourceTag, 0) != 0) continue;
    source += header[i].substr(kSourceTag.size()) + "\n";
  }
  return casp::attach(casp::parse_instance(source), kind, casp::parse_ground(text));
}

void print_solution(const casp::CspInstance& inst, const casp::CspAssignment& a) {
  for (casp::VarIndex v = 0; v < inst.size(); ++v)
    std::cout << inst.variable(v).name << " = " << a.values[v] << '\n';
}

void print_state(const casp::CspInstance& inst, const casp::DomainState& s) {
  for (casp::VarIndex v = 0; v < inst.size(); ++v) {
    std::cout << "  " << inst.variable(v).name << " {";
    for (std::size_t i = 0; i < s.domains[v].size(); ++i) std::cout << (i ? " " : "") << s.domains[v][i];
    std::cout << "}\n";
  }
}

casp::Consistency parse_level(const std::string& s) {
  if (s == "ac") return casp::Consistency::ArcBinary;
  if (s == "bound") return casp::Consistency::Bound;
  if (s == "range") return casp::Consistency::Range;
  if (s == "domain") return casp::Consistency::Domain;
  throw casp::Error("unknown consistency level '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encode finite-domain constraint problems as logic programs and solve them"};
  app.require_subcommand(1);

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "write the ground program of an instance");
  EncodingFlags encode_flags;
  encode_flags.attach(encode_cmd);
  std::string encode_input = "-", encode_output;
  encode_cmd->add_option("input", encode_input, "instance file, '-' for stdin");
  encode_cmd->add_option("-o,--output", encode_output, "output file (default stdout)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve an instance or an encoded program");
  EncodingFlags solve_flags;
  solve_flags.attach(solve_cmd);
  std::string solve_input = "-", nogood_path;
  std::optional<std::size_t> enumerate_limit;
  std::uint64_t solve_seed = 0;
  std::optional<double> timeout;
  bool show_stats = false;
  solve_cmd->add_option("input", solve_input, "instance or ground program, '-' for stdin");
  solve_cmd->add_option("--enumerate", enumerate_limit, "list up to K solutions")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", solve_seed, "solver random seed");
  solve_cmd->add_option("--timeout", timeout, "time limit in seconds")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--stats", show_stats, "print search statistics");
  solve_cmd->add_option("--emit-nogoods", nogood_path, "write the completion nogoods to a file");

  // check
  auto* check_cmd = app.add_subcommand("check", "compare propagation with a consistency oracle");
  EncodingFlags check_flags;
  check_flags.attach(check_cmd);
  std::string level = "ac";
  std::uint64_t check_seed = 0;
  std::size_t trials = 100, states = 50;
  check_cmd->add_option("--level", level, "ac, bound, range or domain")
      ->check(CLI::IsMember({"ac", "bound", "range", "domain"}));
  check_cmd->add_option("--seed", check_seed, "random seed");
  check_cmd->add_option("--trials", trials, "random instances")->check(CLI::PositiveNumber);
  check_cmd->add_option("--states", states, "domain states per instance")->check(CLI::PositiveNumber);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "write a benchmark instance");
  std::string gen_spec, gen_output;
  gen_cmd->add_option("spec", gen_spec, "php:N | qcp:ORDER:FILL:SEED[:perm] | qep:AXIOM:ORDER | ggp:N")->required();
  gen_cmd->add_option("-o,--output", gen_output, "output file (default stdout)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run benchmark specs under several encodings");
  std::vector<std::string> bench_specs, bench_encodings{"direct", "support", "bound", "range"};
  std::optional<std::size_t> bench_hall;
  std::string bench_method = "counter", csv_path;
  double bench_timeout = 600;
  bench_cmd->add_option("specs", bench_specs, "benchmark specs; numeric fields take ranges a..b")->required();
  bench_cmd->add_option("--encoding", bench_encodings, "encodings to run (repeatable)")
      ->allow_extra_args(false)
      ->check(CLI::IsMember({"direct", "support", "bound", "range"}));
  bench_cmd->add_option("--hall-limit", bench_hall, "Hall interval limit for bound and range");
  bench_cmd->add_option("--method", bench_method, "cardinality transform")
      ->check(CLI::IsMember({"counter", "binomial"}));
  bench_cmd->add_option("--timeout", bench_timeout, "per-run time limit in seconds")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--csv", csv_path, "also write CSV to this file ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*encode_cmd) {
      auto inst = casp::parse_instance(read_input(encode_input));
      auto kind = encode_flags.kind();
      auto enc = casp::encode(inst, kind);
      write_output(encode_output, casp::emit_ground(enc.program, encoding_header(inst, kind)));
      return 0;
    }

    if (*solve_cmd) {
      std::string text = read_input(solve_input);
      auto encoded = read_encoded(text);
      casp::Encoding enc = encoded ? std::move(*encoded) : casp::encode(casp::parse_instance(text), solve_flags.kind());
      casp::Prepared prepared = casp::prepare(std::move(enc), solve_flags.cardinality());
      if (!nogood_path.empty()) write_output(nogood_path, casp::dump_nogoods(prepared.store));
      casp::SolverConfig cfg;
      cfg.seed = solve_seed;
      cfg.time_limit_seconds = timeout;
      const auto& inst = prepared.encoding.source;
      if (enumerate_limit) {
        auto r = casp::enumerate_instance(prepared, *enumerate_limit, cfg);
        std::cout << (r.solutions.empty() ? casp::to_string(r.status) : "SAT") << '\n';
        for (std::size_t i = 0; i < r.solutions.size(); ++i) {
          std::cout << "solution " << i + 1 << '\n';
          print_solution(inst, r.solutions[i]);
        }
        std::cout << "solutions=" << r.solutions.size() << '\n';
        if (show_stats) std::cout << r.stats.to_string() << '\n';
        if (!r.solutions.empty()) return kExitSat;
        return r.status == casp::SolveStatus::Unsat ? kExitUnsat : kExitResource;
      }
      auto r = casp::solve_instance(prepared, cfg);
      std::cout << casp::to_string(r.status) << '\n';
      if (r.solution) print_solution(inst, *r.solution);
      if (show_stats) std::cout << r.stats.to_string() << '\n';
      switch (r.status) {
        case casp::SolveStatus::Sat: return kExitSat;
        case casp::SolveStatus::Unsat: return kExitUnsat;
        case casp::SolveStatus::Unknown: return kExitResource;
      }
    }

    if (*check_cmd) {
      casp::CheckOptions o;
      o.kind = check_flags.kind();
      o.level = parse_level(level);
      o.seed = check_seed;
      o.trials = trials;
      o.states_per_trial = states;
      o.method = check_flags.cardinality();
      auto report = casp::run_consistency_check(o);
      if (!report.witness) {
        std::cout << "agree " << report.agreed << '/' << report.trials << '\n';
        return 0;
      }
      const auto& w = *report.witness;
      std::cout << "disagree " << report.agreed << '/' << report.trials << '\n'
                << "witness instance:\n"
                << casp::write_instance(w.instance) << "seed domains:\n";
      print_state(w.instance, w.seed);
      std::cout << "oracle (" << casp::to_string(o.level) << "):\n";
      print_state(w.instance, w.expected);
      std::cout << "propagation (" << casp::to_string(o.kind.type) << "):\n";
      print_state(w.instance, w.actual);
      return 0;
    }

    if (*gen_cmd) {
      auto specs = casp::parse_bench_specs(gen_spec);
      if (specs.size() != 1) throw casp::Error("gen needs a single instance, not a range");
      write_output(gen_output, casp::write_instance(specs[0].generate()));
      return 0;
    }

    if (*bench_cmd) {
      std::vector<casp::BenchSpec> specs;
      for (const auto& s : bench_specs)
        for (auto& spec : casp::parse_bench_specs(s)) specs.push_back(spec);
      std::vector<casp::EncodingKind> kinds;
      for (const auto& e : bench_encodings) {
        auto type = casp::parse_encoding_type(e);
        bool hall = type == casp::EncodingType::Bound || type == casp::EncodingType::Range;
        kinds.push_back({type, hall ? bench_hall : std::nullopt});
      }
      casp::SuiteOptions o;
      o.timeout_seconds = bench_timeout;
      o.method = bench_method == "binomial" ? casp::CardinalityMethod::Binomial : casp::CardinalityMethod::Counter;
      auto rows = casp::run_suite(specs, kinds, o);
      if (csv_path != "-") std::cout << casp::format_table(rows);
      if (!csv_path.empty()) write_output(csv_path, casp::format_csv(rows));
      return 0;
    }
  } catch (const casp::CapExceeded& e) {
    std::cerr << "casp: " << e.what() << '\n';
    return kExitResource;
  } catch (const casp::Error& e) {
    std::cerr << "casp: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
