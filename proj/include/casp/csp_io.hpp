#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "casp/csp.hpp"
#include "casp/error.hpp"

namespace casp {

namespace detail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

inline bool is_punct(char c) { return c == '(' || c == ')' || c == ':' || c == '{' || c == '}'; }

// Splits one line into words and the punctuation ( ) : { }. Commas separate like
// whitespace; '#' starts a comment.
inline std::vector<Token> tokenize_line(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      ++i;
      continue;
    }
    if (is_punct(c)) {
      out.push_back({std::string(1, c), i + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != ',' &&
           line[j] != '#' && !is_punct(line[j]))
      ++j;
    out.push_back({std::string(line.substr(i, j - i)), i + 1});
    i = j;
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line) : tokens_(std::move(tokens)), line_(line) {}

  bool done() const { return pos_ >= tokens_.size(); }
  bool peek_is(std::string_view s) const { return !done() && tokens_[pos_].text == s; }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t col = done() ? (tokens_.empty() ? 0 : tokens_.back().column) : tokens_[pos_].column;
    throw ParseError(line_, col, what);
  }

  const Token& next(const char* expected) {
    if (done()) fail(std::string("expected ") + expected + " at end of line");
    return tokens_[pos_++];
  }

  void expect(std::string_view s) {
    const Token& t = next(std::string(s).c_str());
    if (t.text != s) {
      --pos_;
      fail("expected '" + std::string(s) + "', found '" + t.text + "'");
    }
  }

  std::string identifier() {
    const Token& t = next("a name");
    if (!is_identifier(t.text)) {
      --pos_;
      fail("expected a name, found '" + t.text + "'");
    }
    return t.text;
  }

  Value integer() {
    const Token& t = next("an integer");
    Value v{};
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    if (!t.text.empty() && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || b == e) {
      --pos_;
      fail("expected an integer, found '" + t.text + "'");
    }
    return v;
  }

  void expect_end() {
    if (!done()) fail("unexpected '" + tokens_[pos_].text + "'");
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace detail

/// Parses the line-oriented instance format:
///
///     var NAME LO HI | var NAME { v1 v2 ... }
///     alldifferent NAME+ | permutation NAME+
///     allowed (NAME+) : (INT+)+ | forbidden (NAME+) : (INT+)+
///     assign NAME INT
///
/// Errors carry the line and column of the offending token.
inline CspInstance parse_instance(std::string_view text) {
  CspInstance inst;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    auto tokens = detail::tokenize_line(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    detail::LineParser p(tokens, line_no);

    auto lookup = [&](const std::string& name) {
      auto idx = inst.find(name);
      if (!idx) p.fail("undeclared variable '" + name + "'");
      return *idx;
    };
    auto semantic = [&](auto&& action) {
      try {
        action();
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(line_no, tokens.front().column, e.what());
      }
    };

    std::string keyword = p.next("a keyword").text;
    if (keyword == "var") {
      std::string name = p.identifier();
      std::vector<Value> domain;
      if (p.peek_is("{")) {
        p.expect("{");
        while (!p.peek_is("}")) domain.push_back(p.integer());
        p.expect("}");
      } else {
        Value lo = p.integer();
        Value hi = p.integer();
        if (static_cast<long long>(hi) - lo >= 10'000'000) p.fail("domain interval too large");
        for (long long v = lo; v <= hi; ++v) domain.push_back(static_cast<Value>(v));
      }
      p.expect_end();
      semantic([&] { inst.add_variable(name, std::move(domain)); });
    } else if (keyword == "alldifferent" || keyword == "permutation") {
      std::vector<VarIndex> scope;
      while (!p.done()) scope.push_back(lookup(p.identifier()));
      if (scope.empty()) p.fail("expected at least one variable");
      semantic([&] {
        inst.add_constraint(keyword == "alldifferent" ? Constraint::all_different(std::move(scope))
                                                      : Constraint::permutation(std::move(scope)));
      });
    } else if (keyword == "allowed" || keyword == "forbidden") {
      std::vector<VarIndex> scope;
      p.expect("(");
      while (!p.peek_is(")")) scope.push_back(lookup(p.identifier()));
      p.expect(")");
      if (scope.empty()) p.fail("expected at least one variable");
      p.expect(":");
      std::vector<Tuple> tuples;
      while (!p.done()) {
        p.expect("(");
        Tuple t;
        while (!p.peek_is(")")) t.push_back(p.integer());
        p.expect(")");
        if (t.size() != scope.size())
          p.fail("tuple arity " + std::to_string(t.size()) + " does not match scope size " +
                 std::to_string(scope.size()));
        tuples.push_back(std::move(t));
      }
      auto polarity = keyword == "allowed" ? TablePolarity::Allowed : TablePolarity::Forbidden;
      semantic([&] { inst.add_constraint(Constraint::table(std::move(scope), polarity, std::move(tuples))); });
    } else if (keyword == "assign") {
      VarIndex var = lookup(p.identifier());
      Value v = p.integer();
      p.expect_end();
      semantic([&] { inst.assign(var, v); });
    } else {
      throw ParseError(line_no, tokens.front().column, "unknown statement '" + keyword + "'");
    }
    if (end == text.size()) break;
  }
  return inst;
}

namespace detail {

inline void write_domain(std::ostream& out, const std::vector<Value>& domain) {
  bool contiguous = static_cast<long long>(domain.back()) - domain.front() + 1 ==
                    static_cast<long long>(domain.size());
  if (contiguous) {
    out << domain.front() << ' ' << domain.back();
    return;
  }
  out << '{';
  for (Value v : domain) out << ' ' << v;
  out << " }";
}

}  // namespace detail

/// Canonical text of an instance: declarations with their original domains,
/// then constraints and `assign` lines in the order they were added.
/// parse_instance(write_instance(i)) == i.
inline std::string write_instance(const CspInstance& inst) {
  std::ostringstream out;
  std::map<VarIndex, const std::vector<Value>*> original;
  for (const auto& a : inst.assignments()) original.emplace(a.var, &a.previous_domain);
  for (VarIndex i = 0; i < inst.size(); ++i) {
    const auto& v = inst.variable(i);
    out << "var " << v.name << ' ';
    auto it = original.find(i);
    detail::write_domain(out, it == original.end() ? v.domain : *it->second);
    out << '\n';
  }
  std::size_t next_assign = 0;
  auto flush_assigns = [&](std::size_t constraints_written) {
    for (; next_assign < inst.assignments().size() &&
           inst.assignments()[next_assign].after_constraints <= constraints_written;
         ++next_assign) {
      const auto& a = inst.assignments()[next_assign];
      out << "assign " << inst.variable(a.var).name << ' ' << a.value << '\n';
    }
  };
  for (std::size_t ci = 0; ci < inst.constraints().size(); ++ci) {
    flush_assigns(ci);
    const auto& c = inst.constraints()[ci];
    switch (c.kind) {
      case ConstraintKind::AllDifferent:
      case ConstraintKind::Permutation:
        out << (c.kind == ConstraintKind::AllDifferent ? "alldifferent" : "permutation");
        for (VarIndex v : c.scope) out << ' ' << inst.variable(v).name;
        break;
      case ConstraintKind::Table:
        out << (c.polarity == TablePolarity::Allowed ? "allowed (" : "forbidden (");
        for (std::size_t j = 0; j < c.scope.size(); ++j)
          out << (j ? " " : "") << inst.variable(c.scope[j]).name;
        out << ") :";
        for (const auto& t : c.tuples) {
          out << " (";
          for (std::size_t j = 0; j < t.size(); ++j) out << (j ? " " : "") << t[j];
          out << ')';
        }
        break;
    }
    out << '\n';
  }
  flush_assigns(inst.constraints().size());
  return out.str();
}

}  // namespace casp
