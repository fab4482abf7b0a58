#pragma once

#include <cctype>
#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "casp/error.hpp"
#include "casp/program.hpp"

namespace casp {

namespace detail {

inline void write_literals(std::ostream& out, const AtomTable& atoms, const std::vector<Literal>& ls,
                           const char* sep) {
  for (std::size_t i = 0; i < ls.size(); ++i) out << (i ? sep : "") << atoms.to_string(ls[i]);
}

}  // namespace detail

/// Writes `p` one statement per line. `%` lines in `header` are emitted first
/// as comments.
inline std::string emit_ground(const GroundProgram& p, const std::vector<std::string>& header = {}) {
  std::ostringstream out;
  for (const auto& h : header) out << "% " << h << '\n';
  const auto& atoms = p.atoms();
  for (const auto& rule : p.rules()) {
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, NormalRule>) {
            out << atoms.to_string(r.head);
            if (!r.body.empty()) {
              out << " :- ";
              detail::write_literals(out, atoms, r.body, ", ");
            }
          } else if constexpr (std::is_same_v<T, ChoiceRule>) {
            out << '{';
            for (std::size_t i = 0; i < r.heads.size(); ++i)
              out << (i ? "; " : "") << atoms.to_string(r.heads[i]);
            out << '}';
            if (!r.body.empty()) {
              out << " :- ";
              detail::write_literals(out, atoms, r.body, ", ");
            }
          } else if constexpr (std::is_same_v<T, IntegrityRule>) {
            out << ":- ";
            detail::write_literals(out, atoms, r.body, ", ");
          } else {
            out << ":- " << r.bound << " {";
            detail::write_literals(out, atoms, r.literals, "; ");
            out << '}';
          }
        },
        rule);
    out << ".\n";
  }
  return out.str();
}

namespace detail {

class GroundLexer {
 public:
  enum class Kind { Name, Int, If, LBrace, RBrace, LParen, RParen, Semi, Comma, Dot, End };
  struct Tok {
    Kind kind;
    std::string text;
    std::size_t line, column;
  };

  explicit GroundLexer(std::string_view text) : text_(text) { advance(); }

  const Tok& peek() const { return tok_; }
  Tok take() {
    Tok t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(tok_.line, tok_.column, what); }

 private:
  void advance() {
    for (;;) {
      if (pos_ >= text_.size()) {
        tok_ = {Kind::End, "", line_, col()};
        return;
      }
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        line_start_ = ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    std::size_t start = pos_;
    std::size_t column = col();
    char c = text_[pos_];
    auto single = [&](Kind k) {
      ++pos_;
      tok_ = {k, std::string(1, c), line_, column};
    };
    switch (c) {
      case '{': return single(Kind::LBrace);
      case '}': return single(Kind::RBrace);
      case '(': return single(Kind::LParen);
      case ')': return single(Kind::RParen);
      case ';': return single(Kind::Semi);
      case ',': return single(Kind::Comma);
      case '.': return single(Kind::Dot);
      default: break;
    }
    if (c == ':') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        pos_ += 2;
        tok_ = {Kind::If, ":-", line_, column};
        return;
      }
      throw ParseError(line_, column, "expected ':-'");
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      tok_ = {Kind::Int, std::string(text_.substr(start, pos_ - start)), line_, column};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      tok_ = {Kind::Name, std::string(text_.substr(start, pos_ - start)), line_, column};
      return;
    }
    throw ParseError(line_, column, std::string("unexpected character '") + c + "'");
  }

  std::size_t col() const { return pos_ - line_start_ + 1; }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
  Tok tok_{Kind::End, "", 1, 1};
};

class GroundParser {
 public:
  explicit GroundParser(std::string_view text) : lex_(text) {}

  GroundProgram parse() {
    using K = GroundLexer::Kind;
    while (lex_.peek().kind != K::End) statement();
    return std::move(prog_);
  }

 private:
  using K = GroundLexer::Kind;

  GroundLexer::Tok expect(K kind, const char* what) {
    if (lex_.peek().kind != kind) lex_.fail(std::string("expected ") + what + ", found '" + lex_.peek().text + "'");
    return lex_.take();
  }

  int integer() {
    auto t = expect(K::Int, "an integer");
    int v{};
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw ParseError(t.line, t.column, "bad integer '" + t.text + "'");
    return v;
  }

  AtomId atom() {
    auto t = expect(K::Name, "an atom");
    if (t.text == "not") throw ParseError(t.line, t.column, "'not' cannot name an atom");
    std::vector<int> args;
    if (lex_.peek().kind == K::LParen) {
      lex_.take();
      args.push_back(integer());
      while (lex_.peek().kind == K::Comma) {
        lex_.take();
        args.push_back(integer());
      }
      expect(K::RParen, "')'");
    }
    return prog_.atom(t.text, std::move(args));
  }

  Literal literal() {
    if (lex_.peek().kind == K::Name && lex_.peek().text == "not") {
      lex_.take();
      return neg(atom());
    }
    return pos(atom());
  }

  // Body up to and including the terminating '.'. May be empty.
  std::vector<Literal> body() {
    std::vector<Literal> out;
    if (lex_.peek().kind == K::Dot) {
      lex_.take();
      return out;
    }
    out.push_back(literal());
    while (lex_.peek().kind == K::Comma) {
      lex_.take();
      out.push_back(literal());
    }
    expect(K::Dot, "',' or '.'");
    return out;
  }

  void statement() {
    const auto start = lex_.peek();
    try {
      if (start.kind == K::If) {
        lex_.take();
        if (lex_.peek().kind == K::Int) {
          int k = integer();
          if (k < 1) throw ParseError(start.line, start.column, "cardinality bound must be at least 1");
          expect(K::LBrace, "'{'");
          std::vector<Literal> lits{literal()};
          while (lex_.peek().kind == K::Semi) {
            lex_.take();
            lits.push_back(literal());
          }
          expect(K::RBrace, "'}'");
          expect(K::Dot, "'.'");
          prog_.add_cardinality(static_cast<std::size_t>(k), std::move(lits));
        } else {
          prog_.add_integrity(body());
        }
      } else if (start.kind == K::LBrace) {
        lex_.take();
        std::vector<AtomId> heads{atom()};
        while (lex_.peek().kind == K::Semi) {
          lex_.take();
          heads.push_back(atom());
        }
        expect(K::RBrace, "'}'");
        std::vector<Literal> b;
        if (lex_.peek().kind == K::If) {
          lex_.take();
          b = body();
        } else {
          expect(K::Dot, "':-' or '.'");
        }
        prog_.add_choice(std::move(heads), std::move(b));
      } else {
        AtomId head = atom();
        std::vector<Literal> b;
        if (lex_.peek().kind == K::If) {
          lex_.take();
          b = body();
        } else {
          expect(K::Dot, "':-' or '.'");
        }
        prog_.add_normal(head, std::move(b));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(start.line, start.column, e.what());
    }
  }

  GroundLexer lex_;
  GroundProgram prog_;
};

}  // namespace detail

/// Parses the text written by emit_ground. `%` starts a comment.
inline GroundProgram parse_ground(std::string_view text) { return detail::GroundParser(text).parse(); }

/// Leading `% ...` comment lines of a ground program text, without the marker.
inline std::vector<std::string> ground_header(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '%') break;
    std::size_t i = 1;
    while (i < line.size() && line[i] == ' ') ++i;
    out.push_back(line.substr(i));
  }
  return out;
}

}  // namespace casp
