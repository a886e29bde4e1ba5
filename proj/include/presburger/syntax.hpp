// Text syntax: canonical printer and recursive-descent parser.
//
// Grammar (lowest to highest precedence):
//   formula  := quant | disj
//   quant    := ("exists" | "forall") ident ("," ident)* "." formula
//   disj     := conj ("or" conj)*
//   conj     := unary ("and" unary)*
//   unary    := "not" unary | quant | "(" formula ")" | "true" | "false" | atom
//   atom     := INT "|" term | term rel term (rel term)*
//   rel      := "<" | "<=" | ">" | ">=" | "=" | "!="
//   term     := product (("+" | "-") product)*
//   product  := factor ("*" factor)*        at most one non-constant factor
//   factor   := INT | ident | "(" term ")" | "-" factor
#pragma once

#include "presburger/formula.hpp"

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace presburger {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

/// Product of two non-constant terms.
class NonLinearError : public ParseError {
 public:
  using ParseError::ParseError;
};

// ---------------------------------------------------------------------------
// Printer

namespace detail {

inline std::string atom_text(const Atom& a) {
  switch (a.kind) {
    case AtomKind::Eq:
      return a.term.to_string() + " = 0";
    case AtomKind::Gt:
      return a.term.to_string() + " > 0";
    case AtomKind::Div:
      return a.modulus.get_str() + " | " + a.term.to_string();
  }
  return {};
}

// level 0: anywhere, 1: operand of or, 2: operand of and, 3: operand of not
inline void print(const Formula& f, int level, std::string& out) {
  auto wrap = [&](bool paren, auto&& body) {
    if (paren) out += "(";
    body();
    if (paren) out += ")";
  };
  switch (f.kind()) {
    case Kind::True:
      out += "true";
      return;
    case Kind::False:
      out += "false";
      return;
    case Kind::Atom:
      wrap(level >= 3, [&] { out += atom_text(f.atom()); });
      return;
    case Kind::Not:
      wrap(level >= 3, [&] {
        out += "not ";
        print(f.body(), 3, out);
      });
      return;
    case Kind::And:
    case Kind::Or: {
      bool is_and = f.kind() == Kind::And;
      wrap(level >= (is_and ? 3 : 2), [&] {
        bool first = true;
        for (const auto& k : f.kids()) {
          if (!first) out += is_and ? " and " : " or ";
          print(k, is_and ? 2 : 1, out);
          first = false;
        }
      });
      return;
    }
    case Kind::Exists:
    case Kind::Forall:
      wrap(level >= 1, [&] {
        out += f.kind() == Kind::Exists ? "exists " : "forall ";
        out += f.var();
        out += ". ";
        print(f.body(), 0, out);
      });
      return;
  }
}

}  // namespace detail

/// Canonical, deterministic text in the input grammar.
inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print(f, 0, out);
  return out;
}

inline std::string to_string(const Atom& a) { return detail::atom_text(a); }

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line, column;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> toks;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    std::size_t l = line, cl = col;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      toks.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      toks.push_back({Tok::Int, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
    } else {
      std::string two(src.substr(i, 2));
      if (two == "<=" || two == ">=" || two == "!=") {
        toks.push_back({Tok::Sym, two, l, cl});
        advance(2);
      } else if (std::string_view("+-*().,|<>=").find(static_cast<char>(c)) != std::string_view::npos) {
        toks.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), l, cl});
        advance(1);
      } else {
        throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", l, cl);
      }
    }
  }
  toks.push_back({Tok::End, "", line, col});
  return toks;
}

inline bool is_keyword(const std::string& s) {
  return s == "and" || s == "or" || s == "not" || s == "exists" || s == "forall" || s == "true" || s == "false";
}

inline bool is_relation(const Token& t) {
  return t.kind == Tok::Sym &&
         (t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=" || t.text == "=" || t.text == "!=");
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool at_word(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, t.line, t.column);
  }
  void expect_sym(const char* s) {
    if (!at_sym(s)) fail(std::string("expected '") + s + "'" + (peek().kind == Tok::End ? " at end of input" : ""));
    ++pos_;
  }
  std::string ident() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected variable name");
    return toks_[pos_++].text;
  }

  Formula formula() {
    if (at_word("exists") || at_word("forall")) return quantifier();
    std::vector<Formula> parts{conjunction()};
    while (at_word("or")) {
      ++pos_;
      if (at_word("exists") || at_word("forall")) {
        parts.push_back(quantifier());
        break;
      }
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? parts.front() : Formula::disj(std::move(parts));
  }

  Formula quantifier() {
    bool ex = at_word("exists");
    ++pos_;
    std::vector<std::string> vars{ident()};
    while (at_sym(",")) {
      ++pos_;
      vars.push_back(ident());
    }
    expect_sym(".");
    Formula body = formula();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = ex ? Formula::exists(*it, body) : Formula::forall(*it, body);
    return body;
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (at_word("and")) {
      ++pos_;
      if (at_word("exists") || at_word("forall")) {
        parts.push_back(quantifier());
        break;
      }
      parts.push_back(unary());
    }
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  Formula unary() {
    if (at_word("not")) {
      ++pos_;
      if (at_word("exists") || at_word("forall")) return Formula::neg(quantifier());
      return Formula::neg(unary());
    }
    if (at_word("exists") || at_word("forall")) return quantifier();
    if (at_word("true")) {
      ++pos_;
      return Formula::truth();
    }
    if (at_word("false")) {
      ++pos_;
      return Formula::falsity();
    }
    if (at_sym("(")) {
      std::size_t save = pos_;
      try {
        ++pos_;
        Formula f = formula();
        expect_sym(")");
        const Token& nx = peek();
        bool continues_term = is_relation(nx) || (nx.kind == Tok::Sym && (nx.text == "+" || nx.text == "-" ||
                                                                           nx.text == "*" || nx.text == "|"));
        if (!continues_term) return f;
      } catch (const NonLinearError&) {
        throw;
      } catch (const ParseError&) {
      }
      pos_ = save;
    }
    return atom();
  }

  Formula atom() {
    if (peek().kind == Tok::Int && peek(1).kind == Tok::Sym && peek(1).text == "|") {
      Int n = parse_int(peek().text);
      if (n < 1) fail("divisibility modulus must be positive");
      pos_ += 2;
      return Formula::divides(n, term());
    }
    LinearTerm lhs = term();
    if (!is_relation(peek())) fail("expected relation");
    std::vector<Formula> parts;
    while (is_relation(peek())) {
      std::string rel = toks_[pos_++].text;
      LinearTerm rhs = term();
      parts.push_back(relation(rel, lhs, rhs));
      lhs = rhs;
    }
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  static Formula relation(const std::string& rel, const LinearTerm& l, const LinearTerm& r) {
    if (rel == ">") return Formula::gt(l - r);
    if (rel == "<") return Formula::gt(r - l);
    if (rel == ">=") return Formula::gt(l - r + LinearTerm(1));
    if (rel == "<=") return Formula::gt(r - l + LinearTerm(1));
    if (rel == "=") return Formula::eq(l - r);
    return Formula::neg(Formula::eq(l - r));  // "!="
  }

  LinearTerm term() {
    LinearTerm t = product();
    while (at_sym("+") || at_sym("-")) {
      bool plus = at_sym("+");
      ++pos_;
      LinearTerm p = product();
      t = plus ? t + p : t - p;
    }
    return t;
  }

  LinearTerm product() {
    const Token start = peek();
    LinearTerm t = factor();
    while (at_sym("*")) {
      ++pos_;
      LinearTerm f = factor();
      if (t.is_constant()) {
        t = f * t.constant();
      } else if (f.is_constant()) {
        t = t * f.constant();
      } else {
        throw NonLinearError("non-linear term: product of two variables", start.line, start.column);
      }
    }
    return t;
  }

  LinearTerm factor() {
    if (at_sym("-")) {
      ++pos_;
      return -factor();
    }
    if (peek().kind == Tok::Int) return LinearTerm(parse_int(toks_[pos_++].text));
    if (at_sym("(")) {
      ++pos_;
      LinearTerm t = term();
      expect_sym(")");
      return t;
    }
    return LinearTerm::var(ident());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline Formula uniquify_bound(const Formula& f, std::set<std::string>& used) {
  if (f.is_quantifier()) {
    std::string v = f.var();
    Formula body = f.body();
    if (used.count(v)) {
      std::set<std::string> avoid = used;
      std::set<std::string> inner = all_vars(body);
      avoid.insert(inner.begin(), inner.end());
      std::string nv = fresh_name(v, avoid);
      body = substitute(body, v, LinearTerm::var(nv));
      v = nv;
    }
    used.insert(v);
    body = uniquify_bound(body, used);
    return f.kind() == Kind::Exists ? Formula::exists(v, body) : Formula::forall(v, body);
  }
  if (f.kids().empty()) return f;
  std::vector<Formula> kids;
  for (const auto& k : f.kids()) kids.push_back(uniquify_bound(k, used));
  return rebuild(f, std::move(kids));
}

}  // namespace detail

/// Parse formula text. Comparison sugar is reduced to `= 0`, `> 0` and
/// divisibility atoms; bound variables are renamed to be globally unique.
inline Formula parse(std::string_view text) {
  Formula f = detail::Parser(text).parse_all();
  std::set<std::string> used = free_vars(f);
  return detail::uniquify_bound(f, used);
}

/// Parse a term such as `x - 2*y + 3`.
inline LinearTerm parse_term(std::string_view text) {
  Formula f = parse(std::string(text) + " = 0");
  if (!f.is_atom()) throw ParseError("not a term", 1, 1);
  return f.atom().term;
}

}  // namespace presburger
