// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_PARSE_HPP
#define FLOWLAT_PARSE_HPP

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowlat/ast.hpp"
#include "flowlat/error.hpp"

namespace flowlat {

struct ParseOptions {
  /// Accept fixed-variable occurrences `x@T`. Off by default; plain
  /// (floating) programs must not mention levels.
  bool allow_fixed = false;
};

namespace detail {

enum class Tok {
  End,
  Int,
  Ident,
  Assign,  // :=
  Semi,    // ;
  At,      // @
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Plus,
  Minus,
  Star,
  EqEq,
  NotEq,
  Lt,
  Le,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.line, tok_.col);
  }

private:
  void advance() {
    skip_trivia();
    tok_.line = line_;
    tok_.col = col();
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, "", line_, col()};
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
      tok_.kind = Tok::Int;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        ++pos_;
      tok_.kind = Tok::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    switch (c) {
    case ';': single(Tok::Semi, ";"); return;
    case '@': single(Tok::At, "@"); return;
    case '(': single(Tok::LParen, "("); return;
    case ')': single(Tok::RParen, ")"); return;
    case '{': single(Tok::LBrace, "{"); return;
    case '}': single(Tok::RBrace, "}"); return;
    case ',': single(Tok::Comma, ","); return;
    case '+': single(Tok::Plus, "+"); return;
    case '-': single(Tok::Minus, "-"); return;
    case '*': single(Tok::Star, "*"); return;
    case ':':
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
        pos_ += 2;
        tok_.kind = Tok::Assign;
        tok_.text = ":=";
        return;
      }
      throw ParseError("expected ':='", line_, col());
    case '=':
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
        pos_ += 2;
        tok_.kind = Tok::EqEq;
        tok_.text = "==";
        return;
      }
      throw ParseError("unexpected '='; use ':=' for assignment or '==' for "
                       "comparison",
                       line_, col());
    case '!':
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
        pos_ += 2;
        tok_.kind = Tok::NotEq;
        tok_.text = "!=";
        return;
      }
      throw ParseError("unexpected '!'", line_, col());
    case '<':
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
        pos_ += 2;
        tok_.kind = Tok::Le;
        tok_.text = "<=";
        return;
      }
      single(Tok::Lt, "<");
      return;
    default:
      throw ParseError(std::string("unexpected character '") + c + "'", line_,
                       col());
    }
  }

  void single(Tok kind, const char* text) {
    ++pos_;
    tok_.kind = kind;
    tok_.text = text;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        line_start_ = pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  int col() const { return static_cast<int>(pos_ - line_start_) + 1; }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  Token tok_{Tok::End, "", 1, 1};
};

inline bool is_keyword(const std::string& s) {
  return s == "skip" || s == "if" || s == "then" || s == "else" ||
         s == "end" || s == "while" || s == "do";
}

class Parser {
public:
  Parser(std::string_view src, ParseOptions opts) : lex_(src), opts_(opts) {}

  CommandPtr parse_program() {
    if (lex_.peek().kind == Tok::End) lex_.fail("empty program");
    CommandPtr c = parse_command();
    expect(Tok::End, "end of input");
    return c;
  }

  ExprPtr parse_expression() {
    ExprPtr e = parse_expr();
    expect(Tok::End, "end of input");
    return e;
  }

private:
  // command := simple (";" simple)*, folded to the left
  CommandPtr parse_command() {
    CommandPtr c = parse_simple();
    while (lex_.peek().kind == Tok::Semi) {
      lex_.take();
      c = seq(c, parse_simple());
    }
    return c;
  }

  CommandPtr parse_simple() {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Ident)
      lex_.fail("expected a command, found '" + describe(t) + "'");
    if (t.text == "skip") {
      lex_.take();
      return skip();
    }
    if (t.text == "if") {
      lex_.take();
      ExprPtr cond = parse_expr();
      expect_keyword("then");
      CommandPtr then_branch = parse_command();
      CommandPtr else_branch;
      if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "else") {
        lex_.take();
        else_branch = parse_command();
      } else {
        else_branch = skip();
      }
      expect_keyword("end");
      return if_then_else(std::move(cond), std::move(then_branch),
                          std::move(else_branch));
    }
    if (t.text == "while") {
      lex_.take();
      ExprPtr cond = parse_expr();
      expect_keyword("do");
      CommandPtr body = parse_command();
      expect_keyword("end");
      return while_do(std::move(cond), std::move(body));
    }
    if (is_keyword(t.text))
      lex_.fail("unexpected keyword '" + t.text + "'");
    VarRef target = parse_var_ref();
    expect(Tok::Assign, "':='");
    ExprPtr rhs = parse_expr();
    return assign(std::move(target), std::move(rhs));
  }

  // expr := add (cmpop add)*
  ExprPtr parse_expr() {
    ExprPtr e = parse_add();
    while (true) {
      BinOp op;
      switch (lex_.peek().kind) {
      case Tok::EqEq: op = BinOp::Eq; break;
      case Tok::NotEq: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      default: return e;
      }
      lex_.take();
      e = bin(op, e, parse_add());
    }
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
      BinOp op = lex_.take().kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      e = bin(op, e, parse_mul());
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_atom();
    while (lex_.peek().kind == Tok::Star) {
      lex_.take();
      e = bin(BinOp::Mul, e, parse_atom());
    }
    return e;
  }

  ExprPtr parse_atom() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Int) return lit(Value(lex_.take().text));
    if (t.kind == Tok::Minus) {
      lex_.take();
      if (lex_.peek().kind != Tok::Int)
        lex_.fail("expected an integer after '-'");
      return lit(-Value(lex_.take().text));
    }
    if (t.kind == Tok::LParen) {
      lex_.take();
      ExprPtr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (is_keyword(t.text)) lex_.fail("unexpected keyword '" + t.text + "'");
      return var_ref(parse_var_ref());
    }
    lex_.fail("expected an expression, found '" + describe(t) + "'");
  }

  VarRef parse_var_ref() {
    Token name = lex_.take();
    VarRef ref{name.text, {}};
    if (lex_.peek().kind == Tok::At) {
      if (!opts_.allow_fixed)
        throw ParseError("fixed-variable syntax 'x@T' is not allowed here",
                         lex_.peek().line, lex_.peek().col);
      lex_.take();
      ref.level = parse_level();
    }
    return ref;
  }

  // level := ident | "{" [ident ("," ident)*] "}"
  std::string parse_level() {
    if (lex_.peek().kind == Tok::Ident) {
      Token t = lex_.take();
      if (is_keyword(t.text)) lex_.fail("unexpected keyword '" + t.text + "'");
      return t.text;
    }
    if (lex_.peek().kind == Tok::LBrace) {
      lex_.take();
      std::string out = "{";
      bool first = true;
      while (lex_.peek().kind == Tok::Ident) {
        if (!first) out += ",";
        first = false;
        out += lex_.take().text;
        if (lex_.peek().kind == Tok::Comma)
          lex_.take();
        else
          break;
      }
      expect(Tok::RBrace, "'}'");
      return out += "}";
    }
    lex_.fail("expected a level name after '@'");
  }

  void expect(Tok kind, const std::string& what) {
    if (lex_.peek().kind != kind)
      lex_.fail("expected " + what + ", found '" + describe(lex_.peek()) +
                "'");
    lex_.take();
  }

  void expect_keyword(const std::string& kw) {
    if (lex_.peek().kind != Tok::Ident || lex_.peek().text != kw)
      lex_.fail("expected '" + kw + "', found '" + describe(lex_.peek()) +
                "'");
    lex_.take();
  }

  static std::string describe(const Token& t) {
    return t.kind == Tok::End ? "end of input" : t.text;
  }

  Lexer lex_;
  ParseOptions opts_;
};

} // namespace detail

/// Parse a program in the While grammar. Throws ParseError on bad input.
inline CommandPtr parse_program(std::string_view src, ParseOptions opts = {}) {
  return detail::Parser(src, opts).parse_program();
}

/// Parse a single expression (the full input must be one expression).
inline ExprPtr parse_expression(std::string_view src, ParseOptions opts = {}) {
  return detail::Parser(src, opts).parse_expression();
}

} // namespace flowlat

#endif
