#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "detox/ast.hpp"
#include "detox/digest.hpp"

namespace detox {

enum class ParseErrorKind : uint8_t {
  Syntax,
  DuplicateIdentifier,
  UndeclaredIdentifier,
  ImpureAssertion,
  InitOutOfRange,
  BadIndexing,     // array used without index, or scalar indexed
  InitCountMismatch,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, uint32_t line, uint32_t col, const std::string& what)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        kind_(kind),
        line_(line),
        col_(col) {}

  ParseErrorKind kind() const { return kind_; }
  uint32_t line() const { return line_; }
  uint32_t col() const { return col_; }

 private:
  ParseErrorKind kind_;
  uint32_t line_;
  uint32_t col_;
};

namespace detail {

enum class TokKind : uint8_t {
  End,
  Ident,
  Int,
  KwVar,
  KwArray,
  KwAssert,
  KwOutput,
  KwIf,
  KwElse,
  KwWhile,
  KwCost,
  KwAnd,
  KwOr,
  KwNot,
  Assign,   // =
  Colon,
  Comma,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  uint64_t value = 0;  // for Int
  uint32_t line = 1;
  uint32_t col = 1;
};

inline const char* tok_name(TokKind k) {
  switch (k) {
    case TokKind::End: return "end of input";
    case TokKind::Ident: return "identifier";
    case TokKind::Int: return "integer";
    case TokKind::KwVar: return "'var'";
    case TokKind::KwArray: return "'array'";
    case TokKind::KwAssert: return "'assert'";
    case TokKind::KwOutput: return "'output'";
    case TokKind::KwIf: return "'if'";
    case TokKind::KwElse: return "'else'";
    case TokKind::KwWhile: return "'while'";
    case TokKind::KwCost: return "'cost'";
    case TokKind::KwAnd: return "'and'";
    case TokKind::KwOr: return "'or'";
    case TokKind::KwNot: return "'not'";
    case TokKind::Assign: return "'='";
    case TokKind::Colon: return "':'";
    case TokKind::Comma: return "','";
    case TokKind::LBracket: return "'['";
    case TokKind::RBracket: return "']'";
    case TokKind::LBrace: return "'{'";
    case TokKind::RBrace: return "'}'";
    case TokKind::LParen: return "'('";
    case TokKind::RParen: return "')'";
    case TokKind::Plus: return "'+'";
    case TokKind::Minus: return "'-'";
    case TokKind::Star: return "'*'";
    case TokKind::Slash: return "'/'";
    case TokKind::Percent: return "'%'";
    case TokKind::Lt: return "'<'";
    case TokKind::Le: return "'<='";
    case TokKind::Gt: return "'>'";
    case TokKind::Ge: return "'>='";
    case TokKind::EqEq: return "'=='";
    case TokKind::Ne: return "'!='";
  }
  return "?";
}

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  uint32_t line = 1;
  uint32_t col = 1;
  size_t i = 0;

  auto error = [&](const std::string& msg) {
    throw ParseError(ParseErrorKind::Syntax, line, col, msg);
  };
  auto push = [&](TokKind k, std::string text, uint64_t v = 0) {
    out.push_back(Token{k, std::move(text), v, line, col});
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {  // line comment
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      uint32_t start_col = col;
      uint64_t v = 0;
      size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        v = v * 10 + static_cast<uint64_t>(src[i] - '0');
        if (v > 0xFFFFFFFFull) error("integer constant exceeds 32 bits");
        ++i;
        ++col;
      }
      out.push_back(Token{TokKind::Int, std::string(src.substr(start, i - start)), v, line, start_col});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      uint32_t start_col = col;
      size_t start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        ++i;
        ++col;
      }
      std::string word(src.substr(start, i - start));
      TokKind k = TokKind::Ident;
      if (word == "var") k = TokKind::KwVar;
      else if (word == "array") k = TokKind::KwArray;
      else if (word == "assert") k = TokKind::KwAssert;
      else if (word == "output") k = TokKind::KwOutput;
      else if (word == "if") k = TokKind::KwIf;
      else if (word == "else") k = TokKind::KwElse;
      else if (word == "while") k = TokKind::KwWhile;
      else if (word == "cost") k = TokKind::KwCost;
      else if (word == "and") k = TokKind::KwAnd;
      else if (word == "or") k = TokKind::KwOr;
      else if (word == "not") k = TokKind::KwNot;
      out.push_back(Token{k, std::move(word), 0, line, start_col});
      continue;
    }

    auto two = [&](char next) { return i + 1 < src.size() && src[i + 1] == next; };
    switch (c) {
      case '=':
        if (two('=')) { push(TokKind::EqEq, "=="); i += 2; col += 2; }
        else { push(TokKind::Assign, "="); ++i; ++col; }
        break;
      case '!':
        if (two('=')) { push(TokKind::Ne, "!="); i += 2; col += 2; }
        else error("stray '!'");
        break;
      case '<':
        if (two('=')) { push(TokKind::Le, "<="); i += 2; col += 2; }
        else { push(TokKind::Lt, "<"); ++i; ++col; }
        break;
      case '>':
        if (two('=')) { push(TokKind::Ge, ">="); i += 2; col += 2; }
        else { push(TokKind::Gt, ">"); ++i; ++col; }
        break;
      case ':': push(TokKind::Colon, ":"); ++i; ++col; break;
      case ',': push(TokKind::Comma, ","); ++i; ++col; break;
      case '[': push(TokKind::LBracket, "["); ++i; ++col; break;
      case ']': push(TokKind::RBracket, "]"); ++i; ++col; break;
      case '{': push(TokKind::LBrace, "{"); ++i; ++col; break;
      case '}': push(TokKind::RBrace, "}"); ++i; ++col; break;
      case '(': push(TokKind::LParen, "("); ++i; ++col; break;
      case ')': push(TokKind::RParen, ")"); ++i; ++col; break;
      case '+': push(TokKind::Plus, "+"); ++i; ++col; break;
      case '-': push(TokKind::Minus, "-"); ++i; ++col; break;
      case '*': push(TokKind::Star, "*"); ++i; ++col; break;
      case '/': push(TokKind::Slash, "/"); ++i; ++col; break;
      case '%': push(TokKind::Percent, "%"); ++i; ++col; break;
      default: error(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back(Token{TokKind::End, "", 0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(lex(src)) {
    program_.source_digest = detox::source_digest(src);
  }

  Program run() {
    while (at(TokKind::KwVar) || at(TokKind::KwArray)) parse_vardecl();
    while (!at(TokKind::End)) program_.body.push_back(parse_stmt());
    return std::move(program_);
  }

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
  Program program_;
  std::unordered_map<std::string, uint32_t> var_index_;
  std::unordered_map<std::string, uint32_t> assertion_index_;
  bool in_predicate_ = false;

  const Token& cur() const { return tokens_[pos_]; }
  bool at(TokKind k) const { return cur().kind == k; }

  [[noreturn]] void fail(ParseErrorKind kind, const Token& t, const std::string& msg) {
    throw ParseError(kind, t.line, t.col, msg);
  }

  Token take(TokKind k, const char* what) {
    if (!at(k)) {
      // An '=' where an expression context expects something else is the
      // impure-assertion signature, not a plain syntax slip.
      if (in_predicate_ && at(TokKind::Assign))
        fail(ParseErrorKind::ImpureAssertion, cur(),
             "assignment inside assertion predicate");
      fail(ParseErrorKind::Syntax, cur(),
           std::string("expected ") + what + ", got " + tok_name(cur().kind));
    }
    return tokens_[pos_++];
  }

  uint32_t take_width() {
    Token t = take(TokKind::Int, "element width (8, 16 or 32)");
    if (t.value != 8 && t.value != 16 && t.value != 32)
      fail(ParseErrorKind::Syntax, t, "element width must be 8, 16 or 32");
    return static_cast<uint32_t>(t.value);
  }

  uint32_t take_const(uint32_t width, const char* what) {
    Token t = take(TokKind::Int, what);
    uint64_t limit = (width >= 32) ? 0xFFFFFFFFull : ((1ull << width) - 1);
    if (t.value > limit)
      fail(ParseErrorKind::InitOutOfRange, t,
           "initializer " + t.text + " does not fit in " + std::to_string(width) + " bits");
    return static_cast<uint32_t>(t.value);
  }

  void declare_var(VarDecl decl, const Token& name_tok) {
    if (var_index_.count(decl.name))
      fail(ParseErrorKind::DuplicateIdentifier, name_tok,
           "duplicate variable '" + decl.name + "'");
    var_index_.emplace(decl.name, static_cast<uint32_t>(program_.vars.size()));
    program_.vars.push_back(std::move(decl));
  }

  void parse_vardecl() {
    bool is_array = at(TokKind::KwArray);
    ++pos_;  // var / array
    Token name = take(TokKind::Ident, "variable name");
    take(TokKind::Colon, "':'");
    VarDecl decl;
    decl.name = name.text;
    decl.is_array = is_array;
    decl.width = take_width();
    if (is_array) {
      take(TokKind::LBracket, "'['");
      Token len = take(TokKind::Int, "array length");
      if (len.value < 1)
        fail(ParseErrorKind::Syntax, len, "array length must be at least 1");
      decl.length = static_cast<uint32_t>(len.value);
      take(TokKind::RBracket, "']'");
    }
    take(TokKind::Assign, "'='");
    Token first_tok = cur();
    decl.init.push_back(take_const(decl.width, "initializer"));
    while (at(TokKind::Comma)) {
      ++pos_;
      decl.init.push_back(take_const(decl.width, "initializer"));
    }
    if (decl.init.size() == 1 && decl.length > 1) {
      decl.init.assign(decl.length, decl.init[0]);  // broadcast single value
    } else if (decl.init.size() != decl.length) {
      fail(ParseErrorKind::InitCountMismatch, first_tok,
           "expected " + std::to_string(decl.length) + " initializers, got " +
               std::to_string(decl.init.size()));
    }
    declare_var(std::move(decl), name);
  }

  uint32_t lookup_var(const Token& name) {
    auto it = var_index_.find(name.text);
    if (it == var_index_.end())
      fail(ParseErrorKind::UndeclaredIdentifier, name,
           "undeclared identifier '" + name.text + "'");
    return it->second;
  }

  uint32_t parse_cost_annotation() {
    if (!at(TokKind::KwCost)) return 1;
    ++pos_;
    Token t = take(TokKind::Int, "cost value");
    if (t.value < 1) fail(ParseErrorKind::Syntax, t, "cost must be at least 1");
    return static_cast<uint32_t>(t.value);
  }

  ExprId add_expr_node(Expr e) {
    program_.exprs.push_back(std::move(e));
    return static_cast<ExprId>(program_.exprs.size() - 1);
  }

  StmtId add_stmt_node(Stmt s) {
    program_.stmts.push_back(std::move(s));
    return static_cast<StmtId>(program_.stmts.size() - 1);
  }

  // expr := and_expr { "or" and_expr }
  ExprId parse_expr() {
    ExprId lhs = parse_and();
    while (at(TokKind::KwOr)) {
      ++pos_;
      ExprId rhs = parse_and();
      lhs = add_expr_node(BinaryExpr{BinaryOp::Or, lhs, rhs});
    }
    return lhs;
  }

  ExprId parse_and() {
    ExprId lhs = parse_not();
    while (at(TokKind::KwAnd)) {
      ++pos_;
      ExprId rhs = parse_not();
      lhs = add_expr_node(BinaryExpr{BinaryOp::And, lhs, rhs});
    }
    return lhs;
  }

  ExprId parse_not() {
    if (at(TokKind::KwNot)) {
      ++pos_;
      return add_expr_node(NotExpr{parse_not()});
    }
    return parse_comparison();
  }

  ExprId parse_comparison() {
    ExprId lhs = parse_additive();
    BinaryOp op;
    switch (cur().kind) {
      case TokKind::EqEq: op = BinaryOp::Eq; break;
      case TokKind::Ne: op = BinaryOp::Ne; break;
      case TokKind::Lt: op = BinaryOp::Lt; break;
      case TokKind::Le: op = BinaryOp::Le; break;
      case TokKind::Gt: op = BinaryOp::Gt; break;
      case TokKind::Ge: op = BinaryOp::Ge; break;
      default: return lhs;
    }
    ++pos_;
    ExprId rhs = parse_additive();
    return add_expr_node(BinaryExpr{op, lhs, rhs});
  }

  ExprId parse_additive() {
    ExprId lhs = parse_multiplicative();
    while (at(TokKind::Plus) || at(TokKind::Minus)) {
      BinaryOp op = at(TokKind::Plus) ? BinaryOp::Add : BinaryOp::Sub;
      ++pos_;
      ExprId rhs = parse_multiplicative();
      lhs = add_expr_node(BinaryExpr{op, lhs, rhs});
    }
    return lhs;
  }

  ExprId parse_multiplicative() {
    ExprId lhs = parse_primary();
    while (at(TokKind::Star) || at(TokKind::Slash) || at(TokKind::Percent)) {
      BinaryOp op = at(TokKind::Star)    ? BinaryOp::Mul
                    : at(TokKind::Slash) ? BinaryOp::Div
                                         : BinaryOp::Mod;
      ++pos_;
      ExprId rhs = parse_primary();
      lhs = add_expr_node(BinaryExpr{op, lhs, rhs});
    }
    return lhs;
  }

  ExprId parse_primary() {
    if (at(TokKind::Int)) {
      Token t = tokens_[pos_++];
      return add_expr_node(ConstExpr{static_cast<uint32_t>(t.value)});
    }
    if (at(TokKind::LParen)) {
      ++pos_;
      ExprId inner = parse_expr();
      take(TokKind::RParen, "')'");
      return inner;
    }
    if (at(TokKind::Ident)) {
      Token name = tokens_[pos_++];
      uint32_t var = lookup_var(name);
      if (at(TokKind::LBracket)) {
        ++pos_;
        if (!program_.vars[var].is_array)
          fail(ParseErrorKind::BadIndexing, name,
               "'" + name.text + "' is a scalar and cannot be indexed");
        ExprId idx = parse_expr();
        take(TokKind::RBracket, "']'");
        return add_expr_node(IndexExpr{var, idx});
      }
      if (program_.vars[var].is_array)
        fail(ParseErrorKind::BadIndexing, name,
             "array '" + name.text + "' needs an element index");
      return add_expr_node(VarExpr{var});
    }
    if (in_predicate_ && at(TokKind::Assign))
      fail(ParseErrorKind::ImpureAssertion, cur(), "assignment inside assertion predicate");
    fail(ParseErrorKind::Syntax, cur(),
         std::string("expected expression, got ") + tok_name(cur().kind));
  }

  std::vector<StmtId> parse_block() {
    take(TokKind::LBrace, "'{'");
    std::vector<StmtId> block;
    while (!at(TokKind::RBrace)) {
      if (at(TokKind::End)) take(TokKind::RBrace, "'}'");
      block.push_back(parse_stmt());
    }
    ++pos_;  // }
    return block;
  }

  StmtId parse_stmt() {
    switch (cur().kind) {
      case TokKind::KwIf: {
        ++pos_;
        IfStmt s;
        s.cond = parse_expr();
        s.then_block = parse_block();
        if (at(TokKind::KwElse)) {
          ++pos_;
          s.else_block = parse_block();
        }
        return add_stmt_node(std::move(s));
      }
      case TokKind::KwWhile: {
        ++pos_;
        WhileStmt s;
        s.cond = parse_expr();
        s.block = parse_block();
        return add_stmt_node(std::move(s));
      }
      case TokKind::KwAssert: {
        ++pos_;
        Token id = take(TokKind::Ident, "assertion identifier");
        if (assertion_index_.count(id.text))
          fail(ParseErrorKind::DuplicateIdentifier, id,
               "duplicate assertion '" + id.text + "'");
        AssertionDecl decl;
        decl.id = id.text;
        decl.cost = parse_cost_annotation();
        take(TokKind::Colon, "':'");
        in_predicate_ = true;
        decl.predicate = parse_expr();
        // A trailing '=' means the predicate tried to assign.
        if (at(TokKind::Assign))
          fail(ParseErrorKind::ImpureAssertion, cur(),
               "assignment inside assertion predicate");
        in_predicate_ = false;
        uint32_t index = static_cast<uint32_t>(program_.assertions.size());
        assertion_index_.emplace(id.text, index);
        program_.assertions.push_back(std::move(decl));
        return add_stmt_node(AssertStmt{index});
      }
      case TokKind::KwOutput: {
        ++pos_;
        OutputStmt s;
        s.value = parse_expr();
        s.cost = parse_cost_annotation();
        return add_stmt_node(std::move(s));
      }
      case TokKind::KwVar:
      case TokKind::KwArray:
        fail(ParseErrorKind::Syntax, cur(), "declarations must precede statements");
      case TokKind::Ident: {
        Token name = tokens_[pos_++];
        LValue lv;
        lv.var = lookup_var(name);
        if (at(TokKind::LBracket)) {
          ++pos_;
          if (!program_.vars[lv.var].is_array)
            fail(ParseErrorKind::BadIndexing, name,
                 "'" + name.text + "' is a scalar and cannot be indexed");
          lv.indexed = true;
          lv.index = parse_expr();
          take(TokKind::RBracket, "']'");
        } else if (program_.vars[lv.var].is_array) {
          fail(ParseErrorKind::BadIndexing, name,
               "array '" + name.text + "' needs an element index");
        }
        take(TokKind::Assign, "'='");
        AssignStmt s;
        s.target = lv;
        s.value = parse_expr();
        s.cost = parse_cost_annotation();
        return add_stmt_node(std::move(s));
      }
      default:
        fail(ParseErrorKind::Syntax, cur(),
             std::string("expected statement, got ") + tok_name(cur().kind));
    }
  }
};

}  // namespace detail

inline Program parse(std::string_view source) { return detail::Parser(source).run(); }

struct AssertionInfo {
  uint32_t index = 0;
  std::string id;
  uint32_t cost = 1;
  friend bool operator==(const AssertionInfo&, const AssertionInfo&) = default;
};

// Index i is the bit position of assertion i in every configuration string.
inline std::vector<AssertionInfo> list_assertions(const Program& p) {
  std::vector<AssertionInfo> out;
  out.reserve(p.assertions.size());
  for (uint32_t i = 0; i < p.assertions.size(); ++i)
    out.push_back({i, p.assertions[i].id, p.assertions[i].cost});
  return out;
}

}  // namespace detox
