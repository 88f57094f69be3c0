#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace detox {

// Expressions and statements live in per-program pools and reference each
// other by index, which keeps Program a plain copyable value.
using ExprId = uint32_t;
using StmtId = uint32_t;

enum class BinaryOp : uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
};

struct ConstExpr {
  uint32_t value = 0;
  friend bool operator==(const ConstExpr&, const ConstExpr&) = default;
};

struct VarExpr {
  uint32_t var = 0;  // index into Program::vars, scalar only
  friend bool operator==(const VarExpr&, const VarExpr&) = default;
};

struct IndexExpr {
  uint32_t var = 0;  // index into Program::vars, array only
  ExprId index = 0;
  friend bool operator==(const IndexExpr&, const IndexExpr&) = default;
};

struct NotExpr {
  ExprId operand = 0;
  friend bool operator==(const NotExpr&, const NotExpr&) = default;
};

struct BinaryExpr {
  BinaryOp op = BinaryOp::Add;
  ExprId lhs = 0;
  ExprId rhs = 0;
  friend bool operator==(const BinaryExpr&, const BinaryExpr&) = default;
};

using Expr = std::variant<ConstExpr, VarExpr, IndexExpr, NotExpr, BinaryExpr>;

struct VarDecl {
  std::string name;
  uint32_t width = 8;  // bits per element: 8, 16 or 32
  uint32_t length = 1;
  bool is_array = false;
  std::vector<uint32_t> init;  // one value per element
  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

// One static `assert` statement. Index order in Program::assertions is the
// textual order of the statements and defines configuration bit positions.
struct AssertionDecl {
  std::string id;
  uint32_t cost = 1;  // time steps each dynamic execution occupies
  ExprId predicate = 0;
  friend bool operator==(const AssertionDecl&, const AssertionDecl&) = default;
};

struct LValue {
  uint32_t var = 0;
  bool indexed = false;
  ExprId index = 0;  // valid when indexed
  friend bool operator==(const LValue&, const LValue&) = default;
};

struct AssignStmt {
  LValue target;
  ExprId value = 0;
  uint32_t cost = 1;
  friend bool operator==(const AssignStmt&, const AssignStmt&) = default;
};

struct IfStmt {
  ExprId cond = 0;
  std::vector<StmtId> then_block;
  std::vector<StmtId> else_block;
  friend bool operator==(const IfStmt&, const IfStmt&) = default;
};

struct WhileStmt {
  ExprId cond = 0;
  std::vector<StmtId> block;
  friend bool operator==(const WhileStmt&, const WhileStmt&) = default;
};

struct AssertStmt {
  uint32_t assertion = 0;  // index into Program::assertions
  friend bool operator==(const AssertStmt&, const AssertStmt&) = default;
};

struct OutputStmt {
  ExprId value = 0;
  uint32_t cost = 1;
  friend bool operator==(const OutputStmt&, const OutputStmt&) = default;
};

using Stmt = std::variant<AssignStmt, IfStmt, WhileStmt, AssertStmt, OutputStmt>;

struct Program {
  std::vector<VarDecl> vars;            // declaration order = memory layout
  std::vector<AssertionDecl> assertions;
  std::vector<Expr> exprs;
  std::vector<Stmt> stmts;
  std::vector<StmtId> body;             // top-level statements, in order
  std::string source_digest;            // content hash of the source text
  friend bool operator==(const Program&, const Program&) = default;
};

}  // namespace detox
