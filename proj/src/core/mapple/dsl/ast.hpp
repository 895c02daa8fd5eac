#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mapple::dsl {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Add, Sub, Mul, Div, Mod, Gt, Lt, Eq };

const char* binop_spelling(BinOp op) noexcept;

struct VarExpr {
  std::string name;
};
struct IntLit {
  std::int64_t value;
};
/// f(a, b) where f names a user function.
struct CallExpr {
  std::string callee;
  std::vector<ExprPtr> args;
};
/// Machine(GPU)
struct MachineExpr {
  std::string proc;
};
/// e.size
struct MemberExpr {
  ExprPtr object;
  std::string name;
};
/// e.split(0, 2), e.decompose(0, ispace), ...
struct PrimitiveCall {
  ExprPtr object;
  std::string primitive;
  std::vector<ExprPtr> args;
};
struct BinaryExpr {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct NegExpr {
  ExprPtr operand;
};
/// e[i, *t, j]
struct IndexExpr {
  ExprPtr object;
  std::vector<ExprPtr> indices;
};
/// e[lo:hi], either bound optional.
struct SliceExpr {
  ExprPtr object;
  ExprPtr lo;
  ExprPtr hi;
};
/// *e, only legal inside an index list.
struct SplatExpr {
  ExprPtr operand;
};
struct TernaryExpr {
  ExprPtr cond;
  ExprPtr then_expr;
  ExprPtr else_expr;
};
/// tuple(body for var in (0, 1, 2))
struct ComprehensionExpr {
  ExprPtr body;
  std::string var;
  std::vector<std::int64_t> domain;
};
/// (a, b, c)
struct TupleLit {
  std::vector<ExprPtr> elements;
};

struct Expr {
  std::variant<VarExpr, IntLit, CallExpr, MachineExpr, MemberExpr, PrimitiveCall, BinaryExpr, NegExpr, IndexExpr,
               SliceExpr, SplatExpr, TernaryExpr, ComprehensionExpr, TupleLit>
      node;
  SourceLoc loc;
};

template <typename T>
ExprPtr make_expr(T node, SourceLoc loc) {
  return std::make_shared<const Expr>(Expr{std::move(node), loc});
}

struct Param {
  std::string name;
  std::optional<std::string> type;  // "Tuple" or "int" when annotated
};

struct AssignStmt {
  std::string name;
  ExprPtr value;
};
struct ReturnStmt {
  ExprPtr value;
};
struct FuncStmt {
  std::variant<AssignStmt, ReturnStmt> node;
  SourceLoc loc;
};

struct FuncDef {
  std::string name;
  std::vector<Param> params;
  std::vector<FuncStmt> body;
  SourceLoc loc;
};

struct IndexTaskMapStmt {
  std::string task;
  std::string func;
};
struct TaskMapStmt {
  std::string task;
  std::vector<std::string> procs;
};
struct DataMapStmt {
  std::string task;
  std::string region;
  std::string proc;
  std::vector<std::string> memories;
};
struct LayoutConstraint {
  std::string name;
  std::optional<std::int64_t> align;  // set for "Align == n"
};
struct DataLayoutStmt {
  std::string task;
  std::string region;
  std::string proc;
  std::vector<LayoutConstraint> constraints;
};
struct GarbageCollectStmt {
  std::string task;
  std::string region;
};
struct BackpressureStmt {
  std::string task;
  std::int64_t depth;
};
/// Position of a function definition among the statements; the definition
/// itself lives in MapperProgram::functions.
struct FuncDefStmt {
  std::string name;
};

struct Statement {
  std::variant<IndexTaskMapStmt, TaskMapStmt, DataMapStmt, DataLayoutStmt, GarbageCollectStmt, BackpressureStmt,
               FuncDefStmt>
      node;
  SourceLoc loc;
};

const char* statement_kind(const Statement& s) noexcept;

/// Top-level `name = expr`, evaluated once per machine configuration.
struct GlobalAssign {
  std::string name;
  ExprPtr value;
  SourceLoc loc;
};

struct MapperProgram {
  std::vector<GlobalAssign> globals;
  std::vector<Statement> statements;
  std::vector<FuncDef> functions;

  const FuncDef* find_function(const std::string& name) const;
  /// Function bound to `task` by an IndexTaskMap statement, if any.
  const IndexTaskMapStmt* find_binding(const std::string& task) const;
};

/// Structural equality ignoring source locations.
bool equivalent(const Expr& a, const Expr& b);
bool equivalent(const MapperProgram& a, const MapperProgram& b);

}  // namespace mapple::dsl
