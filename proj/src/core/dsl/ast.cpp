#include "mapple/dsl/ast.hpp"

namespace mapple::dsl {

const char* binop_spelling(BinOp op) noexcept {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Gt: return ">";
    case BinOp::Lt: return "<";
    case BinOp::Eq: return "==";
  }
  return "?";
}

const char* statement_kind(const Statement& s) noexcept {
  return std::visit(
      [](const auto& x) -> const char* {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IndexTaskMapStmt>) return "IndexTaskMap";
        if constexpr (std::is_same_v<T, TaskMapStmt>) return "Task";
        if constexpr (std::is_same_v<T, DataMapStmt>) return "Region";
        if constexpr (std::is_same_v<T, DataLayoutStmt>) return "Layout";
        if constexpr (std::is_same_v<T, GarbageCollectStmt>) return "GarbageCollect";
        if constexpr (std::is_same_v<T, BackpressureStmt>) return "Backpressure";
        if constexpr (std::is_same_v<T, FuncDefStmt>) return "FuncDef";
        return "?";
      },
      s.node);
}

const FuncDef* MapperProgram::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const IndexTaskMapStmt* MapperProgram::find_binding(const std::string& task) const {
  for (const auto& s : statements)
    if (auto* m = std::get_if<IndexTaskMapStmt>(&s.node); m && m->task == task) return m;
  return nullptr;
}

namespace {

bool eq(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equivalent(*a, *b);
}

bool eq(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eq(a[i], b[i])) return false;
  return true;
}

bool same_node(const VarExpr& a, const VarExpr& b) { return a.name == b.name; }
bool same_node(const IntLit& a, const IntLit& b) { return a.value == b.value; }
bool same_node(const CallExpr& a, const CallExpr& b) { return a.callee == b.callee && eq(a.args, b.args); }
bool same_node(const MachineExpr& a, const MachineExpr& b) { return a.proc == b.proc; }
bool same_node(const MemberExpr& a, const MemberExpr& b) { return a.name == b.name && eq(a.object, b.object); }
bool same_node(const PrimitiveCall& a, const PrimitiveCall& b) {
  return a.primitive == b.primitive && eq(a.object, b.object) && eq(a.args, b.args);
}
bool same_node(const BinaryExpr& a, const BinaryExpr& b) {
  return a.op == b.op && eq(a.lhs, b.lhs) && eq(a.rhs, b.rhs);
}
bool same_node(const NegExpr& a, const NegExpr& b) { return eq(a.operand, b.operand); }
bool same_node(const IndexExpr& a, const IndexExpr& b) { return eq(a.object, b.object) && eq(a.indices, b.indices); }
bool same_node(const SliceExpr& a, const SliceExpr& b) {
  return eq(a.object, b.object) && eq(a.lo, b.lo) && eq(a.hi, b.hi);
}
bool same_node(const SplatExpr& a, const SplatExpr& b) { return eq(a.operand, b.operand); }
bool same_node(const TernaryExpr& a, const TernaryExpr& b) {
  return eq(a.cond, b.cond) && eq(a.then_expr, b.then_expr) && eq(a.else_expr, b.else_expr);
}
bool same_node(const ComprehensionExpr& a, const ComprehensionExpr& b) {
  return a.var == b.var && a.domain == b.domain && eq(a.body, b.body);
}
bool same_node(const TupleLit& a, const TupleLit& b) { return eq(a.elements, b.elements); }

bool same_stmt(const IndexTaskMapStmt& a, const IndexTaskMapStmt& b) { return a.task == b.task && a.func == b.func; }
bool same_stmt(const TaskMapStmt& a, const TaskMapStmt& b) { return a.task == b.task && a.procs == b.procs; }
bool same_stmt(const DataMapStmt& a, const DataMapStmt& b) {
  return a.task == b.task && a.region == b.region && a.proc == b.proc && a.memories == b.memories;
}
bool same_stmt(const DataLayoutStmt& a, const DataLayoutStmt& b) {
  if (a.task != b.task || a.region != b.region || a.proc != b.proc) return false;
  if (a.constraints.size() != b.constraints.size()) return false;
  for (std::size_t i = 0; i < a.constraints.size(); ++i)
    if (a.constraints[i].name != b.constraints[i].name || a.constraints[i].align != b.constraints[i].align)
      return false;
  return true;
}
bool same_stmt(const GarbageCollectStmt& a, const GarbageCollectStmt& b) {
  return a.task == b.task && a.region == b.region;
}
bool same_stmt(const BackpressureStmt& a, const BackpressureStmt& b) { return a.task == b.task && a.depth == b.depth; }
bool same_stmt(const FuncDefStmt& a, const FuncDefStmt& b) { return a.name == b.name; }

bool same_func_stmt(const FuncStmt& a, const FuncStmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* x = std::get_if<AssignStmt>(&a.node)) {
    const auto& y = std::get<AssignStmt>(b.node);
    return x->name == y.name && eq(x->value, y.value);
  }
  return eq(std::get<ReturnStmt>(a.node).value, std::get<ReturnStmt>(b.node).value);
}

bool same_function(const FuncDef& a, const FuncDef& b) {
  if (a.name != b.name || a.params.size() != b.params.size() || a.body.size() != b.body.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type) return false;
  for (std::size_t i = 0; i < a.body.size(); ++i)
    if (!same_func_stmt(a.body[i], b.body[i])) return false;
  return true;
}

}  // namespace

bool equivalent(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        return same_node(x, std::get<T>(b.node));
      },
      a.node);
}

bool equivalent(const MapperProgram& a, const MapperProgram& b) {
  if (a.globals.size() != b.globals.size() || a.statements.size() != b.statements.size() ||
      a.functions.size() != b.functions.size())
    return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i)
    if (a.globals[i].name != b.globals[i].name || !eq(a.globals[i].value, b.globals[i].value)) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const auto& x = a.statements[i].node;
    const auto& y = b.statements[i].node;
    if (x.index() != y.index()) return false;
    const bool same = std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          return same_stmt(s, std::get<T>(y));
        },
        x);
    if (!same) return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i)
    if (!same_function(a.functions[i], b.functions[i])) return false;
  return true;
}

}  // namespace mapple::dsl
