#include "mapple/dsl/parser.hpp"

#include <sstream>

namespace mapple::dsl {

namespace {

// Binding strength, loosest first. Mirrors the parser.
enum Prec { kTernary = 1, kCompare, kAdd, kMul, kUnary, kPostfix };

int binop_prec(BinOp op) {
  switch (op) {
    case BinOp::Gt:
    case BinOp::Lt:
    case BinOp::Eq: return kCompare;
    case BinOp::Add:
    case BinOp::Sub: return kAdd;
    default: return kMul;
  }
}

int prec_of(const Expr& e) {
  if (auto* b = std::get_if<BinaryExpr>(&e.node)) return binop_prec(b->op);
  if (std::holds_alternative<TernaryExpr>(e.node)) return kTernary;
  if (std::holds_alternative<NegExpr>(e.node)) return kUnary;
  if (auto* i = std::get_if<IntLit>(&e.node); i && i->value < 0) return kUnary;
  return kPostfix;
}

void emit(std::ostream& os, const Expr& e);

void emit_at(std::ostream& os, const ExprPtr& e, int min_prec) {
  const bool paren = prec_of(*e) < min_prec;
  if (paren) os << '(';
  emit(os, *e);
  if (paren) os << ')';
}

void emit_list(std::ostream& os, const std::vector<ExprPtr>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    emit_at(os, xs[i], kTernary);
  }
}

void emit(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, IntLit>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, CallExpr>) {
          os << n.callee << '(';
          emit_list(os, n.args);
          os << ')';
        } else if constexpr (std::is_same_v<T, MachineExpr>) {
          os << "Machine(" << n.proc << ')';
        } else if constexpr (std::is_same_v<T, MemberExpr>) {
          emit_at(os, n.object, kPostfix);
          os << '.' << n.name;
        } else if constexpr (std::is_same_v<T, PrimitiveCall>) {
          emit_at(os, n.object, kPostfix);
          os << '.' << n.primitive << '(';
          emit_list(os, n.args);
          os << ')';
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          const int p = binop_prec(n.op);
          // comparisons do not chain, so both sides need a tighter level
          emit_at(os, n.lhs, p == kCompare ? p + 1 : p);
          os << ' ' << binop_spelling(n.op) << ' ';
          emit_at(os, n.rhs, p + 1);
        } else if constexpr (std::is_same_v<T, NegExpr>) {
          os << '-';
          // "--x" would re-lex fine, but a literal operand would fold
          const bool paren = prec_of(*n.operand) < kPostfix || std::holds_alternative<IntLit>(n.operand->node);
          if (paren) os << '(';
          emit(os, *n.operand);
          if (paren) os << ')';
        } else if constexpr (std::is_same_v<T, IndexExpr>) {
          emit_at(os, n.object, kPostfix);
          os << '[';
          emit_list(os, n.indices);
          os << ']';
        } else if constexpr (std::is_same_v<T, SliceExpr>) {
          emit_at(os, n.object, kPostfix);
          os << '[';
          if (n.lo) emit_at(os, n.lo, kTernary);
          os << ':';
          if (n.hi) emit_at(os, n.hi, kTernary);
          os << ']';
        } else if constexpr (std::is_same_v<T, SplatExpr>) {
          os << '*';
          emit_at(os, n.operand, kUnary);
        } else if constexpr (std::is_same_v<T, TernaryExpr>) {
          emit_at(os, n.cond, kCompare);
          os << " ? ";
          emit_at(os, n.then_expr, kTernary);
          os << " : ";
          emit_at(os, n.else_expr, kTernary);
        } else if constexpr (std::is_same_v<T, ComprehensionExpr>) {
          os << "tuple(";
          emit_at(os, n.body, kTernary);
          os << " for " << n.var << " in (";
          for (std::size_t i = 0; i < n.domain.size(); ++i) os << (i ? ", " : "") << n.domain[i];
          if (n.domain.size() == 1) os << ',';
          os << "))";
        } else if constexpr (std::is_same_v<T, TupleLit>) {
          os << '(';
          emit_list(os, n.elements);
          if (n.elements.size() == 1) os << ',';
          os << ')';
        }
      },
      e.node);
}

void emit_names(std::ostream& os, const std::vector<std::string>& xs) {
  for (const auto& x : xs) os << ' ' << x;
}

}  // namespace

std::string print(const Expr& expr) {
  std::ostringstream os;
  emit(os, expr);
  return os.str();
}

std::string print(const MapperProgram& program) {
  std::ostringstream os;
  for (const auto& g : program.globals) os << g.name << " = " << print(*g.value) << '\n';
  for (const auto& st : program.statements) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IndexTaskMapStmt>) {
            os << "IndexTaskMap " << s.task << ' ' << s.func << '\n';
          } else if constexpr (std::is_same_v<T, TaskMapStmt>) {
            os << "Task " << s.task;
            emit_names(os, s.procs);
            os << '\n';
          } else if constexpr (std::is_same_v<T, DataMapStmt>) {
            os << "Region " << s.task << ' ' << s.region << ' ' << s.proc;
            emit_names(os, s.memories);
            os << '\n';
          } else if constexpr (std::is_same_v<T, DataLayoutStmt>) {
            os << "Layout " << s.task << ' ' << s.region << ' ' << s.proc;
            for (const auto& c : s.constraints) {
              os << ' ' << c.name;
              if (c.align) os << " == " << *c.align;
            }
            os << '\n';
          } else if constexpr (std::is_same_v<T, GarbageCollectStmt>) {
            os << "GarbageCollect " << s.task << ' ' << s.region << '\n';
          } else if constexpr (std::is_same_v<T, BackpressureStmt>) {
            os << "Backpressure " << s.task << ' ' << s.depth << '\n';
          } else if constexpr (std::is_same_v<T, FuncDefStmt>) {
            const FuncDef* f = program.find_function(s.name);
            if (!f) return;
            os << "def " << f->name << '(';
            for (std::size_t i = 0; i < f->params.size(); ++i) {
              if (i) os << ", ";
              if (f->params[i].type) os << *f->params[i].type << ' ';
              os << f->params[i].name;
            }
            os << "):\n";
            for (const auto& b : f->body) {
              os << "    ";
              if (auto* a = std::get_if<AssignStmt>(&b.node)) os << a->name << " = " << print(*a->value);
              else os << "return " << print(*std::get<ReturnStmt>(b.node).value);
              os << '\n';
            }
          }
        },
        st.node);
  }
  return os.str();
}

}  // namespace mapple::dsl
