#include "mapple/dsl/validate.hpp"

#include <map>
#include <set>

namespace mapple::dsl {

const char* severity_name(Severity s) noexcept { return s == Severity::Error ? "error" : "warning"; }

bool has_errors(const std::vector<Diagnostic>& diags) noexcept {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

namespace {

const std::set<std::string> kProcs = {"CPU", "GPU", "OMP"};
const std::set<std::string> kMemories = {"SYSMEM", "FBMEM", "ZCMEM"};
const std::set<std::string> kConstraints = {"SOA", "AOS", "C_order", "F_order"};
const std::set<std::string> kMembers = {"size", "node", "proc"};
const std::map<std::string, std::size_t> kPrimitives = {{"split", 2},   {"merge", 2}, {"reorder", 2},
                                                        {"swap", 2},    {"slice", 3}, {"decompose", 2}};

class Checker {
 public:
  explicit Checker(const MapperProgram& p) : prog_(p) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> globals;
    for (const auto& g : prog_.globals) {
      expr(*g.value, globals);
      globals.insert(g.name);
    }
    all_globals_ = globals;
    for (const auto& st : prog_.statements) statement(st);
    for (const auto& f : prog_.functions) function(f);
    return std::move(out_);
  }

 private:
  const MapperProgram& prog_;
  std::set<std::string> all_globals_;
  std::vector<Diagnostic> out_;

  void error(SourceLoc loc, const char* code, std::string msg) {
    out_.push_back({Severity::Error, code, std::move(msg), loc});
  }
  void extension(SourceLoc loc, const std::string& what) {
    out_.push_back({Severity::Warning, "Extension", what + " is an extension to the core grammar", loc});
  }

  void proc(const std::string& p, SourceLoc loc) {
    if (!kProcs.count(p)) error(loc, "UnknownProc", "unknown processor kind '" + p + "'");
  }

  void statement(const Statement& st) {
    const SourceLoc loc = st.loc;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, IndexTaskMapStmt>) {
            if (!prog_.find_function(s.func))
              error(loc, "UnknownFunction", "task '" + s.task + "' is mapped by undefined function '" + s.func + "'");
          } else if constexpr (std::is_same_v<T, TaskMapStmt>) {
            for (const auto& p : s.procs) proc(p, loc);
          } else if constexpr (std::is_same_v<T, DataMapStmt>) {
            proc(s.proc, loc);
            for (const auto& m : s.memories)
              if (!kMemories.count(m)) error(loc, "UnknownMemory", "unknown memory kind '" + m + "'");
          } else if constexpr (std::is_same_v<T, DataLayoutStmt>) {
            proc(s.proc, loc);
            for (const auto& c : s.constraints) {
              if (c.name == "Align") {
                if (!c.align) error(loc, "InvalidAlign", "Align needs '== n'");
                else if (*c.align <= 0) error(loc, "InvalidAlign", "alignment must be positive");
              } else if (!kConstraints.count(c.name)) {
                error(loc, "UnknownConstraint", "unknown layout constraint '" + c.name + "'");
              } else if (c.align) {
                error(loc, "InvalidAlign", "'" + c.name + "' takes no value");
              }
            }
          } else if constexpr (std::is_same_v<T, BackpressureStmt>) {
            if (s.depth < 0) error(loc, "InvalidDepth", "backpressure depth must be non-negative");
          }
        },
        st.node);
  }

  void function(const FuncDef& f) {
    std::set<std::string> vars = all_globals_;
    std::set<std::string> params;
    for (const auto& p : f.params) {
      if (p.type && *p.type != "Tuple" && *p.type != "int")
        error(f.loc, "UnknownType", "unknown parameter type '" + *p.type + "'");
      if (!params.insert(p.name).second)
        error(f.loc, "DuplicateParameter", "parameter '" + p.name + "' repeated in '" + f.name + "'");
      vars.insert(p.name);
    }
    bool returns = false;
    for (const auto& st : f.body) {
      if (auto* a = std::get_if<AssignStmt>(&st.node)) {
        expr(*a->value, vars);
        vars.insert(a->name);
      } else {
        expr(*std::get<ReturnStmt>(st.node).value, vars);
        returns = true;
      }
    }
    if (!returns) error(f.loc, "MissingReturn", "'" + f.name + "' has no return statement");
  }

  void exprs(const std::vector<ExprPtr>& xs, const std::set<std::string>& vars) {
    for (const auto& x : xs) expr(*x, vars);
  }

  void expr(const Expr& e, const std::set<std::string>& vars) {
    const SourceLoc loc = e.loc;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarExpr>) {
            if (!vars.count(n.name)) error(loc, "UndefinedVariable", "undefined variable '" + n.name + "'");
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            const FuncDef* f = prog_.find_function(n.callee);
            if (!f) error(loc, "UnknownFunction", "undefined function '" + n.callee + "'");
            else if (f->params.size() != n.args.size())
              error(loc, "ArityMismatch", "'" + n.callee + "' takes " + std::to_string(f->params.size()) +
                                              " arguments, got " + std::to_string(n.args.size()));
            exprs(n.args, vars);
          } else if constexpr (std::is_same_v<T, MachineExpr>) {
            proc(n.proc, loc);
          } else if constexpr (std::is_same_v<T, MemberExpr>) {
            if (!kMembers.count(n.name)) error(loc, "UnknownMember", "unknown member '" + n.name + "'");
            expr(*n.object, vars);
          } else if constexpr (std::is_same_v<T, PrimitiveCall>) {
            auto it = kPrimitives.find(n.primitive);
            if (it == kPrimitives.end())
              error(loc, "UnknownPrimitive", "unknown primitive '" + n.primitive + "'");
            else if (it->second != n.args.size())
              error(loc, "ArityMismatch", "'" + n.primitive + "' takes " + std::to_string(it->second) +
                                              " arguments, got " + std::to_string(n.args.size()));
            expr(*n.object, vars);
            exprs(n.args, vars);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            expr(*n.lhs, vars);
            expr(*n.rhs, vars);
          } else if constexpr (std::is_same_v<T, NegExpr> || std::is_same_v<T, SplatExpr>) {
            expr(*n.operand, vars);
          } else if constexpr (std::is_same_v<T, IndexExpr>) {
            expr(*n.object, vars);
            exprs(n.indices, vars);
          } else if constexpr (std::is_same_v<T, SliceExpr>) {
            extension(loc, "tuple slice");
            expr(*n.object, vars);
            if (n.lo) expr(*n.lo, vars);
            if (n.hi) expr(*n.hi, vars);
          } else if constexpr (std::is_same_v<T, TernaryExpr>) {
            expr(*n.cond, vars);
            expr(*n.then_expr, vars);
            expr(*n.else_expr, vars);
          } else if constexpr (std::is_same_v<T, ComprehensionExpr>) {
            extension(loc, "tuple comprehension");
            auto inner = vars;
            inner.insert(n.var);
            expr(*n.body, inner);
          } else if constexpr (std::is_same_v<T, TupleLit>) {
            extension(loc, "tuple literal");
            exprs(n.elements, vars);
          }
        },
        e.node);
  }
};

}  // namespace

std::vector<Diagnostic> validate(const MapperProgram& program) { return Checker(program).run(); }

}  // namespace mapple::dsl
