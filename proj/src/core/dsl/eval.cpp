#include "mapple/dsl/eval.hpp"

#include "mapple/decompose.hpp"

#include <mutex>
#include <sstream>
#include <unordered_map>

namespace mapple::dsl {

const char* value_kind(const Value& v) noexcept {
  switch (v.index()) {
    case 0: return "int";
    case 1: return "tuple";
    case 2: return "space";
    default: return "processor";
  }
}

std::string to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        if constexpr (std::is_same_v<T, Tuple>) return x.to_string();
        if constexpr (std::is_same_v<T, ProcSpace>) return "space" + x.shape().to_string();
        if constexpr (std::is_same_v<T, ProcessorRef>)
          return "processor(" + std::to_string(x.coord.node) + "," + std::to_string(x.coord.proc) + ")";
      },
      v);
}

class PrimitiveCache {
 public:
  std::optional<ProcSpace> find(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void put(const std::string& key, const ProcSpace& s) {
    std::lock_guard lock(mu_);
    map_.emplace(key, s);
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return map_.size();
  }

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, ProcSpace> map_;
};

struct Interpreter::Scope {
  const Scope* parent = nullptr;
  std::vector<std::pair<std::string, Value>> vars;

  const Value* find(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == name) return &it->second;
    return parent ? parent->find(name) : nullptr;
  }
  void set(const std::string& name, Value v) {
    for (auto& [n, val] : vars)
      if (n == name) {
        val = std::move(v);
        return;
      }
    vars.emplace_back(name, std::move(v));
  }
};

namespace {

[[noreturn]] void fail(SourceLoc loc, const std::string& msg) { throw EvalError(loc, msg); }

std::int64_t as_int(const Value& v, SourceLoc loc, const char* what) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  fail(loc, std::string(what) + " must be an int, got " + value_kind(v));
}

std::size_t as_dim(const Value& v, SourceLoc loc) {
  auto d = as_int(v, loc, "dimension");
  if (d < 0) fail(loc, "negative dimension " + std::to_string(d));
  return static_cast<std::size_t>(d);
}

// A Space used where a tuple is expected stands for its shape.
Tuple as_tuple(const Value& v, SourceLoc loc, const char* what) {
  if (auto* t = std::get_if<Tuple>(&v)) return *t;
  if (auto* s = std::get_if<ProcSpace>(&v)) return s->shape();
  fail(loc, std::string(what) + " must be a tuple, got " + value_kind(v));
}

std::int64_t arith(BinOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case BinOp::Add: return checked_add(a, b);
    case BinOp::Sub: return checked_sub(a, b);
    case BinOp::Mul: return checked_mul(a, b);
    case BinOp::Div: return floor_div(a, b);
    case BinOp::Mod: return floor_mod(a, b);
    case BinOp::Gt: return a > b;
    case BinOp::Lt: return a < b;
    case BinOp::Eq: return a == b;
  }
  return 0;
}

Value binary(BinOp op, const Value& lhs, const Value& rhs, SourceLoc loc) {
  const bool cmp = op == BinOp::Gt || op == BinOp::Lt || op == BinOp::Eq;
  auto* li = std::get_if<std::int64_t>(&lhs);
  auto* ri = std::get_if<std::int64_t>(&rhs);
  if (li && ri) return arith(op, *li, *ri);
  auto* lt = std::get_if<Tuple>(&lhs);
  auto* rt = std::get_if<Tuple>(&rhs);
  if (cmp) {
    if (op == BinOp::Eq && lt && rt) return std::int64_t{*lt == *rt};
    fail(loc, std::string("cannot compare ") + value_kind(lhs) + " and " + value_kind(rhs));
  }
  if ((!li && !lt) || (!ri && !rt))
    fail(loc, std::string("operator ") + binop_spelling(op) + " not defined on " + value_kind(lhs) + " and " +
                  value_kind(rhs));
  if (lt && rt && lt->size() != rt->size())
    fail(loc, "rank mismatch: " + lt->to_string() + " " + binop_spelling(op) + " " + rt->to_string());
  const std::size_t n = lt ? lt->size() : rt->size();
  Tuple out(n, 0);
  for (std::size_t i = 0; i < n; ++i) out[i] = arith(op, lt ? (*lt)[i] : *li, rt ? (*rt)[i] : *ri);
  return out;
}

std::string cache_key(const ProcSpace& s, const std::string& prim, const std::vector<Value>& args) {
  std::string key = s.fingerprint();
  key += '|';
  key += prim;
  for (const auto& a : args) {
    key += '|';
    key += to_string(a);
  }
  return key;
}

std::int64_t clamp_bound(std::int64_t v, std::int64_t n) {
  if (v < 0) v += n;
  return std::clamp<std::int64_t>(v, 0, n);
}

}  // namespace

Interpreter::Interpreter(const MapperProgram& program, MachineShape machine, std::shared_ptr<PrimitiveCache> cache)
    : program_(std::make_shared<const MapperProgram>(program)), machine_(machine), cache_(std::move(cache)) {
  if (machine_.nodes < 1 || machine_.procs_per_node < 1)
    throw Error(Errc::InvalidArgument, "machine must have at least one node and one processor");
  for (const auto& g : program_->globals) {
    Scope empty;
    Value v = eval(*g.value, empty, 0);
    bool replaced = false;
    for (auto& [n, val] : globals_)
      if (n == g.name) {
        val = v;
        replaced = true;
      }
    if (!replaced) globals_.emplace_back(g.name, std::move(v));
  }
}

Value Interpreter::call(const std::string& func, std::vector<Value> args) const {
  const FuncDef* f = program_->find_function(func);
  if (!f) throw Error(Errc::EvalError, "no function named '" + func + "'");
  return invoke(*f, std::move(args), f->loc, 0);
}

ProcessorCoord Interpreter::map_point(const std::string& func, const Tuple& ipoint, const Tuple& ispace) const {
  if (ipoint.size() != ispace.size())
    throw Error(Errc::EvalError, "point " + ipoint.to_string() + " and space " + ispace.to_string() +
                                     " differ in rank");
  for (std::size_t i = 0; i < ipoint.size(); ++i)
    if (ipoint[i] < 0 || ipoint[i] >= ispace[i])
      throw Error(Errc::EvalError, "point " + ipoint.to_string() + " outside space " + ispace.to_string());
  const FuncDef* f = program_->find_function(func);
  if (!f) throw Error(Errc::EvalError, "no function named '" + func + "'");
  Value r = invoke(*f, {ipoint, ispace}, f->loc, 0);
  if (auto* p = std::get_if<ProcessorRef>(&r)) return p->coord;
  throw EvalError(f->loc, "'" + func + "' returned " + std::string(value_kind(r)) + ", expected a processor");
}

Value Interpreter::invoke(const FuncDef& f, std::vector<Value> args, SourceLoc at, int depth) const {
  if (depth >= kMaxCallDepth) fail(at, "call depth limit exceeded in '" + f.name + "'");
  if (args.size() != f.params.size())
    fail(at, "'" + f.name + "' takes " + std::to_string(f.params.size()) + " arguments, got " +
                 std::to_string(args.size()));
  Scope scope;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& p = f.params[i];
    Value v = std::move(args[i]);
    if (p.type == "Tuple") v = as_tuple(v, at, p.name.c_str());
    else if (p.type == "int") as_int(v, at, p.name.c_str());
    scope.set(p.name, std::move(v));
  }
  for (const auto& st : f.body) {
    if (auto* a = std::get_if<AssignStmt>(&st.node)) scope.set(a->name, eval(*a->value, scope, depth));
    else return eval(*std::get<ReturnStmt>(st.node).value, scope, depth);
  }
  fail(f.loc, "'" + f.name + "' ended without return");
}

Value Interpreter::eval(const Expr& e, const Scope& scope, int depth) const {
  const SourceLoc loc = e.loc;
  try {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarExpr>) {
            if (const Value* v = scope.find(n.name)) return *v;
            for (const auto& [name, v] : globals_)
              if (name == n.name) return v;
            fail(loc, "undefined variable '" + n.name + "'");
          } else if constexpr (std::is_same_v<T, IntLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            const FuncDef* f = program_->find_function(n.callee);
            if (!f) fail(loc, "undefined function '" + n.callee + "'");
            std::vector<Value> args;
            for (const auto& a : n.args) args.push_back(eval(*a, scope, depth));
            return invoke(*f, std::move(args), loc, depth + 1);
          } else if constexpr (std::is_same_v<T, MachineExpr>) {
            auto kind = parse_proc_kind(n.proc);
            if (!kind) fail(loc, "unknown processor kind '" + n.proc + "'");
            if (*kind != machine_.kind)
              fail(loc, "Machine(" + n.proc + ") requested but the configured machine has " +
                            std::string(proc_kind_name(machine_.kind)) + " processors");
            return ProcSpace(machine_);
          } else if constexpr (std::is_same_v<T, MemberExpr>) {
            Value obj = eval(*n.object, scope, depth);
            if (n.name == "size") {
              if (auto* s = std::get_if<ProcSpace>(&obj)) return s->shape();
              if (auto* t = std::get_if<Tuple>(&obj)) return static_cast<std::int64_t>(t->size());
            }
            if (auto* p = std::get_if<ProcessorRef>(&obj)) {
              if (n.name == "node") return p->coord.node;
              if (n.name == "proc") return p->coord.proc;
            }
            fail(loc, std::string("no member '") + n.name + "' on " + value_kind(obj));
          } else if constexpr (std::is_same_v<T, PrimitiveCall>) {
            return primitive(n, scope, loc, depth);
          } else if constexpr (std::is_same_v<T, BinaryExpr>) {
            return binary(n.op, eval(*n.lhs, scope, depth), eval(*n.rhs, scope, depth), loc);
          } else if constexpr (std::is_same_v<T, NegExpr>) {
            return binary(BinOp::Sub, std::int64_t{0}, eval(*n.operand, scope, depth), loc);
          } else if constexpr (std::is_same_v<T, IndexExpr>) {
            return index(n, scope, loc, depth);
          } else if constexpr (std::is_same_v<T, SliceExpr>) {
            Tuple t = as_tuple(eval(*n.object, scope, depth), loc, "sliced value");
            const auto len = static_cast<std::int64_t>(t.size());
            auto lo = n.lo ? clamp_bound(as_int(eval(*n.lo, scope, depth), loc, "slice bound"), len) : 0;
            auto hi = n.hi ? clamp_bound(as_int(eval(*n.hi, scope, depth), loc, "slice bound"), len) : len;
            Tuple out;
            for (auto i = lo; i < hi; ++i) out.push_back(t[static_cast<std::size_t>(i)]);
            return out;
          } else if constexpr (std::is_same_v<T, SplatExpr>) {
            fail(loc, "'*' is only allowed inside an index");
          } else if constexpr (std::is_same_v<T, TernaryExpr>) {
            auto c = as_int(eval(*n.cond, scope, depth), loc, "condition");
            return eval(c ? *n.then_expr : *n.else_expr, scope, depth);
          } else if constexpr (std::is_same_v<T, ComprehensionExpr>) {
            Tuple out;
            Scope inner{&scope, {}};
            for (auto v : n.domain) {
              inner.set(n.var, v);
              out.push_back(as_int(eval(*n.body, inner, depth), loc, "comprehension element"));
            }
            return out;
          } else if constexpr (std::is_same_v<T, TupleLit>) {
            Tuple out;
            for (const auto& x : n.elements) out.push_back(as_int(eval(*x, scope, depth), x->loc, "tuple element"));
            return out;
          }
        },
        e.node);
  } catch (const EvalError&) {
    throw;
  } catch (const Error& err) {
    // arithmetic and procspace failures get the source position
    throw EvalError(loc, err.what());
  }
}

Value Interpreter::primitive(const PrimitiveCall& p, const Scope& scope, SourceLoc loc, int depth) const {
  Value recv = eval(*p.object, scope, depth);
  auto* space = std::get_if<ProcSpace>(&recv);
  if (!space) fail(loc, "primitive '" + p.primitive + "' needs a processor space, got " + value_kind(recv));
  std::vector<Value> args;
  for (const auto& a : p.args) args.push_back(eval(*a, scope, depth));
  auto arity = [&](std::size_t n) {
    if (args.size() != n)
      fail(loc, "'" + p.primitive + "' takes " + std::to_string(n) + " arguments, got " +
                    std::to_string(args.size()));
  };

  std::string key;
  if (cache_) {
    key = cache_key(*space, p.primitive, args);
    if (auto hit = cache_->find(key)) return *hit;
  }

  ProcSpace out = *space;
  const std::string& prim = p.primitive;
  if (prim == "split") {
    arity(2);
    out = space->split(as_dim(args[0], loc), as_int(args[1], loc, "split factor"));
  } else if (prim == "merge") {
    arity(2);
    out = space->merge(as_dim(args[0], loc), as_dim(args[1], loc));
  } else if (prim == "swap" || prim == "reorder") {
    arity(2);
    out = space->swap(as_dim(args[0], loc), as_dim(args[1], loc));
  } else if (prim == "slice") {
    arity(3);
    out = space->slice(as_dim(args[0], loc), as_int(args[1], loc, "slice low"), as_int(args[2], loc, "slice high"));
  } else if (prim == "decompose") {
    arity(2);
    const auto dim = as_dim(args[0], loc);
    if (dim >= space->rank())
      fail(loc, "decompose dimension " + std::to_string(dim) + " out of range for " + space->shape().to_string());
    const Tuple extents = as_tuple(args[1], loc, "decompose target");
    if (extents.empty()) fail(loc, "decompose target must be non-empty");
    const auto best = search_optimal(space->shape()[dim], extents, Isotropic{});
    out = space->decompose(dim, best.factors);
  } else {
    fail(loc, "unknown primitive '" + prim + "'");
  }
  if (cache_) cache_->put(key, out);
  return out;
}

Value Interpreter::index(const IndexExpr& ix, const Scope& scope, SourceLoc loc, int depth) const {
  Value obj = eval(*ix.object, scope, depth);
  // flatten: ints, splatted tuples and (normalized) bare tuples
  Tuple flat;
  for (const auto& item : ix.indices) {
    const Expr& inner = std::holds_alternative<SplatExpr>(item->node) ? *std::get<SplatExpr>(item->node).operand
                                                                      : *item;
    Value v = eval(inner, scope, depth);
    if (auto* i = std::get_if<std::int64_t>(&v)) flat.push_back(*i);
    else if (auto* t = std::get_if<Tuple>(&v))
      for (auto x : *t) flat.push_back(x);
    else fail(item->loc, std::string("index must be an int or tuple, got ") + value_kind(v));
  }
  if (auto* s = std::get_if<ProcSpace>(&obj)) {
    if (flat.size() != s->rank())
      fail(loc, "index " + flat.to_string() + " has rank " + std::to_string(flat.size()) + ", space " +
                    s->shape().to_string() + " has rank " + std::to_string(s->rank()));
    return ProcessorRef{s->resolve(flat)};
  }
  if (auto* t = std::get_if<Tuple>(&obj)) {
    if (flat.size() != 1) fail(loc, "tuples take a single index");
    const auto i = flat[0];
    if (i < 0 || i >= static_cast<std::int64_t>(t->size()))
      fail(loc, "index " + std::to_string(i) + " out of range for " + t->to_string());
    return (*t)[static_cast<std::size_t>(i)];
  }
  fail(loc, std::string("cannot index ") + value_kind(obj));
}

ProcessorCoord eval_mapping(const MapperProgram& program, const std::string& func, const Tuple& ipoint,
                            const Tuple& ispace, const MachineShape& machine) {
  return Interpreter(program, machine).map_point(func, ipoint, ispace);
}

struct MappingFunction::State {
  std::shared_ptr<PrimitiveCache> cache;
  Interpreter interp;
  std::string func;
};

ProcessorCoord MappingFunction::operator()(const Tuple& ipoint, const Tuple& ispace) const {
  return state_->interp.map_point(state_->func, ipoint, ispace);
}

const std::string& MappingFunction::function_name() const noexcept { return state_->func; }
const MachineShape& MappingFunction::machine() const noexcept { return state_->interp.machine(); }
std::size_t MappingFunction::cached_primitives() const { return state_->cache->size(); }

MappingFunction compile_function(const MapperProgram& program, const std::string& func, const MachineShape& machine) {
  if (!program.find_function(func)) throw Error(Errc::EvalError, "no function named '" + func + "'");
  auto cache = std::make_shared<PrimitiveCache>();
  MappingFunction mf;
  mf.state_ = std::make_shared<const MappingFunction::State>(
      MappingFunction::State{cache, Interpreter(program, machine, cache), func});
  return mf;
}

MappingFunction compile_mapper(const MapperProgram& program, const std::string& task, const MachineShape& machine) {
  const auto* binding = program.find_binding(task);
  if (!binding) throw Error(Errc::NoBinding, "no IndexTaskMap statement for task '" + task + "'");
  if (!program.find_function(binding->func))
    throw Error(Errc::EvalError, "task '" + task + "' is bound to undefined function '" + binding->func + "'");
  return compile_function(program, binding->func, machine);
}

}  // namespace mapple::dsl
