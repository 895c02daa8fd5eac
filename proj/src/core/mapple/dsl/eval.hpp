#pragma once

#include "mapple/dsl/ast.hpp"
#include "mapple/error.hpp"
#include "mapple/procspace.hpp"
#include "mapple/tuple.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace mapple::dsl {

struct ProcessorRef {
  ProcessorCoord coord;
  friend bool operator==(const ProcessorRef&, const ProcessorRef&) = default;
};

using Value = std::variant<std::int64_t, Tuple, ProcSpace, ProcessorRef>;

/// "int", "tuple", "space" or "processor".
const char* value_kind(const Value& v) noexcept;
std::string to_string(const Value& v);

/// Runtime failure inside a mapper function, with the offending location.
class EvalError : public Error {
 public:
  EvalError(SourceLoc loc, const std::string& message)
      : Error(Errc::EvalError, std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " + message),
        loc_(loc) {}
  SourceLoc loc() const noexcept { return loc_; }

 private:
  SourceLoc loc_;
};

class PrimitiveCache;

/// Evaluates functions of one program against one machine configuration.
/// Globals are evaluated once, in source order, on construction.
class Interpreter {
 public:
  Interpreter(const MapperProgram& program, MachineShape machine,
              std::shared_ptr<PrimitiveCache> cache = nullptr);

  Value call(const std::string& func, std::vector<Value> args) const;

  /// Calls func(ipoint, ispace) and requires a processor result.
  ProcessorCoord map_point(const std::string& func, const Tuple& ipoint, const Tuple& ispace) const;

  const MachineShape& machine() const noexcept { return machine_; }
  const MapperProgram& program() const noexcept { return *program_; }

  static constexpr int kMaxCallDepth = 64;

 private:
  struct Scope;
  Value eval(const Expr& e, const Scope& scope, int depth) const;
  Value invoke(const FuncDef& f, std::vector<Value> args, SourceLoc at, int depth) const;
  Value primitive(const PrimitiveCall& p, const Scope& scope, SourceLoc loc, int depth) const;
  Value index(const IndexExpr& ix, const Scope& scope, SourceLoc loc, int depth) const;

  std::shared_ptr<const MapperProgram> program_;
  MachineShape machine_;
  std::vector<std::pair<std::string, Value>> globals_;
  std::shared_ptr<PrimitiveCache> cache_;
};

/// One-shot evaluation of func(ipoint, ispace) on the given machine.
ProcessorCoord eval_mapping(const MapperProgram& program, const std::string& func, const Tuple& ipoint,
                            const Tuple& ispace, const MachineShape& machine);

/// A mapper function bound to a task and a machine. Copies share state;
/// calls are thread safe. Primitive results (splits, decompositions) are
/// memoized per receiver space and arguments.
class MappingFunction {
 public:
  ProcessorCoord operator()(const Tuple& ipoint, const Tuple& ispace) const;
  const std::string& function_name() const noexcept;
  const MachineShape& machine() const noexcept;
  /// Number of memoized primitive results so far.
  std::size_t cached_primitives() const;

 private:
  friend MappingFunction compile_function(const MapperProgram&, const std::string&, const MachineShape&);
  struct State;
  std::shared_ptr<const State> state_;
};

/// Mapping through a function named directly rather than through a task.
MappingFunction compile_function(const MapperProgram& program, const std::string& func, const MachineShape& machine);

/// Throws Error(NoBinding) when no IndexTaskMap statement names the task.
MappingFunction compile_mapper(const MapperProgram& program, const std::string& task, const MachineShape& machine);

}  // namespace mapple::dsl
