#pragma once

#include "mapple/procspace.hpp"
#include "mapple/sim/taskgraph.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace mapple::dsl {
struct MapperProgram;
}

namespace mapple::sim {

/// Processor of one iteration point of a graph task.
using PointMapper = std::function<ProcessorCoord(const IndexTask& task, const Tuple& point, const Tuple& ispace)>;

/// Binds every task to the function its IndexTaskMap statement names, or to
/// the function bound to `default_task` when it has none. Tasks with neither
/// raise NoBinding when first mapped.
PointMapper bind_program(const dsl::MapperProgram& program, const MachineShape& machine,
                         std::optional<std::string> default_task = std::nullopt);

// SHARD decision for a set of points, given each point's processor.
struct Distribute {
  std::vector<std::size_t> left;   // points mapping to the smallest processor
  std::vector<std::size_t> right;  // everything else
  ProcessorCoord p_left;
  ProcessorCoord p_right;  // smallest processor among `right`
};
struct Local {
  ProcessorCoord proc;
  std::int64_t node() const noexcept { return proc.node; }
};
using ShardDecision = std::variant<Distribute, Local>;

/// Throws EmptyTask on an empty point set.
ShardDecision shard_policy(const std::vector<ProcessorCoord>& point_procs);

enum class Stage { Enqueued, Mapped, Launched, Executed };
const char* stage_name(Stage s) noexcept;

enum class Rule { Enqueue, Distribute, Local, Map, Launch, Execute, Bootstrap };
const char* rule_name(Rule r) noexcept;

struct LogEntry {
  Stage stage;
  std::string task;    // slice id; graph id for Enqueued
  std::string origin;  // graph task the slice belongs to
  std::optional<ProcessorCoord> proc;  // absent for Enqueued
  std::int64_t step = 0;
  std::vector<Tuple> points;  // Mapped entries only
};

struct ProcessorStats {
  ProcessorCoord proc;
  std::int64_t tasks = 0;
  std::int64_t points = 0;
};

struct Trace {
  std::vector<LogEntry> log;
  /// Per-processor slice and point counts, excluding the bootstrapped root.
  std::vector<ProcessorStats> stats;
  std::map<std::string, std::int64_t> rule_counts;
  std::int64_t steps = 0;
};

/// Lifecycle simulator over per-node enqueued (E) and mapped (M) queues.
/// Graph tasks are split by DISTRIBUTE into slices that each target one
/// processor; slices are the units that are mapped, launched and executed.
class Simulator {
 public:
  enum class Policy { Priority, Random };

  Simulator(const TaskGraph& graph, PointMapper mapper, MachineShape machine, Policy policy = Policy::Priority,
            std::uint64_t seed = 0);
  ~Simulator();
  Simulator(Simulator&&) noexcept;

  /// Applies one rule. Returns false when nothing applies and every task has
  /// executed; throws Stuck when nothing applies otherwise.
  bool step();

  /// Steps until quiescent; throws Stuck with the blocking premises.
  Trace run();

  const std::vector<LogEntry>& log() const noexcept;
  /// Tasks currently queued on node n: (E, M) contents as slice ids.
  std::pair<std::vector<std::string>, std::vector<std::string>> queues(std::int64_t node) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Trace run_to_quiescence(const TaskGraph& graph, const PointMapper& mapper, const MachineShape& machine);

struct TraceDiagnostic {
  std::string code;  // PremiseViolation, MappingMismatch, LifecycleViolation, PointConservation, Incomplete, UnknownTask
  std::string message;
  std::int64_t entry = -1;  // log position, -1 when global
};

/// Re-verifies every entry of a trace against the rule premises, the mapping
/// and point conservation. Does not share code with Simulator.
std::vector<TraceDiagnostic> check_trace(const std::vector<LogEntry>& log, const TaskGraph& graph,
                                         const PointMapper& mapper);

}  // namespace mapple::sim
