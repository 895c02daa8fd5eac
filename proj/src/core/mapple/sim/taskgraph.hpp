#pragma once

#include "mapple/tuple.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mapple::sim {

struct IndexTask {
  std::string id;
  std::vector<Tuple> points;
  std::optional<Tuple> ispace;  // declared extent, if any
};

/// Task tree plus dependence and sibling relations. Tasks are addressed by
/// their position in document order.
class TaskGraph {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t size() const noexcept { return tasks_.size(); }
  const IndexTask& task(std::size_t i) const { return tasks_.at(i); }
  const std::vector<IndexTask>& tasks() const noexcept { return tasks_; }
  std::size_t find(std::string_view id) const;

  std::size_t root() const noexcept { return root_; }
  std::size_t parent(std::size_t i) const { return parent_.at(i); }
  /// Children in sibling order.
  const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }
  /// Position among the parent's children (0 for the root).
  std::size_t sibling_rank(std::size_t i) const { return rank_.at(i); }

  /// (before, after) pairs: `after` depends on `before`.
  const std::vector<std::pair<std::size_t, std::size_t>>& deps() const noexcept { return deps_; }
  const std::vector<std::size_t>& preds(std::size_t i) const { return preds_.at(i); }
  /// Dependence predecessors sharing i's parent.
  const std::vector<std::size_t>& sibling_preds(std::size_t i) const { return sibling_preds_.at(i); }

  /// Declared extent, else the bounding box (max + 1) of the points.
  Tuple ispace(std::size_t i) const;

  /// Builds and validates a graph. Throws SchemaError, EmptyTask,
  /// MultipleRoots or CyclicDependence.
  static TaskGraph build(std::vector<IndexTask> tasks, const std::vector<std::pair<std::string, std::string>>& parent,
                         const std::vector<std::pair<std::string, std::string>>& deps,
                         const std::vector<std::pair<std::string, std::vector<std::string>>>& siblings);

 private:
  void validate_acyclic() const;

  std::vector<IndexTask> tasks_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t root_ = npos;
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> rank_;
  std::vector<std::pair<std::size_t, std::size_t>> deps_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> sibling_preds_;
};

/// Reads the JSON task-graph document:
///   {"tasks": [{"id": "f", "points": [[0,0],...]} | {"id": "g", "ispace": [4,4]}],
///    "parent": [{"parent": "f", "child": "g"}],
///    "deps": [{"before": "g", "after": "k"}],
///    "siblings": {"f": ["g", "h", "k"]}}
/// `parent`, `deps` and `siblings` are optional.
TaskGraph load_taskgraph(std::string_view json_text);

}  // namespace mapple::sim
