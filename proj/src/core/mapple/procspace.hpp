#pragma once

#include "mapple/tuple.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mapple {

enum class ProcKind { CPU, GPU, OMP };

std::string_view proc_kind_name(ProcKind kind) noexcept;
std::optional<ProcKind> parse_proc_kind(std::string_view name) noexcept;

/// The logical two-level machine: `nodes` x `procs_per_node` processors of one kind.
struct MachineShape {
  ProcKind kind = ProcKind::GPU;
  std::int64_t nodes = 1;
  std::int64_t procs_per_node = 1;

  friend bool operator==(const MachineShape&, const MachineShape&) = default;
};

/// A base machine coordinate.
struct ProcessorCoord {
  std::int64_t node = 0;
  std::int64_t proc = 0;

  friend bool operator==(const ProcessorCoord&, const ProcessorCoord&) = default;
  friend auto operator<=>(const ProcessorCoord&, const ProcessorCoord&) = default;
};

struct Split {
  std::size_t dim;
  std::int64_t factor;
};
struct Merge {
  std::size_t p;
  std::size_t q;
};
struct Swap {
  std::size_t p;
  std::size_t q;
};
struct Slice {
  std::size_t dim;
  std::int64_t low;
  std::int64_t high;
};

using Transform = std::variant<Split, Merge, Swap, Slice>;

std::string to_string(const Transform& t);

/// A machine's processor grid seen through a chain of invertible index
/// transformations. Values are immutable; every transformation returns a new
/// space. Indices of the transformed space resolve lazily back to base
/// (node, proc) coordinates by walking the chain in reverse.
class ProcSpace {
 public:
  explicit ProcSpace(MachineShape machine);

  const MachineShape& machine() const noexcept { return machine_; }
  const Tuple& shape() const noexcept { return shapes_.back(); }
  std::size_t rank() const noexcept { return shape().size(); }
  std::span<const Transform> chain() const noexcept { return chain_; }
  bool has_slice() const noexcept;

  /// Number of addressable indices (product of shape).
  std::int64_t volume() const { return shape().product(); }

  /// Dimension `dim` of extent s becomes the pair (factor, s / factor).
  ProcSpace split(std::size_t dim, std::int64_t factor) const;
  /// Fuses dims p < q into one dimension of extent s_p * s_q at position p.
  ProcSpace merge(std::size_t p, std::size_t q) const;
  /// Exchanges dims p and q.
  ProcSpace swap(std::size_t p, std::size_t q) const;
  /// Restricts dim to [low, high] (inclusive), re-based at zero.
  ProcSpace slice(std::size_t dim, std::int64_t low, std::int64_t high) const;
  /// Replaces dim by `factors` (whose product must equal its extent) through
  /// the equivalent sequence of splits.
  ProcSpace decompose(std::size_t dim, const Tuple& factors) const;

  ProcSpace apply(const Transform& t) const;

  /// Resolves an index of this space to base machine coordinates.
  ProcessorCoord resolve(std::span<const std::int64_t> index) const;
  ProcessorCoord resolve(const Tuple& index) const { return resolve(index.span()); }

  /// Resolution of every index in row-major order of shape(). Intended for
  /// exhaustive checks; refuses spaces larger than `limit` points.
  std::vector<ProcessorCoord> materialize(std::int64_t limit = 1 << 22) const;

  /// Stable textual identity of machine + chain, e.g. for caching.
  std::string fingerprint() const;

 private:
  ProcSpace with(Transform t, Tuple new_shape) const;

  MachineShape machine_;
  std::vector<Transform> chain_;
  // shapes_[0] is the base (nodes, procs); shapes_[i + 1] follows chain_[i].
  std::vector<Tuple> shapes_;
};

}  // namespace mapple
