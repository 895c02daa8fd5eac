#pragma once

#include "mapple/rational.hpp"
#include "mapple/tuple.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mapple {

/// Parameter grid of the 2D stencil comparison: x:y aspect ratios, iteration
/// area per node, and total processor counts.
struct SweepSpec {
  std::vector<std::pair<std::int64_t, std::int64_t>> ratios;
  std::vector<std::int64_t> areas;
  std::vector<std::int64_t> gpus;
  std::int64_t gpus_per_node = 4;
};

/// 6 ratios x 5 areas x 6 machine sizes.
SweepSpec default_grid();

/// {"ratios": ["1:1", "1:32"], "areas": [1000000], "gpus": [4, 8], "gpus_per_node": 4}.
/// Missing keys fall back to the full grid. Throws InvalidArgument.
SweepSpec parse_sweep_spec(std::string_view json_text);

struct SweepRecord {
  std::int64_t ratio_x, ratio_y, area, gpus, nodes;
  Tuple extents;
  Tuple optimal, greedy;
  Rational volume_optimal, volume_greedy;
  /// (V_greedy / V_optimal - 1) * 100; model-predicted, not a runtime figure.
  double improvement_pct;
};

struct SweepGroup {
  std::string parameter;  // "ratio", "area", "gpus" or "all"
  std::string value;
  std::size_t configs;
  /// (geomean(V_greedy / V_optimal) - 1) * 100 over the group.
  double geomean_improvement_pct;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // grid-spec order: ratio, then area, then gpus
  std::vector<SweepGroup> groups;
};

/// Extents (x, y) with x:y as given and x*y ~ area * nodes, volumes under the
/// isotropic search and the greedy grid, both as 2D block partitions.
SweepRecord sweep_config(std::int64_t ratio_x, std::int64_t ratio_y, std::int64_t area, std::int64_t gpus,
                         std::int64_t gpus_per_node);

SweepResult run_sweep(const SweepSpec& spec);

}  // namespace mapple
