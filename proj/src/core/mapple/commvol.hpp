#pragma once

#include "mapple/rational.hpp"
#include "mapple/tuple.hpp"

#include <cstdint>

namespace mapple {

/// Block partition of an iteration space: `grid[m]` blocks along dimension m.
class BlockGrid {
 public:
  /// Throws ShapeMismatch when lengths differ, InvalidArgument when a block
  /// count is not within [1, extent].
  BlockGrid(Tuple extents, Tuple grid);

  const Tuple& extents() const noexcept { return extents_; }
  const Tuple& grid() const noexcept { return grid_; }
  std::size_t rank() const noexcept { return extents_.size(); }
  std::int64_t processors() const { return grid_.product(); }
  bool divisible() const noexcept;

  /// w_m = l_m / d_m.
  Rational workload(std::size_t m) const { return Rational(extents_[m], grid_[m]); }

  /// First cell of block b along dimension m: floor(l_m * b / d_m).
  std::int64_t block_start(std::size_t m, std::int64_t b) const;

 private:
  Tuple extents_;
  Tuple grid_;
};

/// SA(x_1..x_k) = 2 (prod x) (sum 1/x).
Rational surface_area(const std::vector<Rational>& x);

/// Elements crossing block boundaries, counted on both sides of every cut:
/// SA(w) * d - SA(l).
Rational surface_volume(const BlockGrid& grid);

/// Two-dimensional perimeter form 2 (w1 + w2) d - 2 (l1 + l2).
Rational surface_volume_2d(const BlockGrid& grid);

/// V = sum_n d_n h_n prod_{m != n} l_m.
Rational halo_volume(const BlockGrid& grid, const Tuple& halo);

/// (sum_n h_n / w_n) (prod_m l_m); equals halo_volume when l_n = w_n d_n.
Rational halo_volume_dual(const BlockGrid& grid, const Tuple& halo);

/// V_n* = (1 - 1/d_n) (prod_m w_m) d.
Rational transpose_volume(const BlockGrid& grid, std::size_t dim);

/// Brute-force count: for every cell and every dimension, one unit per
/// internal block face on the cell's own side that lies within h_n cells.
/// Blocks use the floor formula of BlockGrid::block_start.
std::int64_t oracle_boundary_count(const BlockGrid& grid, const Tuple& halo,
                                   std::int64_t max_cells = 10'000'000);

}  // namespace mapple
