#include "mapple/commvol.hpp"

#include "mapple/error.hpp"

namespace mapple {

BlockGrid::BlockGrid(Tuple extents, Tuple grid) : extents_(std::move(extents)), grid_(std::move(grid)) {
  if (extents_.size() != grid_.size())
    throw Error(Errc::ShapeMismatch, "extents " + extents_.to_string() + " and grid " + grid_.to_string() +
                                         " differ in length");
  if (extents_.empty()) throw Error(Errc::InvalidArgument, "block grid must have at least one dimension");
  for (std::size_t m = 0; m < extents_.size(); ++m) {
    if (extents_[m] <= 0) throw Error(Errc::InvalidArgument, "extents must be positive");
    if (grid_[m] < 1 || grid_[m] > extents_[m])
      throw Error(Errc::InvalidArgument, "block count " + std::to_string(grid_[m]) + " outside [1, " +
                                             std::to_string(extents_[m]) + "] in dimension " + std::to_string(m));
  }
}

bool BlockGrid::divisible() const noexcept {
  for (std::size_t m = 0; m < rank(); ++m)
    if (extents_[m] % grid_[m] != 0) return false;
  return true;
}

std::int64_t BlockGrid::block_start(std::size_t m, std::int64_t b) const {
  return checked_mul(extents_[m], b) / grid_[m];
}

Rational surface_area(const std::vector<Rational>& x) {
  Rational prod = 1;
  Rational inv_sum = 0;
  for (const auto& v : x) {
    prod *= v;
    inv_sum += 1 / v;
  }
  return 2 * prod * inv_sum;
}

Rational surface_volume(const BlockGrid& grid) {
  std::vector<Rational> w, l;
  for (std::size_t m = 0; m < grid.rank(); ++m) {
    w.push_back(grid.workload(m));
    l.emplace_back(grid.extents()[m]);
  }
  return surface_area(w) * grid.processors() - surface_area(l);
}

Rational surface_volume_2d(const BlockGrid& grid) {
  if (grid.rank() != 2) throw Error(Errc::ShapeMismatch, "perimeter form needs a 2D grid");
  const auto& l = grid.extents();
  return 2 * (grid.workload(0) + grid.workload(1)) * grid.processors() - 2 * Rational(l[0] + l[1]);
}

namespace {

void check_halo(const BlockGrid& grid, const Tuple& halo) {
  if (halo.size() != grid.rank())
    throw Error(Errc::ShapeMismatch, "halo " + halo.to_string() + " does not match rank " +
                                         std::to_string(grid.rank()));
  for (auto h : halo)
    if (h < 0) throw Error(Errc::InvalidArgument, "halo widths must be non-negative");
}

}  // namespace

Rational halo_volume(const BlockGrid& grid, const Tuple& halo) {
  check_halo(grid, halo);
  const auto& l = grid.extents();
  const auto& d = grid.grid();
  Rational v = 0;
  for (std::size_t n = 0; n < grid.rank(); ++n) {
    Rational term = Rational(d[n]) * halo[n];
    for (std::size_t m = 0; m < grid.rank(); ++m)
      if (m != n) term *= l[m];
    v += term;
  }
  return v;
}

Rational halo_volume_dual(const BlockGrid& grid, const Tuple& halo) {
  check_halo(grid, halo);
  Rational sum = 0;
  Rational prod = 1;
  for (std::size_t n = 0; n < grid.rank(); ++n) {
    sum += halo[n] / grid.workload(n);
    prod *= grid.extents()[n];
  }
  return sum * prod;
}

Rational transpose_volume(const BlockGrid& grid, std::size_t dim) {
  if (dim >= grid.rank())
    throw Error(Errc::DimOutOfRange, "dimension " + std::to_string(dim) + " out of range for rank " +
                                         std::to_string(grid.rank()));
  Rational prod_w = 1;
  for (std::size_t m = 0; m < grid.rank(); ++m) prod_w *= grid.workload(m);
  return (1 - Rational(1, grid.grid()[dim])) * prod_w * grid.processors();
}

std::int64_t oracle_boundary_count(const BlockGrid& grid, const Tuple& halo, std::int64_t max_cells) {
  check_halo(grid, halo);
  const Tuple& l = grid.extents();
  if (l.product() > max_cells)
    throw Error(Errc::TooLarge, std::to_string(l.product()) + " cells exceed the enumeration cap of " +
                                    std::to_string(max_cells));

  // Per dimension and coordinate: owning block and its [lo, hi) bounds.
  struct Cell1D {
    std::int64_t block, lo, hi;
  };
  std::vector<std::vector<Cell1D>> axis(grid.rank());
  for (std::size_t m = 0; m < grid.rank(); ++m) {
    for (std::int64_t b = 0; b < grid.grid()[m]; ++b) {
      const auto lo = grid.block_start(m, b);
      const auto hi = grid.block_start(m, b + 1);
      for (auto x = lo; x < hi; ++x) axis[m].push_back({b, lo, hi});
    }
  }

  std::int64_t count = 0;
  for_each_index(l, [&](const Tuple& cell) {
    for (std::size_t n = 0; n < grid.rank(); ++n) {
      const auto x = cell[n];
      const auto& c = axis[n][static_cast<std::size_t>(x)];
      if (c.block > 0 && x - c.lo < halo[n]) ++count;
      if (c.block + 1 < grid.grid()[n] && c.hi - 1 - x < halo[n]) ++count;
    }
  });
  return count;
}

}  // namespace mapple
