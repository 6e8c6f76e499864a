#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "parweight/geometry.hpp"

namespace parweight {

using Index = std::int64_t;

/// Uniform cell grid over a box in R^{n+1}.  Cell (i_0,...,i_n) has center
/// origin + (i + 1/2) * spacing and cells are addressed row-major with the
/// time axis (the last one) varying fastest.
struct Grid {
  Vec origin;                 // length n+1
  Vec spacing;                // length n+1, all > 0
  std::vector<Index> extents; // length n+1, all > 0

  Grid() = default;
  Grid(Vec origin_, Vec spacing_, std::vector<Index> extents_)
      : origin(std::move(origin_)),
        spacing(std::move(spacing_)),
        extents(std::move(extents_)) {
    if (origin.size() != spacing.size() ||
        static_cast<size_t>(origin.size()) != extents.size())
      throw std::invalid_argument("Grid: dimension mismatch");
    if ((spacing <= 0.0).any())
      throw std::invalid_argument("Grid: spacing must be positive");
    for (Index e : extents)
      if (e <= 0) throw std::invalid_argument("Grid: extents must be positive");
  }

  /// Uniform grid over [0,1]^{n+1} with `cells` cells per axis.
  static Grid unit(int dim, Index cells) {
    Vec o = Vec::Zero(dim);
    Vec h = Vec::Constant(dim, 1.0 / static_cast<double>(cells));
    return Grid(std::move(o), std::move(h), std::vector<Index>(dim, cells));
  }

  int dim() const { return static_cast<int>(origin.size()); }
  double cell_volume() const { return spacing.prod(); }
  Index total_cells() const {
    return std::accumulate(extents.begin(), extents.end(), Index{1},
                           [](Index a, Index b) { return a * b; });
  }

  Box domain_box() const {
    Vec hi(origin.size());
    for (int a = 0; a < dim(); ++a)
      hi[a] = origin[a] + spacing[a] * static_cast<double>(extents[a]);
    return Box(origin, std::move(hi));
  }

  Vec cell_center(const std::vector<Index>& idx) const {
    Vec c(dim());
    for (int a = 0; a < dim(); ++a)
      c[a] = origin[a] + (static_cast<double>(idx[a]) + 0.5) * spacing[a];
    return c;
  }

  Index flat_index(const std::vector<Index>& idx) const {
    Index f = 0;
    for (int a = 0; a < dim(); ++a) f = f * extents[a] + idx[a];
    return f;
  }

  std::vector<Index> unflatten(Index f) const {
    std::vector<Index> idx(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = f % extents[a];
      f /= extents[a];
    }
    return idx;
  }
};

/// Half-open index range [lo, hi) per axis; empty if any axis collapses.
struct CellRange {
  std::vector<Index> lo;
  std::vector<Index> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool empty() const {
    for (int a = 0; a < dim(); ++a)
      if (hi[a] <= lo[a]) return true;
    return lo.empty();
  }
  Index count() const {
    if (empty()) return 0;
    Index c = 1;
    for (int a = 0; a < dim(); ++a) c *= hi[a] - lo[a];
    return c;
  }
  bool contains(const std::vector<Index>& idx) const {
    for (int a = 0; a < dim(); ++a)
      if (idx[a] < lo[a] || idx[a] >= hi[a]) return false;
    return true;
  }
};

/// First cell index whose center lies in [coord, inf) along one axis.
inline Index snap_lo(double coord, double origin, double h) {
  return static_cast<Index>(std::ceil((coord - origin) / h - 0.5));
}

/// Snaps a box to the grid by cell-center membership, half-open on every
/// axis.  Returns the range clamped to the grid; cells outside the grid do
/// not exist.  An empty intersection yields an empty range, not an error.
inline CellRange snap_box(const Grid& g, const Box& box) {
  if (box.dim() != g.dim()) throw std::invalid_argument("snap_box: dim mismatch");
  CellRange r;
  r.lo.resize(g.dim());
  r.hi.resize(g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    Index lo = snap_lo(box.lo[a], g.origin[a], g.spacing[a]);
    Index hi = snap_lo(box.hi[a], g.origin[a], g.spacing[a]);
    r.lo[a] = std::max<Index>(lo, 0);
    r.hi[a] = std::min<Index>(hi, g.extents[a]);
    if (r.hi[a] < r.lo[a]) r.hi[a] = r.lo[a];
  }
  return r;
}

/// Number of cell centers of the grid's infinite extension inside the box.
/// This is the "full rectangle" cell count used to normalize averages of
/// zero-extended fields over boxes that stick out of the domain.
inline Index extended_cell_count(const Grid& g, const Box& box) {
  Index c = 1;
  for (int a = 0; a < g.dim(); ++a) {
    Index lo = snap_lo(box.lo[a], g.origin[a], g.spacing[a]);
    Index hi = snap_lo(box.hi[a], g.origin[a], g.spacing[a]);
    if (hi <= lo) return 0;
    c *= hi - lo;
  }
  return c;
}

/// Grid-metric volume of the full box: extended cell count * cell volume.
inline double extended_volume(const Grid& g, const Box& box) {
  return static_cast<double>(extended_cell_count(g, box)) * g.cell_volume();
}

inline bool box_inside_grid(const Grid& g, const Box& box) {
  return g.domain_box().contains_box(box);
}

/// Dense 0/1 mask over grid cells.
struct CellMask {
  const Grid* grid = nullptr;
  std::vector<std::uint8_t> bits;

  explicit CellMask(const Grid& g)
      : grid(&g), bits(static_cast<size_t>(g.total_cells()), 0) {}

  Index count() const {
    Index c = 0;
    for (auto b : bits) c += b;
    return c;
  }
  void set_range(const CellRange& r, std::uint8_t value = 1);
  void subtract(const CellMask& other) {
    for (size_t i = 0; i < bits.size(); ++i)
      if (other.bits[i]) bits[i] = 0;
  }
};

/// Visits every flat index of a (possibly empty) cell range.
template <class F>
void for_each_cell(const Grid& g, const CellRange& r, F&& f) {
  if (r.empty()) return;
  const int d = g.dim();
  std::vector<Index> idx(r.lo);
  while (true) {
    f(g.flat_index(idx), idx);
    int a = d - 1;
    while (a >= 0) {
      if (++idx[a] < r.hi[a]) break;
      idx[a] = r.lo[a];
      --a;
    }
    if (a < 0) break;
  }
}

inline void CellMask::set_range(const CellRange& r, std::uint8_t value) {
  for_each_cell(*grid, r, [&](Index f, const std::vector<Index>&) {
    bits[static_cast<size_t>(f)] = value;
  });
}

}  // namespace parweight
