#pragma once

#include <optional>
#include <vector>

#include "parweight/field.hpp"

namespace parweight {

/// Inclusive (n+1)-dimensional prefix sums of value * cell volume, padded
/// with a zero hyperplane so box sums are pure inclusion-exclusion.
/// Construction runs one compensated (Kahan) running sum per axis.
class PrefixAggregate {
 public:
  explicit PrefixAggregate(const Field& f);

  const Grid& grid() const { return grid_; }

  /// Sum of value * cellvol over a clamped in-grid cell range.
  double range_sum(const CellRange& r) const;

  /// Sum of value * cellvol over the cells snapped from the box (cells
  /// outside the grid contribute zero).
  double box_sum(const Box& box) const {
    return range_sum(snap_box(grid_, box));
  }

  /// Discrete box average: box sum / (snapped cell count * cellvol).
  /// Empty snapped range is a degenerate box.
  double box_average(const Box& box) const {
    CellRange r = snap_box(grid_, box);
    Index c = r.count();
    if (c == 0)
      throw std::domain_error("box_average: box snaps to no grid cells");
    return range_sum(r) / (static_cast<double>(c) * grid_.cell_volume());
  }

  /// Average of the zero-extended field normalized by the full rectangle:
  /// box sum / (extended cell count * cellvol).  Coincides with
  /// box_average whenever the box lies inside the grid.
  double extended_average(const Box& box) const {
    Index c = extended_cell_count(grid_, box);
    if (c == 0)
      throw std::domain_error("extended_average: degenerate box");
    return box_sum(box) / (static_cast<double>(c) * grid_.cell_volume());
  }

  /// Sum of value * cellvol over an arbitrary cell mask (direct loop).
  double masked_sum(const CellMask& mask) const;

 private:
  Grid grid_;
  Eigen::ArrayXd values_;  // kept for masked sums
  std::vector<Index> pad_extents_;  // extents + 1 per axis
  std::vector<double> cum_;

  Index pad_index(const std::vector<Index>& idx) const {
    Index f = 0;
    for (size_t a = 0; a < pad_extents_.size(); ++a)
      f = f * pad_extents_[a] + idx[a];
    return f;
  }
};

inline PrefixAggregate::PrefixAggregate(const Field& f)
    : grid_(f.grid), values_(f.values) {
  const int d = grid_.dim();
  pad_extents_.resize(d);
  Index total = 1;
  for (int a = 0; a < d; ++a) {
    pad_extents_[a] = grid_.extents[a] + 1;
    total *= pad_extents_[a];
  }
  cum_.assign(static_cast<size_t>(total), 0.0);

  // Scatter value * cellvol into the padded table at idx + 1.
  const double cv = grid_.cell_volume();
  CellRange all;
  all.lo.assign(d, 0);
  all.hi.assign(grid_.extents.begin(), grid_.extents.end());
  for_each_cell(grid_, all, [&](Index flat, const std::vector<Index>& idx) {
    std::vector<Index> padded(idx);
    for (auto& v : padded) ++v;
    cum_[static_cast<size_t>(pad_index(padded))] = f.values[flat] * cv;
  });

  // Kahan-compensated running sum along each axis in turn.
  std::vector<Index> stride(d);
  {
    Index s = 1;
    for (int a = d - 1; a >= 0; --a) {
      stride[a] = s;
      s *= pad_extents_[a];
    }
  }
  for (int a = 0; a < d; ++a) {
    Index lines = total / pad_extents_[a];
    for (Index line = 0; line < lines; ++line) {
      // Decompose the line id into the non-a coordinates.
      Index rem = line, base = 0;
      for (int b = d - 1; b >= 0; --b) {
        if (b == a) continue;
        Index coord = rem % pad_extents_[b];
        rem /= pad_extents_[b];
        base += coord * stride[b];
      }
      double sum = 0.0, comp = 0.0;
      for (Index i = 0; i < pad_extents_[a]; ++i) {
        size_t at = static_cast<size_t>(base + i * stride[a]);
        double y = cum_[at] - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        cum_[at] = sum;
      }
    }
  }
}

inline double PrefixAggregate::range_sum(const CellRange& r) const {
  if (r.empty()) return 0.0;
  const int d = grid_.dim();
  double total = 0.0;
  // Inclusion-exclusion over the 2^d corners of the padded table.
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    std::vector<Index> idx(d);
    int parity = 0;
    for (int a = 0; a < d; ++a) {
      if (corner & (1u << a)) {
        idx[a] = r.hi[a];
      } else {
        idx[a] = r.lo[a];
        ++parity;
      }
    }
    double term = cum_[static_cast<size_t>(pad_index(idx))];
    total += (parity % 2 == 0) ? term : -term;
  }
  return total;
}

inline double PrefixAggregate::masked_sum(const CellMask& mask) const {
  if (static_cast<Index>(mask.bits.size()) != grid_.total_cells())
    throw std::invalid_argument("masked_sum: mask size mismatch");
  double sum = 0.0, comp = 0.0;
  const double cv = grid_.cell_volume();
  for (size_t i = 0; i < mask.bits.size(); ++i) {
    if (!mask.bits[i]) continue;
    double y = values_[static_cast<Index>(i)] * cv - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

/// w(A) = sum of value * cellvol over masked cells.
inline double weighted_measure(const PrefixAggregate& agg,
                               const CellMask& mask) {
  return agg.masked_sum(mask);
}

}  // namespace parweight
