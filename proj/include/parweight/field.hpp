#pragma once

#include <functional>
#include <string>
#include <utility>

#include "parweight/grid.hpp"

namespace parweight {

/// Function sampled on a uniform grid, one value per cell, row-major with
/// the time axis fastest.  Weights are nonnegative; a generic integrand f
/// may be signed (the operators only ever see |f|).
struct Field {
  Grid grid;
  Eigen::ArrayXd values;
  std::string name;

  Field() = default;
  Field(Grid g, Eigen::ArrayXd v, std::string label = "f")
      : grid(std::move(g)), values(std::move(v)), name(std::move(label)) {
    if (values.size() != grid.total_cells())
      throw std::invalid_argument("Field: value count != cell count");
  }

  static Field constant(const Grid& g, double c, std::string label = "f") {
    return Field(g, Eigen::ArrayXd::Constant(g.total_cells(), c),
                 std::move(label));
  }

  double operator[](Index flat) const { return values[flat]; }

  Field map(const std::function<double(double)>& f, std::string label) const {
    Eigen::ArrayXd v = values;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f(v[i]);
    return Field(grid, std::move(v), std::move(label));
  }

  /// Cellwise power, the workhorse for w^r, v^{-q'}, sigma = v^{1-q'}.
  Field pow(double e, std::string label = "") const {
    return Field(grid, values.pow(e),
                 label.empty() ? name + "^" : std::move(label));
  }

  Field abs() const { return Field(grid, values.abs(), name); }

  bool nonnegative() const { return (values >= 0.0).all(); }

  /// Field on the time-reversed grid: cell (..., it) maps to
  /// (..., extent_t - 1 - it) and the domain reflects to [-hi_t, -lo_t).
  Field time_reflected() const;
};

inline Field Field::time_reflected() const {
  Grid g = grid;
  const int d = grid.dim() - 1;
  double hi_t = grid.origin[d] +
                grid.spacing[d] * static_cast<double>(grid.extents[d]);
  g.origin[d] = -hi_t;
  Eigen::ArrayXd v(values.size());
  const Index et = grid.extents[d];
  const Index blocks = grid.total_cells() / et;
  for (Index b = 0; b < blocks; ++b)
    for (Index it = 0; it < et; ++it)
      v[b * et + (et - 1 - it)] = values[b * et + it];
  return Field(std::move(g), std::move(v), name);
}

}  // namespace parweight
