#pragma once

#include <optional>

#include "parweight/params.hpp"
#include "parweight/prefix.hpp"
#include "parweight/scales.hpp"

namespace parweight {

/// Forward operators average over upper parts of rectangles anchored below
/// the point; backward operators mirror in time.
enum class TimeDirection { forward, backward };

/// zero_extend: rectangles may stick out of the grid; |f| is extended by
/// zero and averages are normalized by the full rectangle.  inside_only:
/// only rectangles entirely inside the grid domain are admissible (the
/// family the weight-constant estimators share).
enum class DomainPolicy { zero_extend, inside_only };

/// A lower/upper footprint pair: the value is anchored on the lower box
/// and averages |f| over the upper box.
struct BoxPair {
  Box lower;
  Box upper;
};

/// Point and field evaluation of the four parabolic fractional maximal
/// functions over a declared finite scale family.  Holds prefix sums of
/// |f| so each rectangle term costs O(2^d).
class MaximalEvaluator {
 public:
  explicit MaximalEvaluator(const Field& f)
      : abs_field_(f.abs()), agg_(abs_field_) {}

  const Grid& grid() const { return abs_field_.grid; }
  const PrefixAggregate& aggregate() const { return agg_; }

  /// Fractional average term of one rectangle:
  /// |R^pm(gamma)|^alpha * (zero-extended integral / full-rectangle volume).
  /// The |.|^alpha factor uses the exact volume (1-gamma) L^{n+p}.
  double rect_term(const ParabolicRectangle& R, TimeDirection dir,
                   double gamma, double alpha) const;

  double centered(const std::vector<Index>& cell, TimeDirection dir,
                  const Params& pr, const ScaleFamily& scales,
                  DomainPolicy policy = DomainPolicy::zero_extend) const;

  /// Brute-force uncentered value at one cell.  Candidate centers default
  /// to every grid cell within reach of the largest scale.
  double uncentered(const std::vector<Index>& cell, TimeDirection dir,
                    const Params& pr, const ScaleFamily& scales,
                    const CellRange* center_candidates = nullptr,
                    DomainPolicy policy = DomainPolicy::zero_extend) const;

 private:
  Field abs_field_;
  PrefixAggregate agg_;
};

/// Pointwise maximal function over the whole grid.
Field maximal_field(const Field& f, TimeDirection dir, bool centered,
                    const Params& pr, const ScaleFamily& scales,
                    DomainPolicy policy = DomainPolicy::zero_extend,
                    int jobs = 1);

/// Maximal function of an explicit lower/upper footprint family: at each
/// cell, the max over pairs whose lower box contains the cell center of
/// |upper|^alpha * avg_upper |f| (true-volume normalization).
Field pair_family_maximal(const Field& f, const std::vector<BoxPair>& pairs,
                          double alpha);

/// Cells where the field exceeds lambda.
CellMask superlevel_mask(const Field& f, double lambda);

}  // namespace parweight
