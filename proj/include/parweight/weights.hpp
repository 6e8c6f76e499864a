#pragma once

#include <memory>

#include "parweight/maximal.hpp"
#include "parweight/reports.hpp"

namespace parweight {

struct WeightPair {
  Field w;
  Field v;

  void validate() const {
    if (!w.nonnegative() || !v.nonnegative())
      throw std::invalid_argument("WeightPair: weights must be nonnegative");
  }

  WeightPair cellwise_max(const WeightPair& other) const {
    return {Field(w.grid, w.values.max(other.w.values), "max_w"),
            Field(v.grid, v.values.max(other.v.values), "max_v")};
  }
  WeightPair cellwise_min(const WeightPair& other) const {
    return {Field(w.grid, w.values.min(other.w.values), "min_w"),
            Field(v.grid, v.values.min(other.v.values), "min_v")};
  }
};

/// Finite stand-in for "sup over all parabolic rectangles": a deduplicated
/// family of rectangles fully inside the grid domain.
struct RectFamily {
  std::vector<ParabolicRectangle> rectangles;

  std::size_t size() const { return rectangles.size(); }

  /// Rectangles centered at grid cell centers, sidelengths from the scale
  /// ladder, fully inside the domain.
  static RectFamily cell_centered(const Grid& g, const ScaleFamily& scales,
                                  double p);

  /// Rectangles whose lower-part center z(R^-(gamma)) is a grid cell
  /// center (the family the centered forward operator draws from).
  static RectFamily forward_anchored(const Grid& g, const ScaleFamily& scales,
                                     double p, double gamma);
};

/// Negative-power averages v^e (e < 0) that go +inf on zero cells; a zero
/// count is tracked separately so the prefix table never holds infinities.
class DualPowerAggregate {
 public:
  DualPowerAggregate(const Field& v, double exponent);

  /// Count-normalized average; +inf when the box contains a zero cell.
  double box_average(const Box& box) const;
  double box_sum(const Box& box) const;
  bool has_zero(const Box& box) const;

 private:
  Field powered_;
  Field zero_mask_;
  std::unique_ptr<PrefixAggregate> agg_;
  std::unique_ptr<PrefixAggregate> zeros_;
};

/// [(w,v)] for q > 1: max over R of
/// (avg_{R^-(gamma)} w^r)^{1/r} (avg_{R^+(gamma)} v^{-q'})^{1/q'}.
ConstantReport a_qr_constant(const WeightPair& pair, double q, double r,
                             double gamma, const RectFamily& family);

/// [(w,v)] for q = 1: max over R of
/// (avg_{R^-(gamma)} w^r)^{1/r} / min_{R^+(gamma)} v.
ConstantReport a_1r_constant(const WeightPair& pair, double r, double gamma,
                             const RectFamily& family);

struct A1GapReport {
  double pointwise_max = 0.0;  // max_z (M^{gamma-} w^r)^{1/r} / v
  double constant = 0.0;       // a_1r constant over the matched family
  double gap_over_constant = 0.0;
  double constant_over_gap = 0.0;
};

/// Both directions of the pointwise characterization of A^+_{1,r}: the
/// suprema agree when the operator and the constant share one rectangle
/// family.
A1GapReport a1_pointwise_gap(const WeightPair& pair, double r, double gamma,
                             double p, const ScaleFamily& scales);

/// Bump constant: max over R of
/// (avg_{R^-} w) (avg_{R^+} v^{s/(1-q)})^{(q-1)/s}.
ConstantReport bump_constant(const WeightPair& pair, double q, double s,
                             double gamma, const RectFamily& family);

/// Testing constant: max over R of
/// (int_{R^+} sigma)^{-1/q} (int_R (M^+_alpha(sigma chi_{R^+}))^r w)^{1/r}
/// with sigma = v^{1-q'} and the uncentered forward operator at gamma = 0.
ConstantReport sawyer_constant(const WeightPair& pair, double q, double r,
                               double alpha, const RectFamily& family,
                               const ScaleFamily& scales, double p,
                               std::size_t* skipped = nullptr);

/// Closure of the class under cellwise max and min:
/// [(max w, max v)] <= [(w1,v1)] + [(w2,v2)], same for min.
VerificationReport minmax_closure_check(const WeightPair& pair1,
                                        const WeightPair& pair2, double q,
                                        double r, double gamma,
                                        const RectFamily& family);

}  // namespace parweight
