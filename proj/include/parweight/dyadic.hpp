#pragma once

#include <functional>
#include <optional>

#include "parweight/maximal.hpp"
#include "parweight/reports.hpp"

namespace parweight {

inline Index floor_div(Index a, Index b) {
  Index q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

/// Per-level geometry of a parabolic dyadic lattice.  lx halves from level
/// to level; lt divides by floor(2^p) or ceil(2^p), whichever branch keeps
/// 2^{-kp-2} <= lt <= 2^{-kp-1}.
struct DyadicLevel {
  int k = 0;
  double lx = 1.0;
  double lt = 0.5;
  int split_from_parent = 0;  // time split applied to level k-1 (0 at root)
  double widened_lt = 1.0;    // 2^{-kp}
};

/// One lattice cell S^-, its time-shifted companion S^+ (the next cell up
/// in the same level) and the widened rectangle R^+ sharing the bottom of
/// S^+ with time length 2^{-kp}.
struct DyadicRect {
  int level = 0;
  std::vector<Index> spatial_index;
  Index time_index = 0;
  Box s_minus;
  Box s_plus;
  Box r_plus;
};

/// Multi-level parabolic dyadic lattice over a bounded domain.
///
/// Cells are defined by index arithmetic against per-axis anchors: spatial
/// axis a at level k is tiled by [A_a(k) + m lx_k, A_a(k) + (m+1) lx_k)
/// with A_a(k) = (-1)^k shift_a/3 * lx_k (the alternating-shift scheme, so
/// the 3^n shifted grids each stay nested), and time is tiled by
/// [u + m lt_k, u + (m+1) lt_k) with a single root offset u shared by all
/// levels.  Parent/child relations are exact integer maps.
class DyadicLattice {
 public:
  DyadicLattice() = default;
  DyadicLattice(Box domain, int k_min, int k_max, double p, int n,
                std::vector<int> spatial_shift, double time_offset);

  int n() const { return n_; }
  double p() const { return p_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  const Box& domain() const { return domain_; }
  const std::vector<int>& spatial_shift() const { return spatial_shift_; }
  double time_offset() const { return time_offset_; }
  const std::vector<DyadicLevel>& levels() const { return levels_; }
  const DyadicLevel& level(int k) const { return levels_.at(k - k_min_); }

  double spatial_anchor(int axis, int k) const {
    double sign = (((k % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
    return sign * static_cast<double>(spatial_shift_[axis]) / 3.0 *
           level(k).lx;
  }

  Box cell_box(int k, const std::vector<Index>& sx, Index st) const;
  DyadicRect make_rect(int k, const std::vector<Index>& sx, Index st) const;

  /// Cell indices of the level-k cell containing a point; nullopt only
  /// when the point lies outside every enumerated cell of the level.
  std::optional<std::pair<std::vector<Index>, Index>> locate(
      int k, const Vec& point) const;

  std::pair<std::vector<Index>, Index> parent_indices(
      int k, const std::vector<Index>& sx, Index st) const;

  /// Index ranges of the level-k cells meeting the domain.
  void level_ranges(int k, std::vector<Index>& sx_lo, std::vector<Index>& sx_hi,
                    Index& st_lo, Index& st_hi) const;

  Index level_cell_count(int k) const;

  void enumerate(int k,
                 const std::function<void(const std::vector<Index>&, Index)>&
                     fn) const;

  /// Sidelength bounds at every level; exact up to rel_tol.
  bool sidelength_invariant(double rel_tol = 1e-12) const;

 private:
  int n_ = 1;
  double p_ = 1.0;
  int k_min_ = 0, k_max_ = 0;
  Box domain_;
  std::vector<int> spatial_shift_;
  double time_offset_ = 0.0;
  std::vector<DyadicLevel> levels_;
};

DyadicLattice build_lattice(const Box& domain, int k_min, int k_max, double p,
                            int n, std::vector<int> spatial_shift = {},
                            double time_offset = 0.0);

/// Unique coarser rectangle whose S^- contains the argument's S^-.
DyadicRect parent(const DyadicLattice& lattice, const DyadicRect& rect);

/// Verifies R^+_k subset R^+_{k-1} for nested companions S^+_k subset
/// S^+_{k-1}: the per-level overhang chain
/// l_t(R^+_k) - l_t(S^+_k) <= l_t(R^+_{k-1}) - l_t(S^+_{k-1}) covers all
/// cells; a bounded sample of concrete boxes is checked as well.
bool widened_nesting_check(const DyadicLattice& lattice,
                           Index sample_budget = 4096);

struct LatticeFamily {
  std::vector<DyadicLattice> members;  // 3^n spatial shifts x ceil(2^{5p}) offsets
  int n = 1;
  double p = 1.0;
  int k_min = 0, k_max = 0;
  Box domain;
  int time_translations = 0;  // ceil(2^{5p})

  int member_id(const std::vector<int>& digits, int time_index) const;
};

/// 3^n ceil(2^{5p}) lattices: every spatial-shift digit tuple crossed with
/// time-root offsets j T0 / ceil(2^{5p}), T0 the coarsest-level time length.
LatticeFamily build_family(const Box& domain, int k_min, int k_max, double p,
                           int n, Index cell_budget = Index{1} << 31);

struct CoverHit {
  int lattice_id = -1;
  DyadicRect rect;
};

/// Finds a family member and cell with R^+ inside S^+_k, z(R^-) in S^-_k,
/// and the comparability bounds
///   2^3 l_x(R^+) <= l_x(S^+_k) < 2^5 l_x(R^+),
///   2^{3p-2} l_t(R^+) <= l_t(S^+_k) < 2^{5p-1} l_t(R^+).
/// not-found is a reportable outcome, not an error.
std::optional<CoverHit> find_cover(const ParabolicRectangle& R,
                                   const LatticeFamily& family);

/// Dyadic parabolic maximal function: at each cell the max over levels of
/// |S^+|^alpha avg_{S^+} |f| for the unique S^- containing the cell center.
/// Averages are normalized by the exact cell volume.
Field dyadic_maximal(const Field& f, const DyadicLattice& lattice,
                     double alpha);

/// Pointwise domination of the centered forward operator by the lattice
/// family: (M f)^r <= C1^r sum_iota (M_{d,iota} f)^r with
/// C1 = 2^{(1-alpha)(5n+5p-1)}.
VerificationReport domination_check(const Field& f, const Params& pr,
                                    const ScaleFamily& scales,
                                    const LatticeFamily& family);

}  // namespace parweight
