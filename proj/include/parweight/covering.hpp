#pragma once

#include <cstdint>

#include "parweight/maximal.hpp"
#include "parweight/params.hpp"
#include "parweight/prefix.hpp"

namespace parweight {

/// One candidate of the covering argument: a point z and a parabolic
/// rectangle whose lower-part center is z.
struct SelectionItem {
  Vec point;  // z = z(R^-(gamma)), length n+1
  ParabolicRectangle rect;
};

struct SelectionInput {
  std::vector<SelectionItem> items;
  double gamma = 0.0;

  /// Checks z = z(R^-(gamma)) for every item.
  void validate(double tol = 1e-9) const;
};

struct SelectionLogEntry {
  std::size_t index = 0;     // position in the input
  double sidelength = 0.0;
  Vec point;
  bool kept = false;
  std::ptrdiff_t discarded_by = -1;  // input index of the covering selection
};

struct GreedySelection {
  std::vector<std::size_t> selected;  // input indices, in selection order
  std::vector<SelectionLogEntry> log;
};

/// Largest-first selection: walk the items by decreasing sidelength (ties
/// by input order) and keep a rectangle iff its point is not yet covered
/// by a selected lower part.  Every input point ends up covered.
GreedySelection greedy_select(const SelectionInput& input);

/// Max over points of sum_i chi_{R_i^-(gamma)} restricted to the bucket
/// 2^{-k-1} < l(R_i) <= 2^{-k}.  Exact corner sweep over the box family.
Index scale_bucket_overlap(const SelectionInput& input,
                           const std::vector<std::size_t>& selected, int k);

/// Buckets k that contain at least one selected rectangle.
std::vector<int> occupied_buckets(const SelectionInput& input,
                                  const std::vector<std::size_t>& selected);

/// Bounded-overlap constants of the trimming step.
inline double overlap_count_threshold(const Params& pr) {  // c
  return std::ceil(
      std::exp2(9.0 * pr.n + 3.0 * pr.p + 11.0 + 1.0 / (1.0 - pr.alpha)) /
      (1.0 - pr.gamma));
}
inline double trimmed_overlap_bound(const Params& pr) {  // C2
  return std::exp2(9.0 * pr.n + 3.0 * pr.p + 13.0 + 1.0 / (1.0 - pr.alpha)) /
         (1.0 - pr.gamma);
}
inline double bucket_overlap_bound(const Params& pr) {  // 2^{3n+p+2}
  return std::exp2(3.0 * pr.n + pr.p + 2.0);
}

struct SelectionResult {
  std::vector<std::size_t> selected;
  std::vector<CellMask> trimmed;  // F_i, one mask per selected rectangle
  double c = 0.0;
  double C2 = 0.0;
  std::vector<double> mass_ratio;   // int_{F_i}|f| / int_{R_i^+}|f|
  Index max_trimmed_overlap = 0;    // max_z sum_i chi_{F_i}(z)
  bool mass_retention_ok = false;   // every ratio >= 1/2
  bool overlap_ok = false;          // max overlap <= C2
};

/// Trimming F_i = R_i^+(gamma) \ G_i^{2c}: G_i^k collects the cells of
/// R_i^+ covered by at least k smaller overlapping upper parts.  Requires
/// every selected rectangle to sit in the slice lambda < value <= 2 lambda
/// of the operator it came from; `values` are those operator values.
SelectionResult trim_sets(const SelectionInput& input,
                          const std::vector<std::size_t>& selected,
                          const std::vector<double>& values, double lambda,
                          const Field& f, const Params& pr);

}  // namespace parweight
