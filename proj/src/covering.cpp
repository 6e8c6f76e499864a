#include "parweight/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace parweight {

void SelectionInput::validate(double tol) const {
  for (const SelectionItem& it : items) {
    Vec z = lower_center(it.rect, gamma);
    if (((z - it.point).abs() > tol * (1.0 + z.abs())).any())
      throw std::invalid_argument(
          "SelectionInput: point is not the lower-part center of its "
          "rectangle");
  }
}

GreedySelection greedy_select(const SelectionInput& input) {
  GreedySelection out;
  const std::size_t m = input.items.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return input.items[a].rect.L > input.items[b].rect.L;
                   });

  std::vector<Box> kept_lower;
  std::vector<std::size_t> kept_index;
  out.log.reserve(m);
  for (std::size_t pos : order) {
    const SelectionItem& it = input.items[pos];
    SelectionLogEntry e;
    e.index = pos;
    e.sidelength = it.rect.L;
    e.point = it.point;
    e.kept = true;
    for (std::size_t j = 0; j < kept_lower.size(); ++j) {
      if (kept_lower[j].contains_point(it.point)) {
        e.kept = false;
        e.discarded_by = static_cast<std::ptrdiff_t>(kept_index[j]);
        break;
      }
    }
    if (e.kept) {
      kept_lower.push_back(lower_part(it.rect, input.gamma));
      kept_index.push_back(pos);
      out.selected.push_back(pos);
    }
    out.log.push_back(std::move(e));
  }
  return out;
}

namespace {

/// Exact max overlap of half-open boxes: the maximum of sum chi is
/// attained at some point whose coordinates are lo-corners of the family.
Index max_box_overlap(const std::vector<Box>& boxes) {
  if (boxes.empty()) return 0;
  const int d = boxes.front().dim();
  std::vector<std::vector<double>> coords(d);
  for (const Box& b : boxes)
    for (int a = 0; a < d; ++a) coords[a].push_back(b.lo[a]);
  for (auto& c : coords) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  Index best = 0;
  std::vector<std::size_t> pick(d, 0);
  Vec pt(d);
  while (true) {
    for (int a = 0; a < d; ++a) pt[a] = coords[a][pick[a]];
    Index cnt = 0;
    for (const Box& b : boxes)
      if (b.contains_point(pt)) ++cnt;
    best = std::max(best, cnt);
    int a = d - 1;
    while (a >= 0) {
      if (++pick[a] < coords[a].size()) break;
      pick[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return best;
}

}  // namespace

Index scale_bucket_overlap(const SelectionInput& input,
                           const std::vector<std::size_t>& selected, int k) {
  const double lo = std::exp2(-static_cast<double>(k) - 1.0);
  const double hi = std::exp2(-static_cast<double>(k));
  std::vector<Box> lowers;
  for (std::size_t i : selected) {
    const double L = input.items[i].rect.L;
    if (L > lo && L <= hi)
      lowers.push_back(lower_part(input.items[i].rect, input.gamma));
  }
  return max_box_overlap(lowers);
}

std::vector<int> occupied_buckets(const SelectionInput& input,
                                  const std::vector<std::size_t>& selected) {
  std::vector<int> ks;
  for (std::size_t i : selected) {
    const double L = input.items[i].rect.L;
    // bucket k with 2^{-k-1} < L <= 2^{-k}
    int k = static_cast<int>(std::ceil(-std::log2(L) - 1.0 + 1e-12));
    const double lo = std::exp2(-k - 1.0), hi = std::exp2(-k);
    if (!(L > lo && L <= hi)) {
      if (L <= lo) ++k;
      else --k;
    }
    ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

SelectionResult trim_sets(const SelectionInput& input,
                          const std::vector<std::size_t>& selected,
                          const std::vector<double>& values, double lambda,
                          const Field& f, const Params& pr) {
  if (values.size() != selected.size())
    throw std::invalid_argument("trim_sets: one value per selected rectangle");
  for (double v : values)
    if (!(v > lambda && v <= 2.0 * lambda * (1.0 + 1e-12)))
      throw std::invalid_argument(
          "trim_sets: selected rectangle violates lambda < value <= 2 lambda");

  const Grid& g = f.grid;
  PrefixAggregate agg(f.abs());
  SelectionResult out;
  out.selected = selected;
  out.c = overlap_count_threshold(pr);
  out.C2 = trimmed_overlap_bound(pr);

  std::vector<Box> uppers;
  uppers.reserve(selected.size());
  for (std::size_t i : selected)
    uppers.push_back(upper_part(input.items[i].rect, pr.gamma));

  std::vector<Index> overlap_all(static_cast<size_t>(g.total_cells()), 0);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const double Li = input.items[selected[i]].rect.L;
    const Box& Ri = uppers[i];

    // Cells of R_i^+ covered by >= 2c smaller overlapping upper parts.
    std::vector<Index> counts(static_cast<size_t>(g.total_cells()), 0);
    for (std::size_t j = 0; j < selected.size(); ++j) {
      if (j == i) continue;
      const double Lj = input.items[selected[j]].rect.L;
      if (!(Lj < Li)) continue;
      if (!Ri.intersects(uppers[j])) continue;
      for_each_cell(g, snap_box(g, uppers[j]),
                    [&](Index flat, const std::vector<Index>&) {
                      ++counts[static_cast<size_t>(flat)];
                    });
    }
    CellMask Fi(g);
    Fi.set_range(snap_box(g, Ri));
    const double threshold = 2.0 * out.c;
    for (size_t cidx = 0; cidx < Fi.bits.size(); ++cidx)
      if (Fi.bits[cidx] &&
          static_cast<double>(counts[cidx]) >= threshold)
        Fi.bits[cidx] = 0;

    const double full = agg.box_sum(Ri);
    const double kept = agg.masked_sum(Fi);
    out.mass_ratio.push_back(full > 0.0 ? kept / full : 1.0);
    for (size_t cidx = 0; cidx < Fi.bits.size(); ++cidx)
      if (Fi.bits[cidx]) ++overlap_all[cidx];
    out.trimmed.push_back(std::move(Fi));
  }

  out.max_trimmed_overlap = 0;
  for (Index c : overlap_all)
    out.max_trimmed_overlap = std::max(out.max_trimmed_overlap, c);
  out.mass_retention_ok = std::all_of(
      out.mass_ratio.begin(), out.mass_ratio.end(),
      [](double r) { return r >= 0.5 - 1e-12; });
  out.overlap_ok =
      static_cast<double>(out.max_trimmed_overlap) <= out.C2 * (1.0 + 1e-12);
  return out;
}

}  // namespace parweight
