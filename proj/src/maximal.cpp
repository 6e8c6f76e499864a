#include "parweight/maximal.hpp"

#include "parweight/parallel.hpp"

namespace parweight {

double MaximalEvaluator::rect_term(const ParabolicRectangle& R,
                                   TimeDirection dir, double gamma,
                                   double alpha) const {
  const Box box = (dir == TimeDirection::forward) ? upper_part(R, gamma)
                                                  : lower_part(R, gamma);
  const Index full = extended_cell_count(grid(), box);
  if (full == 0) return 0.0;
  const double integral = agg_.box_sum(box);
  if (integral == 0.0) return 0.0;
  const double avg = integral / (static_cast<double>(full) * grid().cell_volume());
  if (alpha == 0.0) return avg;
  return std::pow(lagged_part_volume(R, gamma), alpha) * avg;
}

double MaximalEvaluator::centered(const std::vector<Index>& cell,
                                  TimeDirection dir, const Params& pr,
                                  const ScaleFamily& scales,
                                  DomainPolicy policy) const {
  if (scales.scales.empty())
    throw std::invalid_argument("maximal: empty scale family");
  const Vec z = grid().cell_center(cell);
  const Box domain = grid().domain_box();
  double best = 0.0;
  for (double L : scales.scales) {
    ParabolicRectangle R =
        (dir == TimeDirection::forward)
            ? rectangle_with_lower_center(z, L, pr.p, pr.gamma)
            : rectangle_with_upper_center(z, L, pr.p, pr.gamma);
    if (policy == DomainPolicy::inside_only &&
        !domain.contains_box(R.full_box()))
      continue;
    best = std::max(best, rect_term(R, dir, pr.gamma, pr.alpha));
  }
  return best;
}

double MaximalEvaluator::uncentered(const std::vector<Index>& cell,
                                    TimeDirection dir, const Params& pr,
                                    const ScaleFamily& scales,
                                    const CellRange* center_candidates,
                                    DomainPolicy policy) const {
  if (scales.scales.empty())
    throw std::invalid_argument("maximal: empty scale family");
  const Grid& g = grid();
  const Vec z = g.cell_center(cell);
  const Box domain = g.domain_box();
  double best = 0.0;
  for (double L : scales.scales) {
    const double hp = std::pow(L, pr.p);
    // Center window: all centers whose anchored part contains z, padded by
    // one cell and filtered through the exact snap test.
    Vec lo(g.dim()), hi(g.dim());
    const int n = g.dim() - 1;
    for (int a = 0; a < n; ++a) {
      lo[a] = z[a] - L / 2.0 - g.spacing[a];
      hi[a] = z[a] + L / 2.0 + g.spacing[a];
    }
    if (dir == TimeDirection::forward) {
      lo[n] = z[n] + pr.gamma * hp - g.spacing[n];
      hi[n] = z[n] + hp + g.spacing[n];
    } else {
      lo[n] = z[n] - hp - g.spacing[n];
      hi[n] = z[n] - pr.gamma * hp + g.spacing[n];
    }
    CellRange window = snap_box(g, Box(std::move(lo), std::move(hi)));
    if (center_candidates) {
      for (int a = 0; a < g.dim(); ++a) {
        window.lo[a] = std::max(window.lo[a], center_candidates->lo[a]);
        window.hi[a] = std::min(window.hi[a], center_candidates->hi[a]);
        if (window.hi[a] < window.lo[a]) window.hi[a] = window.lo[a];
      }
    }
    for_each_cell(g, window, [&](Index, const std::vector<Index>& cidx) {
      const Vec c = g.cell_center(cidx);
      ParabolicRectangle R(c.head(n), c[n], L, pr.p);
      if (policy == DomainPolicy::inside_only &&
          !domain.contains_box(R.full_box()))
        return;
      const Box anchor = (dir == TimeDirection::forward)
                             ? lower_part(R, pr.gamma)
                             : upper_part(R, pr.gamma);
      if (!snap_box(g, anchor).contains(cell)) return;
      best = std::max(best, rect_term(R, dir, pr.gamma, pr.alpha));
    });
  }
  return best;
}

namespace {

Field uncentered_field(const MaximalEvaluator& ev, const Field& f,
                       TimeDirection dir, const Params& pr,
                       const ScaleFamily& scales, DomainPolicy policy) {
  const Grid& g = f.grid;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(g.total_cells());
  const Box domain = g.domain_box();
  const int n = g.dim() - 1;
  CellRange all;
  all.lo.assign(g.dim(), 0);
  all.hi.assign(g.extents.begin(), g.extents.end());
  // Center-major sweep: each admissible rectangle contributes its term to
  // every cell of its anchored part.
  for_each_cell(g, all, [&](Index, const std::vector<Index>& cidx) {
    const Vec c = g.cell_center(cidx);
    for (double L : scales.scales) {
      ParabolicRectangle R(c.head(n), c[n], L, pr.p);
      if (policy == DomainPolicy::inside_only &&
          !domain.contains_box(R.full_box()))
        continue;
      const double term = ev.rect_term(R, dir, pr.gamma, pr.alpha);
      if (term <= 0.0) continue;
      const Box anchor = (dir == TimeDirection::forward)
                             ? lower_part(R, pr.gamma)
                             : upper_part(R, pr.gamma);
      for_each_cell(g, snap_box(g, anchor),
                    [&](Index flat, const std::vector<Index>&) {
                      out[flat] = std::max(out[flat], term);
                    });
    }
  });
  return Field(g, std::move(out), "M" + f.name);
}

}  // namespace

Field maximal_field(const Field& f, TimeDirection dir, bool centered,
                    const Params& pr, const ScaleFamily& scales,
                    DomainPolicy policy, int jobs) {
  MaximalEvaluator ev(f);
  const Grid& g = f.grid;
  if (!centered) return uncentered_field(ev, f, dir, pr, scales, policy);
  Eigen::ArrayXd out(g.total_cells());
  parallel_for(g.total_cells(), jobs, [&](Index flat) {
    out[flat] = ev.centered(g.unflatten(flat), dir, pr, scales, policy);
  });
  return Field(g, std::move(out), "M" + f.name);
}

Field pair_family_maximal(const Field& f, const std::vector<BoxPair>& pairs,
                          double alpha) {
  const Grid& g = f.grid;
  PrefixAggregate agg(f.abs());
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(g.total_cells());
  for (const BoxPair& pr : pairs) {
    const Index full = extended_cell_count(g, pr.upper);
    if (full == 0) continue;
    const double vol = pr.upper.volume();
    const double avg = agg.box_sum(pr.upper) / vol;
    const double term = (alpha == 0.0) ? avg : std::pow(vol, alpha) * avg;
    if (term <= 0.0) continue;
    for_each_cell(g, snap_box(g, pr.lower),
                  [&](Index flat, const std::vector<Index>&) {
                    out[flat] = std::max(out[flat], term);
                  });
  }
  return Field(g, std::move(out), "Mpairs");
}

CellMask superlevel_mask(const Field& f, double lambda) {
  CellMask m(f.grid);
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    if (f.values[i] > lambda) m.bits[static_cast<size_t>(i)] = 1;
  return m;
}

}  // namespace parweight
