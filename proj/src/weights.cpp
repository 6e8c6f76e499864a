#include "parweight/weights.hpp"

#include <cmath>

namespace parweight {

namespace {

double range_min(const Field& f, const CellRange& r) {
  double m = std::numeric_limits<double>::infinity();
  for_each_cell(f.grid, r, [&](Index flat, const std::vector<Index>&) {
    m = std::min(m, f.values[flat]);
  });
  return m;
}

}  // namespace

RectFamily RectFamily::cell_centered(const Grid& g, const ScaleFamily& scales,
                                     double p) {
  RectFamily fam;
  const Box domain = g.domain_box();
  const int n = g.dim() - 1;
  CellRange all;
  all.lo.assign(g.dim(), 0);
  all.hi.assign(g.extents.begin(), g.extents.end());
  for_each_cell(g, all, [&](Index, const std::vector<Index>& idx) {
    const Vec c = g.cell_center(idx);
    for (double L : scales.scales) {
      ParabolicRectangle R(c.head(n), c[n], L, p);
      if (domain.contains_box(R.full_box())) fam.rectangles.push_back(R);
    }
  });
  if (fam.rectangles.empty())
    throw std::invalid_argument("RectFamily: no rectangle fits the domain");
  return fam;
}

RectFamily RectFamily::forward_anchored(const Grid& g,
                                        const ScaleFamily& scales, double p,
                                        double gamma) {
  RectFamily fam;
  const Box domain = g.domain_box();
  CellRange all;
  all.lo.assign(g.dim(), 0);
  all.hi.assign(g.extents.begin(), g.extents.end());
  for_each_cell(g, all, [&](Index, const std::vector<Index>& idx) {
    const Vec z = g.cell_center(idx);
    for (double L : scales.scales) {
      ParabolicRectangle R = rectangle_with_lower_center(z, L, p, gamma);
      if (domain.contains_box(R.full_box())) fam.rectangles.push_back(R);
    }
  });
  if (fam.rectangles.empty())
    throw std::invalid_argument("RectFamily: no rectangle fits the domain");
  return fam;
}

DualPowerAggregate::DualPowerAggregate(const Field& v, double exponent)
    : powered_(v.grid, Eigen::ArrayXd::Zero(v.values.size()), "dual"),
      zero_mask_(v.grid, Eigen::ArrayXd::Zero(v.values.size()), "zeros") {
  if (!(exponent < 0.0))
    throw std::invalid_argument("DualPowerAggregate: exponent must be < 0");
  for (Eigen::Index i = 0; i < v.values.size(); ++i) {
    if (v.values[i] > 0.0) {
      powered_.values[i] = std::pow(v.values[i], exponent);
    } else {
      zero_mask_.values[i] = 1.0;
    }
  }
  agg_ = std::make_unique<PrefixAggregate>(powered_);
  zeros_ = std::make_unique<PrefixAggregate>(zero_mask_);
}

bool DualPowerAggregate::has_zero(const Box& box) const {
  return zeros_->box_sum(box) > 0.5 * powered_.grid.cell_volume();
}

double DualPowerAggregate::box_sum(const Box& box) const {
  if (has_zero(box)) return std::numeric_limits<double>::infinity();
  return agg_->box_sum(box);
}

double DualPowerAggregate::box_average(const Box& box) const {
  if (has_zero(box)) return std::numeric_limits<double>::infinity();
  return agg_->box_average(box);
}

ConstantReport a_qr_constant(const WeightPair& pair, double q, double r,
                             double gamma, const RectFamily& family) {
  if (!(q > 1.0)) throw std::invalid_argument("a_qr_constant: q > 1 required");
  pair.validate();
  const double qc = q / (q - 1.0);
  PrefixAggregate wr(pair.w.pow(r));
  DualPowerAggregate dual(pair.v, -qc);

  ConstantReport rep;
  rep.family_size = family.size();
  for (const ParabolicRectangle& R : family.rectangles) {
    const double wterm = std::pow(wr.box_average(lower_part(R, gamma)), 1.0 / r);
    const double vavg = dual.box_average(upper_part(R, gamma));
    const double value = std::isinf(vavg)
                             ? vavg
                             : wterm * std::pow(vavg, 1.0 / qc);
    if (value > rep.value || !rep.witness) {
      rep.value = value;
      rep.witness = R;
    }
    if (std::isinf(rep.value)) break;
  }
  return rep;
}

ConstantReport a_1r_constant(const WeightPair& pair, double r, double gamma,
                             const RectFamily& family) {
  if (!(r >= 1.0)) throw std::invalid_argument("a_1r_constant: r >= 1");
  pair.validate();
  PrefixAggregate wr(pair.w.pow(r));
  ConstantReport rep;
  rep.family_size = family.size();
  for (const ParabolicRectangle& R : family.rectangles) {
    const double wterm = std::pow(wr.box_average(lower_part(R, gamma)), 1.0 / r);
    const double vmin =
        range_min(pair.v, snap_box(pair.v.grid, upper_part(R, gamma)));
    const double value = (vmin > 0.0)
                             ? wterm / vmin
                             : std::numeric_limits<double>::infinity();
    if (value > rep.value || !rep.witness) {
      rep.value = value;
      rep.witness = R;
    }
    if (std::isinf(rep.value)) break;
  }
  return rep;
}

A1GapReport a1_pointwise_gap(const WeightPair& pair, double r, double gamma,
                             double p, const ScaleFamily& scales) {
  pair.validate();
  const Grid& g = pair.w.grid;
  Params pr;
  pr.n = g.dim() - 1;
  pr.p = p;
  pr.gamma = gamma;
  pr.alpha = 0.0;
  pr.q = 1.0;
  pr.r = r;

  Field wr = pair.w.pow(r);
  Field m = maximal_field(wr, TimeDirection::backward, /*centered=*/false, pr,
                          scales, DomainPolicy::inside_only);

  A1GapReport rep;
  for (Index i = 0; i < g.total_cells(); ++i) {
    const double vv = pair.v.values[i];
    const double mv = std::pow(m.values[i], 1.0 / r);
    if (mv == 0.0) continue;
    rep.pointwise_max = std::max(
        rep.pointwise_max,
        vv > 0.0 ? mv / vv : std::numeric_limits<double>::infinity());
  }
  RectFamily fam = RectFamily::cell_centered(g, scales, p);
  rep.constant = a_1r_constant(pair, r, gamma, fam).value;
  rep.gap_over_constant = rep.pointwise_max / rep.constant;
  rep.constant_over_gap = rep.constant / rep.pointwise_max;
  return rep;
}

ConstantReport bump_constant(const WeightPair& pair, double q, double s,
                             double gamma, const RectFamily& family) {
  if (!(q > 1.0) || !(s > 1.0))
    throw std::invalid_argument("bump_constant: q, s > 1 required");
  pair.validate();
  PrefixAggregate w1(pair.w);
  DualPowerAggregate dual(pair.v, s / (1.0 - q));

  ConstantReport rep;
  rep.family_size = family.size();
  const double outer = (q - 1.0) / s;
  for (const ParabolicRectangle& R : family.rectangles) {
    const double wterm = w1.box_average(lower_part(R, gamma));
    const double vavg = dual.box_average(upper_part(R, gamma));
    const double value = std::isinf(vavg) ? vavg : wterm * std::pow(vavg, outer);
    if (value > rep.value || !rep.witness) {
      rep.value = value;
      rep.witness = R;
    }
    if (std::isinf(rep.value)) break;
  }
  return rep;
}

ConstantReport sawyer_constant(const WeightPair& pair, double q, double r,
                               double alpha, const RectFamily& family,
                               const ScaleFamily& scales, double p,
                               std::size_t* skipped) {
  if (!(q > 1.0)) throw std::invalid_argument("sawyer_constant: q > 1");
  pair.validate();
  const Grid& g = pair.w.grid;
  const double qc = q / (q - 1.0);
  Field sigma = pair.v.pow(1.0 - qc, "sigma");
  if (!sigma.values.isFinite().all())
    throw std::invalid_argument("sawyer_constant: sigma = v^{1-q'} not finite");
  PrefixAggregate sig(sigma);
  const int n = g.dim() - 1;
  std::size_t skip_count = 0;

  ConstantReport rep;
  rep.family_size = family.size();
  for (const ParabolicRectangle& R : family.rectangles) {
    const Box rbox = R.full_box();
    const Box rplus = upper_part(R, 0.0);
    const double denom = sig.box_sum(rplus);
    if (denom <= 0.0) {
      ++skip_count;  // 0/0 guard: testing function vanishes
      continue;
    }
    // M^+_alpha(sigma chi_{R^+}) on the cells of R, center-major sweep.
    CellRange rcells = snap_box(g, rbox);
    std::vector<double> tvals(static_cast<size_t>(g.total_cells()), 0.0);
    for (double L : scales.scales) {
      const double hp = std::pow(L, p);
      Box window = rbox;
      for (int a = 0; a < n; ++a) {
        window.lo[a] -= L / 2.0 + g.spacing[a];
        window.hi[a] += L / 2.0 + g.spacing[a];
      }
      window.lo[n] = rbox.lo[n] - g.spacing[n];
      window.hi[n] = rbox.hi[n] + hp + g.spacing[n];
      for_each_cell(g, snap_box(g, window),
                    [&](Index, const std::vector<Index>& cidx) {
        const Vec c = g.cell_center(cidx);
        ParabolicRectangle Rc(c.head(n), c[n], L, p);
        const Box anchor = lower_part(Rc, 0.0);
        if (!anchor.intersects(rbox)) return;
        const Box up = upper_part(Rc, 0.0);
        const Index full = extended_cell_count(g, up);
        if (full == 0) return;
        double term =
            sig.box_sum(up.intersection(rplus)) /
            (static_cast<double>(full) * g.cell_volume());
        if (term <= 0.0) return;
        if (alpha != 0.0)
          term *= std::pow(lagged_part_volume(Rc, 0.0), alpha);
        for_each_cell(g, snap_box(g, anchor),
                      [&](Index flat, const std::vector<Index>& zidx) {
                        if (rcells.contains(zidx))
                          tvals[static_cast<size_t>(flat)] =
                              std::max(tvals[static_cast<size_t>(flat)], term);
                      });
      });
    }
    double inner = 0.0;
    const double cv = g.cell_volume();
    for_each_cell(g, rcells, [&](Index flat, const std::vector<Index>&) {
      inner += std::pow(tvals[static_cast<size_t>(flat)], r) *
               pair.w.values[flat] * cv;
    });
    const double value =
        std::pow(denom, -1.0 / q) * std::pow(inner, 1.0 / r);
    if (value > rep.value || !rep.witness) {
      rep.value = value;
      rep.witness = R;
    }
  }
  if (skipped) *skipped = skip_count;
  return rep;
}

VerificationReport minmax_closure_check(const WeightPair& pair1,
                                        const WeightPair& pair2, double q,
                                        double r, double gamma,
                                        const RectFamily& family) {
  auto constant = [&](const WeightPair& pr) {
    return q > 1.0 ? a_qr_constant(pr, q, r, gamma, family).value
                   : a_1r_constant(pr, r, gamma, family).value;
  };
  const double c1 = constant(pair1);
  const double c2 = constant(pair2);
  const double cmax = constant(pair1.cellwise_max(pair2));
  const double cmin = constant(pair1.cellwise_min(pair2));

  VerificationReport rep = VerificationReport::make(
      "minmax_closure", std::max(cmax, cmin), c1 + c2, 1.0);
  rep.meta.emplace_back("max_pair_constant", cmax);
  rep.meta.emplace_back("min_pair_constant", cmin);
  rep.meta.emplace_back("sum_of_constants", c1 + c2);
  rep.note = "[(max w, max v)] and [(min w, min v)] <= [(w1,v1)] + [(w2,v2)]";
  return rep;
}

}  // namespace parweight
