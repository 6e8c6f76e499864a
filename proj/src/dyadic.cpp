#include "parweight/dyadic.hpp"

#include <cmath>

namespace parweight {

DyadicLattice::DyadicLattice(Box domain, int k_min, int k_max, double p, int n,
                             std::vector<int> spatial_shift,
                             double time_offset)
    : n_(n),
      p_(p),
      k_min_(k_min),
      k_max_(k_max),
      domain_(std::move(domain)),
      spatial_shift_(std::move(spatial_shift)),
      time_offset_(time_offset) {
  if (k_max_ < k_min_) throw std::invalid_argument("lattice: empty k range");
  if (!(p_ >= 1.0)) throw std::invalid_argument("lattice: p >= 1 required");
  if (n_ < 1) throw std::invalid_argument("lattice: n >= 1 required");
  if (spatial_shift_.empty()) spatial_shift_.assign(n_, 0);
  if (static_cast<int>(spatial_shift_.size()) != n_)
    throw std::invalid_argument("lattice: shift size != n");
  for (int d : spatial_shift_)
    if (d < 0 || d > 2)
      throw std::invalid_argument("lattice: shift digits in {0,1,2}");
  if (domain_.dim() != n_ + 1)
    throw std::invalid_argument("lattice: domain dim != n+1");

  const int floor_split = static_cast<int>(std::floor(std::exp2(p_)));
  const int ceil_split = static_cast<int>(std::ceil(std::exp2(p_)));

  levels_.reserve(k_max_ - k_min_ + 1);
  DyadicLevel root;
  root.k = k_min_;
  root.lx = std::exp2(-static_cast<double>(k_min_));
  // Root time length pinned to the upper sidelength bound 2^{-kp-1}.
  root.lt = std::exp2(-static_cast<double>(k_min_) * p_ - 1.0);
  root.widened_lt = std::exp2(-static_cast<double>(k_min_) * p_);
  levels_.push_back(root);
  for (int k = k_min_ + 1; k <= k_max_; ++k) {
    const DyadicLevel& up = levels_.back();
    DyadicLevel lev;
    lev.k = k;
    lev.lx = up.lx / 2.0;
    const double lower_bound = std::exp2(-static_cast<double>(k) * p_ - 1.0);
    lev.split_from_parent =
        (up.lt / floor_split < lower_bound) ? floor_split : ceil_split;
    lev.lt = up.lt / lev.split_from_parent;
    lev.widened_lt = std::exp2(-static_cast<double>(k) * p_);
    levels_.push_back(lev);
  }
}

Box DyadicLattice::cell_box(int k, const std::vector<Index>& sx,
                            Index st) const {
  const DyadicLevel& lev = level(k);
  Vec lo(n_ + 1), hi(n_ + 1);
  for (int a = 0; a < n_; ++a) {
    double A = spatial_anchor(a, k);
    lo[a] = A + static_cast<double>(sx[a]) * lev.lx;
    hi[a] = A + static_cast<double>(sx[a] + 1) * lev.lx;
  }
  lo[n_] = time_offset_ + static_cast<double>(st) * lev.lt;
  hi[n_] = time_offset_ + static_cast<double>(st + 1) * lev.lt;
  return Box(std::move(lo), std::move(hi));
}

DyadicRect DyadicLattice::make_rect(int k, const std::vector<Index>& sx,
                                    Index st) const {
  DyadicRect r;
  r.level = k;
  r.spatial_index = sx;
  r.time_index = st;
  r.s_minus = cell_box(k, sx, st);
  r.s_plus = cell_box(k, sx, st + 1);
  r.r_plus = r.s_plus;
  r.r_plus.hi[n_] = r.r_plus.lo[n_] + level(k).widened_lt;
  return r;
}

std::optional<std::pair<std::vector<Index>, Index>> DyadicLattice::locate(
    int k, const Vec& point) const {
  if (!domain_.contains_point(point)) return std::nullopt;
  const DyadicLevel& lev = level(k);
  std::vector<Index> sx(n_);
  for (int a = 0; a < n_; ++a) {
    double A = spatial_anchor(a, k);
    sx[a] = static_cast<Index>(std::floor((point[a] - A) / lev.lx));
  }
  Index st = static_cast<Index>(
      std::floor((point[n_] - time_offset_) / lev.lt));
  return std::make_pair(std::move(sx), st);
}

std::pair<std::vector<Index>, Index> DyadicLattice::parent_indices(
    int k, const std::vector<Index>& sx, Index st) const {
  if (k <= k_min_)
    throw std::out_of_range("parent: rectangle at the coarsest level");
  const Index sign = (((k % 2) + 2) % 2 == 0) ? 1 : -1;
  std::vector<Index> psx(n_);
  for (int a = 0; a < n_; ++a)
    psx[a] = floor_div(sx[a] + sign * spatial_shift_[a], 2);
  Index pst = floor_div(st, level(k).split_from_parent);
  return {std::move(psx), pst};
}

void DyadicLattice::level_ranges(int k, std::vector<Index>& sx_lo,
                                 std::vector<Index>& sx_hi, Index& st_lo,
                                 Index& st_hi) const {
  const DyadicLevel& lev = level(k);
  sx_lo.resize(n_);
  sx_hi.resize(n_);
  for (int a = 0; a < n_; ++a) {
    double A = spatial_anchor(a, k);
    sx_lo[a] = static_cast<Index>(std::floor((domain_.lo[a] - A) / lev.lx));
    sx_hi[a] = static_cast<Index>(std::ceil((domain_.hi[a] - A) / lev.lx));
  }
  st_lo = static_cast<Index>(
      std::floor((domain_.lo[n_] - time_offset_) / lev.lt));
  st_hi = static_cast<Index>(
      std::ceil((domain_.hi[n_] - time_offset_) / lev.lt));
}

Index DyadicLattice::level_cell_count(int k) const {
  std::vector<Index> lo, hi;
  Index tlo, thi;
  level_ranges(k, lo, hi, tlo, thi);
  Index c = thi - tlo;
  for (int a = 0; a < n_; ++a) c *= hi[a] - lo[a];
  return c;
}

void DyadicLattice::enumerate(
    int k,
    const std::function<void(const std::vector<Index>&, Index)>& fn) const {
  std::vector<Index> lo, hi;
  Index tlo, thi;
  level_ranges(k, lo, hi, tlo, thi);
  std::vector<Index> sx(lo);
  while (true) {
    for (Index st = tlo; st < thi; ++st) fn(sx, st);
    int a = n_ - 1;
    while (a >= 0) {
      if (++sx[a] < hi[a]) break;
      sx[a] = lo[a];
      --a;
    }
    if (a < 0) break;
  }
}

bool DyadicLattice::sidelength_invariant(double rel_tol) const {
  for (const DyadicLevel& lev : levels_) {
    const double lo = std::exp2(-lev.k * p_ - 2.0);
    const double hi = std::exp2(-lev.k * p_ - 1.0);
    if (lev.lt < lo * (1.0 - rel_tol) || lev.lt > hi * (1.0 + rel_tol))
      return false;
    if (std::abs(lev.lx - std::exp2(-static_cast<double>(lev.k))) >
        rel_tol * lev.lx)
      return false;
  }
  return true;
}

DyadicLattice build_lattice(const Box& domain, int k_min, int k_max, double p,
                            int n, std::vector<int> spatial_shift,
                            double time_offset) {
  return DyadicLattice(domain, k_min, k_max, p, n, std::move(spatial_shift),
                       time_offset);
}

DyadicRect parent(const DyadicLattice& lattice, const DyadicRect& rect) {
  auto [psx, pst] =
      lattice.parent_indices(rect.level, rect.spatial_index, rect.time_index);
  return lattice.make_rect(rect.level - 1, psx, pst);
}

bool widened_nesting_check(const DyadicLattice& lattice, Index sample_budget) {
  const auto& levels = lattice.levels();
  const double tol = 1e-12;
  // Overhang chain: the widened part grows monotonically toward coarse
  // levels, which is exactly what containment needs once the companions
  // nest.
  for (size_t i = 1; i < levels.size(); ++i) {
    double child_gap = levels[i].widened_lt - levels[i].lt;
    double parent_gap = levels[i - 1].widened_lt - levels[i - 1].lt;
    if (child_gap > parent_gap * (1.0 + tol)) return false;
  }
  // Concrete spot check on enumerated cells.
  Index used = 0;
  for (size_t i = 1; i < levels.size() && used < sample_budget; ++i) {
    const int k = levels[i].k;
    const int split = levels[i].split_from_parent;
    std::vector<Index> lo, hi;
    Index tlo, thi;
    lattice.level_ranges(k, lo, hi, tlo, thi);
    std::vector<Index> sx(lo);
    for (Index st = tlo; st < thi && used < sample_budget; ++st, ++used) {
      DyadicRect child = lattice.make_rect(k, sx, st);
      // Companion parent: the level-(k-1) cell whose S^+ contains this S^+.
      Index plus_parent = floor_div(st + 1, split);
      std::vector<Index> psx = lattice.parent_indices(k, sx, st).first;
      DyadicRect wparent = lattice.make_rect(k - 1, psx, plus_parent - 1);
      if (!wparent.s_plus.contains_box(child.s_plus)) continue;
      const Box& rp = child.r_plus;
      const Box& wrp = wparent.r_plus;
      for (int a = 0; a <= lattice.n(); ++a) {
        const double eps = tol * (1.0 + std::abs(wrp.hi[a]));
        if (rp.lo[a] < wrp.lo[a] - eps || rp.hi[a] > wrp.hi[a] + eps)
          return false;
      }
    }
  }
  return true;
}

int LatticeFamily::member_id(const std::vector<int>& digits,
                             int time_index) const {
  int d = 0;
  for (int a = n - 1; a >= 0; --a) d = d * 3 + digits[a];
  int pow3 = 1;
  for (int a = 0; a < n; ++a) pow3 *= 3;
  return time_index * pow3 + d;
}

LatticeFamily build_family(const Box& domain, int k_min, int k_max, double p,
                           int n, Index cell_budget) {
  LatticeFamily fam;
  fam.n = n;
  fam.p = p;
  fam.k_min = k_min;
  fam.k_max = k_max;
  fam.domain = domain;
  fam.time_translations = static_cast<int>(std::ceil(std::exp2(5.0 * p)));
  int pow3 = 1;
  for (int a = 0; a < n; ++a) pow3 *= 3;
  const int count = pow3 * fam.time_translations;

  DyadicLattice probe(domain, k_min, k_max, p, n, {}, 0.0);
  Index cells_per_member = 0;
  for (int k = k_min; k <= k_max; ++k)
    cells_per_member += probe.level_cell_count(k);
  if (cells_per_member * count > cell_budget)
    throw std::length_error("build_family: cell budget exceeded");

  const double T0 = probe.levels().front().lt;
  fam.members.reserve(count);
  for (int j = 0; j < fam.time_translations; ++j) {
    const double offset = T0 * static_cast<double>(j) /
                          static_cast<double>(fam.time_translations);
    for (int d = 0; d < pow3; ++d) {
      std::vector<int> digits(n);
      int v = d;
      for (int a = 0; a < n; ++a) {
        digits[a] = v % 3;
        v /= 3;
      }
      fam.members.emplace_back(domain, k_min, k_max, p, n, std::move(digits),
                               offset);
    }
  }
  return fam;
}

std::optional<CoverHit> find_cover(const ParabolicRectangle& R,
                                   const LatticeFamily& family) {
  const int n = family.n;
  const double L = R.L;
  const double hp = R.time_half_length();
  const Box rplus = upper_part(R, 0.0);
  const Vec zminus = lower_center(R, 0.0);

  for (int k = family.k_max; k >= family.k_min; --k) {
    // Admissible level: 2^3 L <= lx_k < 2^5 L.
    const double lx = std::exp2(-static_cast<double>(k));
    if (!(8.0 * L <= lx && lx < 32.0 * L)) continue;
    const DyadicLattice& probe = family.members.front();
    const double lt = probe.level(k).lt;

    // Spatial digit per axis: the cube must avoid that grid's cut lines.
    std::vector<int> digits(n, -1);
    std::vector<Index> sx(n);
    bool spatial_ok = true;
    for (int a = 0; a < n && spatial_ok; ++a) {
      for (int d = 0; d < 3; ++d) {
        double sign = (((k % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
        double A = sign * static_cast<double>(d) / 3.0 * lx;
        Index m = static_cast<Index>(
            std::floor((R.center_x[a] - L / 2.0 - A) / lx));
        if (R.center_x[a] + L / 2.0 <= A + static_cast<double>(m + 1) * lx) {
          digits[a] = d;
          sx[a] = m;
          break;
        }
      }
      if (digits[a] < 0) spatial_ok = false;
    }
    if (!spatial_ok) continue;

    for (int j = 0; j < family.time_translations; ++j) {
      const int id = family.member_id(digits, j);
      const DyadicLattice& lat = family.members[id];
      const double u = lat.time_offset();
      // Largest level-k boundary at or below the bottom of R^+; it must sit
      // above the center of R^-.
      Index m = static_cast<Index>(std::floor((R.center_t - u) / lt));
      double b = u + static_cast<double>(m) * lt;
      if (!(b > R.center_t - hp / 2.0)) continue;

      DyadicRect rect = lat.make_rect(k, sx, m - 1);
      if (!lat.domain().contains_box(rect.s_minus) ||
          !lat.domain().contains_box(rect.s_plus))
        continue;
      // Verify every claimed property before returning the hit.
      if (!rect.s_plus.contains_box(rplus)) continue;
      if (!rect.s_minus.contains_point(zminus)) continue;
      const double sx_len = rect.s_plus.hi[0] - rect.s_plus.lo[0];
      const double st_len = rect.s_plus.hi[n] - rect.s_plus.lo[n];
      if (!(8.0 * L <= sx_len && sx_len < 32.0 * L)) continue;
      if (!(std::exp2(3.0 * family.p - 2.0) * hp <= st_len &&
            st_len < std::exp2(5.0 * family.p - 1.0) * hp))
        continue;
      return CoverHit{id, std::move(rect)};
    }
  }
  return std::nullopt;
}

Field dyadic_maximal(const Field& f, const DyadicLattice& lattice,
                     double alpha) {
  const Grid& g = f.grid;
  PrefixAggregate agg(f.abs());
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(g.total_cells());
  CellRange all;
  all.lo.assign(g.dim(), 0);
  all.hi.assign(g.extents.begin(), g.extents.end());
  const int n = lattice.n();
  for_each_cell(g, all, [&](Index flat, const std::vector<Index>& idx) {
    const Vec z = g.cell_center(idx);
    double best = 0.0;
    for (int k = lattice.k_min(); k <= lattice.k_max(); ++k) {
      auto loc = lattice.locate(k, z);
      if (!loc) continue;
      Box splus = lattice.cell_box(k, loc->first, loc->second + 1);
      const double vol =
          std::pow(lattice.level(k).lx, n) * lattice.level(k).lt;
      double term = agg.box_sum(splus) / vol;
      if (alpha != 0.0) term *= std::pow(vol, alpha);
      best = std::max(best, term);
    }
    out[flat] = best;
  });
  return Field(g, std::move(out), "Md" + f.name);
}

VerificationReport domination_check(const Field& f, const Params& pr,
                                    const ScaleFamily& scales,
                                    const LatticeFamily& family) {
  const Grid& g = f.grid;
  const double r = pr.r;
  Field mc = maximal_field(f, TimeDirection::forward, /*centered=*/true, pr,
                           scales);
  Eigen::ArrayXd rhs_sum = Eigen::ArrayXd::Zero(g.total_cells());
  for (const DyadicLattice& lat : family.members) {
    Field md = dyadic_maximal(f, lat, pr.alpha);
    rhs_sum += md.values.pow(r);
  }
  const double C1 =
      std::exp2((1.0 - pr.alpha) * (5.0 * pr.n + 5.0 * pr.p - 1.0));

  double worst = 0.0;
  Index violations = 0;
  Index worst_cell = -1;
  for (Index i = 0; i < g.total_cells(); ++i) {
    double lhs = std::pow(mc.values[i], r);
    double rhs = std::pow(C1, r) * rhs_sum[i];
    if (lhs > rhs * (1.0 + kRelSlack) && lhs > 0.0) {
      ++violations;
      if (worst_cell < 0 || lhs / rhs > worst) worst_cell = i;
    }
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
  }
  VerificationReport rep = VerificationReport::make(
      "domination", worst, 1.0, 1.0);
  rep.pass = violations == 0;
  rep.paper_constant = C1;
  rep.meta.emplace_back("violations", static_cast<double>(violations));
  rep.meta.emplace_back("max_ratio", worst);
  if (worst_cell >= 0)
    rep.meta.emplace_back("violating_cell", static_cast<double>(worst_cell));
  rep.note = "pointwise (Mc f)^r <= C1^r sum_iota (Md_iota f)^r";
  return rep;
}

}  // namespace parweight
