#include <doctest.h>

#include <random>

#include "parweight/maximal.hpp"
#include "parweight/random_fields.hpp"

using namespace parweight;

namespace {

// Straight-loop oracle for one rectangle term: membership scan for the
// integral, extended center count for the normalization.
double oracle_rect_term(const Field& f, const ParabolicRectangle& R,
                        TimeDirection dir, double gamma, double alpha) {
  const Grid& g = f.grid;
  const Box box =
      dir == TimeDirection::forward ? upper_part(R, gamma) : lower_part(R, gamma);
  double integral = 0.0;
  CellRange all;
  all.lo.assign(g.dim(), 0);
  all.hi.assign(g.extents.begin(), g.extents.end());
  for_each_cell(g, all, [&](Index flat, const std::vector<Index>& idx) {
    if (box.contains_point(g.cell_center(idx)))
      integral += std::abs(f.values[flat]) * g.cell_volume();
  });
  Index full = extended_cell_count(g, box);
  if (full == 0 || integral == 0.0) return 0.0;
  double avg = integral / (static_cast<double>(full) * g.cell_volume());
  if (alpha == 0.0) return avg;
  return std::pow(lagged_part_volume(R, gamma), alpha) * avg;
}

double oracle_centered(const Field& f, const std::vector<Index>& cell,
                       TimeDirection dir, const Params& pr,
                       const ScaleFamily& scales) {
  const Grid& g = f.grid;
  Vec z = g.cell_center(cell);
  double best = 0.0;
  for (double L : scales.scales) {
    ParabolicRectangle R =
        dir == TimeDirection::forward
            ? rectangle_with_lower_center(z, L, pr.p, pr.gamma)
            : rectangle_with_upper_center(z, L, pr.p, pr.gamma);
    best = std::max(best, oracle_rect_term(f, R, dir, pr.gamma, pr.alpha));
  }
  return best;
}

// Exhaustive double loop over every center cell and scale.
double oracle_uncentered(const Field& f, const std::vector<Index>& cell,
                         TimeDirection dir, const Params& pr,
                         const ScaleFamily& scales) {
  const Grid& g = f.grid;
  Vec z = g.cell_center(cell);
  double best = 0.0;
  CellRange all;
  all.lo.assign(g.dim(), 0);
  all.hi.assign(g.extents.begin(), g.extents.end());
  for_each_cell(g, all, [&](Index, const std::vector<Index>& cidx) {
    Vec c = g.cell_center(cidx);
    for (double L : scales.scales) {
      ParabolicRectangle R(c.head(g.dim() - 1), c[g.dim() - 1], L, pr.p);
      const Box anchor = dir == TimeDirection::forward
                             ? lower_part(R, pr.gamma)
                             : upper_part(R, pr.gamma);
      if (!snap_box(g, anchor).contains(cell)) continue;
      best = std::max(best, oracle_rect_term(f, R, dir, pr.gamma, pr.alpha));
    }
  });
  return best;
}

Params make_params(int n, double p, double gamma, double alpha) {
  Params pr;
  pr.n = n;
  pr.p = p;
  pr.gamma = gamma;
  pr.alpha = alpha;
  return pr;
}

}  // namespace

TEST_CASE("constant field has maximal value one at interior points") {
  Grid g = Grid::unit(2, 16);
  Field f = Field::constant(g, 1.0);
  MaximalEvaluator ev(f);
  Params pr = make_params(1, 1.0, 0.0, 0.0);
  ScaleFamily scales(std::vector<double>{0.125, 0.25});
  for (TimeDirection dir : {TimeDirection::forward, TimeDirection::backward}) {
    CHECK(ev.centered({8, 8}, dir, pr, scales) == doctest::Approx(1.0));
    CHECK(ev.uncentered({8, 8}, dir, pr, scales) == doctest::Approx(1.0));
  }
  // Near the boundary the zero extension can only lower the value.
  CHECK(ev.centered({8, 15}, TimeDirection::forward, pr, scales) <= 1.0);
}

TEST_CASE("single-cell indicator above the point, hand-enumerated") {
  Grid g = Grid::unit(2, 16);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(g.total_cells());
  std::vector<Index> spike = {8, 10};
  v[g.flat_index(spike)] = 1.0;
  Field f(g, v);
  MaximalEvaluator ev(f);
  Params pr = make_params(1, 1.0, 0.0, 0.0);
  ScaleFamily scales(std::vector<double>{2.0 / 16, 4.0 / 16, 8.0 / 16});
  std::vector<Index> at = {8, 8};
  double got = ev.centered(at, TimeDirection::forward, pr, scales);
  CHECK(got == doctest::Approx(oracle_centered(f, at, TimeDirection::forward,
                                               pr, scales)));
  CHECK(got > 0.0);
}

TEST_CASE("larger scale families only increase the value") {
  Grid g = Grid::unit(2, 16);
  std::mt19937_64 rng(31);
  Params pr = make_params(1, 1.0, 0.25, 0.0);
  ScaleFamily small(std::vector<double>{0.125, 0.25});
  ScaleFamily big(std::vector<double>{0.0625, 0.125, 0.25, 0.5});
  for (int trial = 0; trial < 20; ++trial) {
    Field f = gen::integrand(g, 100 + trial, true);
    MaximalEvaluator ev(f);
    for (int c = 0; c < 5; ++c) {
      std::vector<Index> cell = {static_cast<Index>(rng() % 16),
                                 static_cast<Index>(rng() % 16)};
      CHECK(ev.centered(cell, TimeDirection::forward, pr, small) <=
            ev.centered(cell, TimeDirection::forward, pr, big) + 1e-15);
    }
  }
}

TEST_CASE("uncentered dominates centered and matches exhaustive search") {
  Grid g = Grid::unit(2, 8);
  Params pr = make_params(1, 1.0, 0.0, 0.0);
  ScaleFamily scales(std::vector<double>{0.25, 0.5});
  for (int trial = 0; trial < 10; ++trial) {
    Field f = gen::integrand(g, 200 + trial);
    MaximalEvaluator ev(f);
    for (Index ix = 0; ix < 8; ++ix)
      for (Index it = 0; it < 8; ++it) {
        std::vector<Index> cell = {ix, it};
        double unc = ev.uncentered(cell, TimeDirection::forward, pr, scales);
        double cen = ev.centered(cell, TimeDirection::forward, pr, scales);
        CHECK(unc >= cen - 1e-15);
        CHECK(unc == doctest::Approx(oracle_uncentered(
                         f, cell, TimeDirection::forward, pr, scales)));
      }
  }
}

TEST_CASE("maximal_field agrees with pointwise evaluation") {
  Grid g = Grid::unit(2, 16);
  Field zero = Field::constant(g, 0.0);
  Params pr = make_params(1, 1.0, 0.5, 0.25);
  ScaleFamily scales(std::vector<double>{0.125, 0.25});

  Field mz = maximal_field(zero, TimeDirection::forward, true, pr, scales);
  CHECK((mz.values == 0.0).all());

  Field f = gen::integrand(g, 300);
  MaximalEvaluator ev(f);
  for (bool centered : {true, false}) {
    Field m = maximal_field(f, TimeDirection::backward, centered, pr, scales);
    for (Index ix = 0; ix < 16; ix += 3)
      for (Index it = 0; it < 16; it += 3) {
        std::vector<Index> cell = {ix, it};
        double expect =
            centered
                ? ev.centered(cell, TimeDirection::backward, pr, scales)
                : ev.uncentered(cell, TimeDirection::backward, pr, scales);
        CHECK(m.values[g.flat_index(cell)] == doctest::Approx(expect));
      }
  }
}

TEST_CASE("centered field matches the per-point oracle everywhere") {
  Grid g = Grid::unit(2, 16);
  Field f = gen::integrand(g, 301);
  Params pr = make_params(1, 2.0, 0.5, 0.25);
  ScaleFamily scales(std::vector<double>{0.125, 0.25, 0.5});
  Field m = maximal_field(f, TimeDirection::forward, true, pr, scales);
  for (Index ix = 0; ix < 16; ++ix)
    for (Index it = 0; it < 16; ++it) {
      std::vector<Index> cell = {ix, it};
      CHECK(m.values[g.flat_index(cell)] ==
            doctest::Approx(oracle_centered(f, cell, TimeDirection::forward,
                                            pr, scales)));
    }
}

TEST_CASE("sublinearity and homogeneity") {
  Grid g = Grid::unit(2, 12);
  Params pr = make_params(1, 1.0, 0.0, 0.0);
  ScaleFamily scales(std::vector<double>{1.0 / 6, 1.0 / 3});
  Field f = gen::integrand(g, 400);
  Field h = gen::integrand(g, 401);
  Field sum(g, f.values + h.values);
  for (bool centered : {true, false}) {
    Field mf = maximal_field(f, TimeDirection::forward, centered, pr, scales);
    Field mh = maximal_field(h, TimeDirection::forward, centered, pr, scales);
    Field ms = maximal_field(sum, TimeDirection::forward, centered, pr, scales);
    CHECK((ms.values <= mf.values + mh.values + 1e-12).all());

    Field scaled(g, -2.5 * f.values);
    Field msc =
        maximal_field(scaled, TimeDirection::forward, centered, pr, scales);
    CHECK(((msc.values - 2.5 * mf.values).abs() <= 1e-12 * msc.values.abs() + 1e-300).all());
  }
}

TEST_CASE("bounded by the sup for zero lag and order") {
  Grid g = Grid::unit(2, 16);
  Field f = gen::integrand(g, 402, true);
  Params pr = make_params(1, 1.0, 0.0, 0.0);
  ScaleFamily scales(std::vector<double>{0.125, 0.25, 0.5});
  double sup = f.values.abs().maxCoeff();
  for (bool centered : {true, false}) {
    Field m = maximal_field(f, TimeDirection::forward, centered, pr, scales);
    CHECK(m.values.maxCoeff() <= sup * (1.0 + 1e-12));
  }
}

TEST_CASE("backward equals forward on the time-reflected field") {
  Grid g = Grid::unit(2, 8);
  Field f = gen::integrand(g, 403);
  Field rf = f.time_reflected();
  // Lags and scales chosen so no rectangle edge lands on a cell center.
  // On edge-hitting configurations (e.g. gamma = 0 with cell-anchored
  // rectangles) the half-open snap keeps the lower face, and reflection
  // swaps which face that is, so equality there only holds up to the
  // zero-measure edge set.
  ScaleFamily scales(std::vector<double>{0.29, 0.41});
  for (double gamma : {0.3, 0.7}) {
    Params pr = make_params(1, 1.0, gamma, 0.0);
    for (bool centered : {true, false}) {
      Field mb =
          maximal_field(f, TimeDirection::backward, centered, pr, scales);
      Field mf =
          maximal_field(rf, TimeDirection::forward, centered, pr, scales);
      // Cell (ix, it) reflects to (ix, extent-1-it).
      for (Index ix = 0; ix < 8; ++ix)
        for (Index it = 0; it < 8; ++it)
          CHECK(mb.values[ix * 8 + it] ==
                doctest::Approx(mf.values[ix * 8 + (7 - it)]).epsilon(1e-14));
    }
  }
}

TEST_CASE("fractional factor rescales the single-scale value exactly") {
  Grid g = Grid::unit(2, 16);
  Field f = gen::integrand(g, 404);
  const double L = 0.25, gamma = 0.5, alpha = 0.25;
  ScaleFamily one(std::vector<double>{L});
  Params pr0 = make_params(1, 1.0, gamma, 0.0);
  Params pra = make_params(1, 1.0, gamma, alpha);
  Field m0 = maximal_field(f, TimeDirection::forward, true, pr0, one);
  Field ma = maximal_field(f, TimeDirection::forward, true, pra, one);
  const double factor = std::pow((1.0 - gamma) * std::pow(L, 2.0), alpha);
  for (Index i = 0; i < g.total_cells(); ++i)
    CHECK(ma.values[i] == doctest::Approx(factor * m0.values[i]));
}

TEST_CASE("empty scale family is a parameter error") {
  CHECK_THROWS_AS(ScaleFamily(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ScaleFamily(std::vector<double>{0.1, 0.2}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("scale floor keeps only large scales") {
  ScaleFamily s(std::vector<double>{0.1, 0.2, 0.4}, 0.15);
  CHECK(s.size() == 2);
  CHECK(s.scales.front() == doctest::Approx(0.2));
  ScaleFamily ladder = ScaleFamily::geometric(0.0625, 0.5, 2);
  CHECK(ladder.scales.front() == doctest::Approx(0.0625));
  CHECK(ladder.largest() == doctest::Approx(0.5));
  CHECK(ScaleFamily(std::vector<double>{0.1}).subset_of(ladder) == false);
  CHECK(ScaleFamily(std::vector<double>{0.0625, 0.25}).subset_of(ladder));
}

TEST_CASE("pair-family maximal covers explicit footprints") {
  Grid g = Grid::unit(2, 8);
  Field f = gen::weight(g, 55);
  // One pair: lower = left half, upper = right half of the time axis.
  Vec llo(2), lhi(2), ulo(2), uhi(2);
  llo << 0.0, 0.0;
  lhi << 1.0, 0.5;
  ulo << 0.0, 0.5;
  uhi << 1.0, 1.0;
  std::vector<BoxPair> pairs{{Box(llo, lhi), Box(ulo, uhi)}};
  Field m = pair_family_maximal(f, pairs, 0.0);
  PrefixAggregate agg(f);
  double expect = agg.box_sum(pairs[0].upper) / pairs[0].upper.volume();
  for (Index ix = 0; ix < 8; ++ix)
    for (Index it = 0; it < 8; ++it) {
      double want = (it < 4) ? expect : 0.0;
      CHECK(m.values[ix * 8 + it] == doctest::Approx(want));
    }
}
