#include <doctest.h>

#include <random>

#include "parweight/prefix.hpp"
#include "parweight/random_fields.hpp"

using namespace parweight;

namespace {

// Brute-force oracle: sum of value * cellvol over cells with center in box.
double brute_box_sum(const Field& f, const Box& box) {
  const Grid& g = f.grid;
  double sum = 0.0;
  CellRange all;
  all.lo.assign(g.dim(), 0);
  all.hi.assign(g.extents.begin(), g.extents.end());
  for_each_cell(g, all, [&](Index flat, const std::vector<Index>& idx) {
    if (box.contains_point(g.cell_center(idx)))
      sum += f.values[flat] * g.cell_volume();
  });
  return sum;
}

Box random_box(std::mt19937_64& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vec a(dim), b(dim);
  for (int i = 0; i < dim; ++i) {
    double x = unif(rng), y = unif(rng);
    a[i] = std::min(x, y);
    b[i] = std::max(x, y);
  }
  return Box(std::move(a), std::move(b));
}

}  // namespace

TEST_CASE("snap_box conventions") {
  Grid g = Grid::unit(2, 8);
  SUBCASE("whole domain snaps to the full range") {
    CellRange r = snap_box(g, g.domain_box());
    CHECK(r.lo[0] == 0);
    CHECK(r.hi[0] == 8);
    CHECK(r.count() == 64);
  }
  SUBCASE("a box holding one cell center snaps to that cell") {
    Vec lo(2), hi(2);
    lo << 0.30, 0.30;
    hi << 0.42, 0.42;  // contains only the center (0.3125+0.0625k) = 0.3125? no: 0.3125, 0.4375 -> 0.3125 and 0.4375 excluded at 0.42
    Box b(lo, hi);
    CellRange r = snap_box(g, b);
    CHECK(r.count() == 1);
    CHECK(r.lo[0] == 2);  // center 0.3125
  }
  SUBCASE("empty intersection is an empty range, not an error") {
    Vec lo(2), hi(2);
    lo << 2.0, 2.0;
    hi << 3.0, 3.0;
    CHECK(snap_box(g, Box(lo, hi)).count() == 0);
  }
  SUBCASE("half-open: a center on the upper face is excluded") {
    Vec lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 0.125, 0.125;  // exactly the first cell; center at 0.0625
    CHECK(snap_box(g, Box(lo, hi)).count() == 1);
    Vec lo2(2), hi2(2);
    lo2 << 0.0625, 0.0625;  // centers on the lower face are included
    hi2 << 0.1875, 0.1875;  // the center on the upper face is not
    CHECK(snap_box(g, Box(lo2, hi2)).count() == 1);
  }
}

TEST_CASE("snapped cells equal the membership scan on random boxes") {
  Grid g = Grid::unit(3, 8);
  std::mt19937_64 rng(21);
  Field f = gen::weight(g, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    Box b = random_box(rng, 3, -0.3, 1.3);
    CellRange r = snap_box(g, b);
    Index count = 0;
    CellRange all;
    all.lo.assign(3, 0);
    all.hi.assign(g.extents.begin(), g.extents.end());
    for_each_cell(g, all, [&](Index, const std::vector<Index>& idx) {
      bool inside = b.contains_point(g.cell_center(idx));
      if (inside) ++count;
      CHECK(inside == r.contains(idx));
    });
    CHECK(count == r.count());
  }
}

TEST_CASE("prefix box sums match the brute-force loop") {
  std::mt19937_64 rng(22);
  for (int dim = 2; dim <= 3; ++dim) {
    Grid g = Grid::unit(dim, dim == 2 ? 32 : 8);
    Field f = gen::weight(g, 99 + dim);
    PrefixAggregate agg(f);
    for (int trial = 0; trial < 500; ++trial) {
      Box b = random_box(rng, dim, -0.2, 1.2);
      double expect = brute_box_sum(f, b);
      CHECK(agg.box_sum(b) == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("box averages") {
  Grid g = Grid::unit(2, 16);
  SUBCASE("constant field averages to the constant") {
    Field f = Field::constant(g, 3.25);
    PrefixAggregate agg(f);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      Box b = random_box(rng, 2, 0.0, 1.0);
      if (snap_box(g, b).count() == 0) continue;
      CHECK(agg.box_average(b) == doctest::Approx(3.25).epsilon(1e-12));
    }
  }
  SUBCASE("single-cell indicator over the whole domain") {
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(g.total_cells());
    v[37] = 1.0;
    Field f(g, v);
    PrefixAggregate agg(f);
    CHECK(agg.box_average(g.domain_box()) ==
          doctest::Approx(1.0 / 256.0).epsilon(1e-12));
  }
  SUBCASE("degenerate box throws") {
    Field f = Field::constant(g, 1.0);
    PrefixAggregate agg(f);
    Vec lo(2), hi(2);
    lo << 5.0, 5.0;
    hi << 6.0, 6.0;
    CHECK_THROWS_AS(agg.box_average(Box(lo, hi)), std::domain_error);
  }
}

TEST_CASE("masked measure equals the direct loop") {
  Grid g = Grid::unit(2, 16);
  Field w = gen::weight(g, 77);
  PrefixAggregate agg(w);
  std::mt19937_64 rng(24);
  std::bernoulli_distribution coin(0.3);

  CellMask empty(g);
  CHECK(weighted_measure(agg, empty) == 0.0);

  CellMask m(g);
  double expect = 0.0;
  for (size_t i = 0; i < m.bits.size(); ++i)
    if (coin(rng)) {
      m.bits[i] = 1;
      expect += w.values[static_cast<Index>(i)] * g.cell_volume();
    }
  CHECK(weighted_measure(agg, m) == doctest::Approx(expect).epsilon(1e-12));

  // w == 1 on m cells gives count * cellvol.
  Field ones = Field::constant(g, 1.0);
  PrefixAggregate agg1(ones);
  CHECK(weighted_measure(agg1, m) ==
        doctest::Approx(static_cast<double>(m.count()) * g.cell_volume()));
}

TEST_CASE("range sums are additive and monotone") {
  Grid g = Grid::unit(2, 16);
  Field f = gen::weight(g, 31);
  PrefixAggregate agg(f);
  // Split the domain along the time axis: halves add up to the whole.
  CellRange left, right, whole;
  whole.lo = {0, 0};
  whole.hi = {16, 16};
  left = whole;
  left.hi[1] = 7;
  right = whole;
  right.lo[1] = 7;
  CHECK(agg.range_sum(left) + agg.range_sum(right) ==
        doctest::Approx(agg.range_sum(whole)).epsilon(1e-12));
  CHECK(agg.range_sum(left) <= agg.range_sum(whole));
}

TEST_CASE("extended counts see through the domain boundary") {
  Grid g = Grid::unit(2, 8);
  Vec lo(2), hi(2);
  lo << -0.25, -0.25;
  hi << 0.25, 0.25;
  Box b(lo, hi);
  // In-grid snap: 2x2 cells; full rectangle: 4x4 cells.
  CHECK(snap_box(g, b).count() == 4);
  CHECK(extended_cell_count(g, b) == 16);
  CHECK(extended_volume(g, b) == doctest::Approx(0.25));
}

TEST_CASE("time reflection maps cells exactly") {
  Grid g = Grid::unit(2, 8);
  Field f = gen::weight(g, 41);
  Field rf = f.time_reflected();
  CHECK(rf.grid.origin[1] == doctest::Approx(-1.0));
  // Value at (ix, it) moves to (ix, 7 - it).
  CHECK(rf.values[0 * 8 + 7] == f.values[0 * 8 + 0]);
  CHECK(rf.values[3 * 8 + 2] == f.values[3 * 8 + 5]);
  // Double reflection restores the field.
  Field back = rf.time_reflected();
  CHECK((back.values == f.values).all());
}

TEST_CASE("parfield validation") {
  CHECK_THROWS(Grid(Vec::Zero(2), Vec::Constant(2, -0.1),
                    std::vector<Index>{4, 4}));
  Grid g = Grid::unit(2, 4);
  CHECK_THROWS(Field(g, Eigen::ArrayXd::Zero(3)));
}
