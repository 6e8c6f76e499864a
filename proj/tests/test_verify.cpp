#include <doctest.h>

#include "parweight/random_fields.hpp"
#include "parweight/trials.hpp"
#include "parweight/verify.hpp"

using namespace parweight;

TEST_CASE("level-set decomposition") {
  Grid g = Grid::unit(2, 32);
  DyadicLattice lat = build_lattice(g.domain_box(), 0, 3, 1.0, 1);

  SUBCASE("zero field decomposes to nothing") {
    Field f = Field::constant(g, 0.0);
    CZDecomposition dec = cz_decompose_all(f, lat, 0.0);
    CHECK(dec.pieces.empty());
  }

  SUBCASE("exactness, disjointness and averages on random fields") {
    for (int seed = 0; seed < 8; ++seed) {
      Field f = gen::integrand(g, 900 + seed, seed % 2 == 1);
      for (double alpha : {0.0, 0.25}) {
        CZDecomposition dec = cz_decompose_all(f, lat, alpha);
        REQUIRE(!dec.pieces.empty());
        for (const CZPiece& piece : dec.pieces)
          CHECK(cz_exactness_report(dec.md, piece).pass);
        // Trimmed sets are pairwise disjoint across the decomposition.
        std::vector<int> hits(g.total_cells(), 0);
        for (const CZPiece& piece : dec.pieces)
          for (const CellMask& F : piece.trimmed)
            for (size_t i = 0; i < F.bits.size(); ++i)
              if (F.bits[i]) ++hits[i];
        for (int h : hits) CHECK(h <= 1);
      }
    }
  }

  SUBCASE("indicator of a companion and threshold nesting") {
    DyadicRect fine = lat.make_rect(3, {2}, 2);
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(g.total_cells());
    for_each_cell(g, snap_box(g, fine.s_plus),
                  [&](Index flat, const std::vector<Index>&) {
                    v[flat] = 1.0;
                  });
    Field f(g, v);
    CZDecomposition dec = cz_decompose_all(f, lat, 0.0);
    REQUIRE(!dec.pieces.empty());
    for (const CZPiece& piece : dec.pieces) {
      CHECK(cz_exactness_report(dec.md, piece).pass);
    }
    // Level sets shrink: every rectangle at the next threshold nests in
    // one at the previous.
    for (size_t pi = 1; pi < dec.pieces.size(); ++pi) {
      if (dec.pieces[pi].threshold_exp !=
          dec.pieces[pi - 1].threshold_exp + 1)
        continue;
      for (const DyadicRect& fine_rect : dec.pieces[pi].rects) {
        bool nested = false;
        for (const DyadicRect& coarse_rect : dec.pieces[pi - 1].rects)
          if (coarse_rect.s_minus.contains_box(fine_rect.s_minus))
            nested = true;
        CHECK(nested);
      }
    }
  }
}

TEST_CASE("linearized operator") {
  Grid g = Grid::unit(2, 16);
  DyadicLattice lat = build_lattice(g.domain_box(), 0, 3, 1.0, 1);
  Field f = gen::integrand(g, 910);
  WeightPair pair{gen::weight(g, 911), gen::weight(g, 912)};
  const double q = 2.0, r = 2.0;
  Field sigma = pair.v.pow(1.0 - q / (q - 1.0), "sigma");

  SUBCASE("constant g: T is the sigma-mass ratio, at most one") {
    // T(1)(i,a) = sigma(S^+)/sigma(R^+) <= 1 since S^+ lies in R^+.
    CZDecomposition dec = cz_decompose_all(f, lat, 0.0);
    Field ones = Field::constant(g, 1.0);
    LinearizedT lt = linearized_T(ones, dec, lat, sigma, pair.w, r, 0.0);
    PrefixAggregate sig(sigma);
    REQUIRE(!lt.entries.empty());
    for (const auto& e : lt.entries) {
      const DyadicRect& rect = dec.pieces[e.piece].rects[e.i];
      CHECK(e.T ==
            doctest::Approx(sig.box_sum(rect.s_plus) / e.sigma_rplus));
      CHECK(e.T <= 1.0 + 1e-12);
    }
  }

  SUBCASE("single-entry value by direct quotient and Linf bound") {
    CZDecomposition dec = cz_decompose_all(f, lat, 0.0);
    Field gt(g, f.values / sigma.values, "g");
    LinearizedT lt = linearized_T(gt, dec, lat, sigma, pair.w, r, 0.0);
    REQUIRE(!lt.entries.empty());
    PrefixAggregate absf(f.abs());
    const auto& e = lt.entries.front();
    const DyadicRect& rect = dec.pieces[e.piece].rects[e.i];
    // |g| sigma = |f|, so T is a direct two-box-sum quotient.
    CHECK(e.T == doctest::Approx(absf.box_sum(rect.s_plus) / e.sigma_rplus));
    // mu = (|R+|^{alpha-1} sigma(R+))^r w(F).
    PrefixAggregate wagg(pair.w);
    double tvol = rect.r_plus.volume();
    double expect_mu =
        std::pow(e.sigma_rplus / tvol, r) *
        wagg.masked_sum(dec.pieces[e.piece].trimmed[e.i]);
    CHECK(e.mu == doctest::Approx(expect_mu).epsilon(1e-12));
    // Linf endpoint.
    double ginf = 0.0;
    for (Index i = 0; i < g.total_cells(); ++i)
      ginf = std::max(ginf, std::abs(gt.values[i]));
    for (const auto& entry : lt.entries) CHECK(entry.T <= ginf * (1 + 1e-12));
  }
}

TEST_CASE("weak-type verifier") {
  TrialSetup ts;
  ts.cells = 16;
  ts.trials = 3;
  ts.seed = 900;

  SUBCASE("paper constants") {
    Params pr;
    pr.n = 1;
    pr.p = 1.0;
    pr.alpha = 0.0;
    pr.gamma = 0.0;
    pr.q = 2.0;
    pr.r = 2.0;
    // 2^{r+1} C2^{r/q} with C2 = 2^{9+3+13+1}.
    CHECK(weak_type_paper_constant(pr) == doctest::Approx(std::exp2(29.0)));
    pr.q = 1.0;
    pr.r = 1.0;
    CHECK(weak_type_paper_constant(pr) == doctest::Approx(std::exp2(28.0)));
    pr.gamma = 0.5;
    CHECK(weak_type_paper_constant(pr) == doctest::Approx(std::exp2(29.0)));
  }

  SUBCASE("zero integrand passes trivially") {
    Grid g = Grid::unit(2, 16);
    Params pr;
    pr.n = 1;
    pr.p = 1.0;
    pr.q = 2.0;
    pr.r = 2.0;
    WeightPair pair{gen::weight(g, 1), gen::weight(g, 2)};
    ScaleFamily scales = default_scales(g);
    VerificationReport rep =
        verify_weak_type(Field::constant(g, 0.0), pair, pr, scales);
    CHECK(rep.pass);
    CHECK(rep.lhs == 0.0);
  }

  SUBCASE("exponent relation is enforced") {
    Grid g = Grid::unit(2, 16);
    Params pr;
    pr.n = 1;
    pr.p = 1.0;
    pr.q = 2.0;
    pr.r = 4.0;
    pr.alpha = 0.0;  // inconsistent: 1/2 - 1/4 != 0
    WeightPair pair{gen::weight(g, 1), gen::weight(g, 2)};
    CHECK_THROWS_AS(
        verify_weak_type(Field::constant(g, 1.0), pair, pr, default_scales(g)),
        std::invalid_argument);
  }

  SUBCASE("seeded trials pass for all exponent triples") {
    for (auto [q, r, alpha] :
         {std::tuple{2.0, 2.0, 0.0}, {1.0, 1.0, 0.0}, {2.0, 4.0, 0.25}}) {
      for (double gamma : {0.0, 0.5}) {
        for (const auto& rep : weak_type_trials(ts, q, r, alpha, gamma)) {
          CHECK(rep.pass);
          CHECK(!rep.skipped);
        }
      }
    }
  }
}

TEST_CASE("Fefferman-Stein verifier") {
  TrialSetup ts;
  ts.cells = 16;
  ts.trials = 3;
  ts.seed = 901;
  SUBCASE("strong multiplier at q = 2 is 16 C1") {
    Grid g = Grid::unit(2, 16);
    Field f = gen::integrand(g, 5);
    Field w = gen::weight(g, 6);
    FSReports fs =
        verify_fefferman_stein(f, w, 2.0, 0.0, 1.0, default_scales(g));
    CHECK(fs.strong.paper_constant == doctest::Approx(16.0 * fs.C1));
    CHECK(fs.weak.pass);
    CHECK(fs.strong.pass);
  }
  SUBCASE("constant weight reduces to the unweighted bound") {
    Grid g = Grid::unit(2, 16);
    Field f = gen::integrand(g, 7);
    Field w = Field::constant(g, 1.0, "w");
    ScaleFamily scales = default_scales(g);
    FSReports fs = verify_fefferman_stein(f, w, 2.0, 0.0, 1.0, scales);
    CHECK(fs.weak.pass);
    CHECK(fs.strong.pass);
    // The majorant of a unit weight stays at most one.
    Params pr;
    pr.n = 1;
    pr.p = 1.0;
    Field mw =
        maximal_field(w, TimeDirection::backward, false, pr, scales,
                      DomainPolicy::inside_only);
    CHECK(mw.values.maxCoeff() <= 1.0 + 1e-12);
  }
  SUBCASE("seeded trials") {
    for (double gamma : {0.0, 0.5})
      for (const auto& rep : fefferman_stein_trials(ts, 2.0, gamma))
        CHECK(rep.pass);
  }
}

TEST_CASE("bump verifier") {
  TrialSetup ts;
  ts.cells = 16;
  ts.trials = 5;
  ts.seed = 902;
  SUBCASE("identity at q=3, s=2") {
    for (const auto& rep : bump_identity_trials(ts, 3.0, 2.0, 0.0)) {
      CHECK(rep.pass);
      CHECK(rep.lhs <= 1e-9);
    }
  }
  SUBCASE("strong bound with the interpolated multiplier") {
    Grid g = Grid::unit(2, 16);
    Field f = gen::integrand(g, 8);
    WeightPair pair{gen::weight(g, 9), gen::weight(g, 10)};
    VerificationReport rep =
        verify_strong_bump(f, pair, 3.0, 2.0, 0.0, 1.0, default_scales(g));
    CHECK(rep.pass);
    // t = 2, multiplier (3/2) * 2 * 8 * C_weak(t).
    Params prt;
    prt.n = 1;
    prt.p = 1.0;
    prt.q = 2.0;
    prt.r = 2.0;
    CHECK(rep.paper_constant ==
          doctest::Approx(24.0 * weak_type_paper_constant(prt)));
    for (const auto& r2 : strong_bump_trials(ts, 3.0, 2.0, 0.5))
      CHECK(r2.pass);
  }
  SUBCASE("unit weights reduce to the unweighted strong bound") {
    Grid g = Grid::unit(2, 16);
    Field f = gen::integrand(g, 11);
    WeightPair ones{Field::constant(g, 1.0, "w"), Field::constant(g, 1.0, "v")};
    ScaleFamily scales = default_scales(g);
    RectFamily fam = RectFamily::forward_anchored(g, scales, 1.0, 0.0);
    CHECK(bump_constant(ones, 3.0, 2.0, 0.0, fam).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(verify_strong_bump(f, ones, 3.0, 2.0, 0.0, 1.0, scales).pass);
  }
}

TEST_CASE("testing-condition verifier") {
  TrialSetup ts;
  ts.cells = 16;
  ts.trials = 4;
  ts.seed = 903;
  SUBCASE("zero integrand passes") {
    Grid g = Grid::unit(2, 16);
    DyadicLattice lat = build_lattice(g.domain_box(), 0, 3, 1.0, 1);
    WeightPair pair{gen::weight(g, 12), gen::weight(g, 13)};
    SawyerReports rep =
        verify_sawyer(Field::constant(g, 0.0), pair, 2.0, 2.0, 0.0, lat);
    CHECK(rep.intermediate.pass);
    CHECK(rep.t_linf.pass);
    CHECK(rep.t_weak.pass);
    CHECK(rep.strong.pass);
  }
  SUBCASE("seeded trials: 8^r step, endpoints, strong ratio") {
    for (const auto& rep : sawyer_trials(ts, 2.0, 2.0, 0.0)) CHECK(rep.pass);
  }
  SUBCASE("exponent guards") {
    Grid g = Grid::unit(2, 16);
    DyadicLattice lat = build_lattice(g.domain_box(), 0, 2, 1.0, 1);
    WeightPair pair{gen::weight(g, 14), gen::weight(g, 15)};
    Field f = gen::integrand(g, 16);
    CHECK_THROWS_AS(verify_sawyer(f, pair, 1.0, 2.0, 0.0, lat),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_sawyer(f, pair, 2.0, 1.5, 0.0, lat),
                    std::invalid_argument);
  }
}

TEST_CASE("ladder supremum is within 2^r of the full supremum") {
  // For any lambda pick the ladder point just below: the distribution
  // function is monotone, so lambda^r w({M > lambda}) is at most
  // 2^r lambda_j^r w({M > lambda_j}).
  Grid g = Grid::unit(2, 16);
  Field f = gen::integrand(g, 950);
  WeightPair pair{gen::weight(g, 951), gen::weight(g, 952)};
  Params pr;
  pr.n = 1;
  pr.p = 1.0;
  pr.q = 2.0;
  pr.r = 2.0;
  ScaleFamily scales = default_scales(g);
  Field m = maximal_field(f, TimeDirection::forward, true, pr, scales,
                          DomainPolicy::inside_only);
  const double cv = g.cell_volume();
  Eigen::ArrayXd wr = pair.w.values.pow(pr.r);
  auto level_mass = [&](double lambda) {
    double s = 0.0;
    for (Index i = 0; i < g.total_cells(); ++i)
      if (m.values[i] > lambda) s += wr[i] * cv;
    return s;
  };
  const double maxm = m.values.maxCoeff();
  REQUIRE(maxm > 0.0);
  double ladder_sup = 0.0;
  for (double lambda = std::exp2(std::floor(std::log2(maxm)) - 20.0);
       lambda < maxm; lambda *= 2.0)
    ladder_sup = std::max(ladder_sup,
                          std::pow(lambda, pr.r) * level_mass(lambda));
  // Dense sweep of thresholds between ladder points.
  double full_sup = 0.0;
  for (double lambda = maxm * 1e-6; lambda < maxm; lambda *= 1.07)
    full_sup = std::max(full_sup, std::pow(lambda, pr.r) * level_mass(lambda));
  CHECK(full_sup <= std::exp2(pr.r) * ladder_sup * (1.0 + 1e-12));
}

TEST_CASE("mu bookkeeping: disjoint trimmed masses") {
  Grid g = Grid::unit(2, 16);
  DyadicLattice lat = build_lattice(g.domain_box(), 0, 3, 1.0, 1);
  Field f = gen::integrand(g, 960);
  WeightPair pair{gen::weight(g, 961), gen::weight(g, 962)};
  Field sigma = pair.v.pow(-1.0, "sigma");  // q = 2
  CZDecomposition dec = cz_decompose_all(f, lat, 0.0);
  LinearizedT lt = linearized_T(
      Field(g, f.values / sigma.values, "g"), dec, lat, sigma, pair.w, 2.0,
      0.0);
  // Sum of the trimmed w-masses never exceeds the total w-mass.
  PrefixAggregate wagg(pair.w);
  double total = 0.0;
  for (const CZPiece& piece : dec.pieces)
    for (const CellMask& F : piece.trimmed) total += wagg.masked_sum(F);
  CHECK(total <= pair.w.values.sum() * g.cell_volume() * (1.0 + 1e-12));
  // Partial sums of mu add up (associative fold).
  double all = 0.0, head = 0.0, tail = 0.0;
  for (size_t i = 0; i < lt.entries.size(); ++i) {
    all += lt.entries[i].mu;
    (i < lt.entries.size() / 2 ? head : tail) += lt.entries[i].mu;
  }
  CHECK(all == doctest::Approx(head + tail).epsilon(1e-12));
}

TEST_CASE("uncentered weak ratio is measured, never asserted") {
  Grid g = Grid::unit(2, 16);
  Field f = gen::integrand(g, 970);
  WeightPair pair{gen::weight(g, 971), gen::weight(g, 972)};
  Params pr;
  pr.n = 1;
  pr.p = 1.0;
  pr.q = 2.0;
  pr.r = 2.0;
  VerificationReport rep =
      measure_uncentered_weak(f, pair, pr, default_scales(g));
  CHECK(rep.pass);  // by construction
  CHECK(rep.lhs > 0.0);
  CHECK(rep.theorem == "weak_type_uncentered");
}
