#pragma once

#include "parweight/covering.hpp"
#include "parweight/dyadic.hpp"
#include "parweight/weights.hpp"

namespace parweight {

/// Value |S^+|^alpha avg_{S^+} |f| of one lattice cell, normalized by the
/// exact cell volume.  Shared by the dyadic maximal function and the
/// level-set decomposition so both see bit-identical numbers.
double dyadic_cell_value(const PrefixAggregate& abs_agg,
                         const DyadicLattice& lattice, int k,
                         const std::vector<Index>& sx, Index st, double alpha);

/// One level of the dyadic level-set decomposition at threshold 2^a:
/// maximal cells S with value > 2^a; their union of S^- equals the level
/// set of the dyadic maximal function exactly, as cell sets.
struct CZPiece {
  int threshold_exp = 0;  // a
  std::vector<DyadicRect> rects;
  std::vector<double> values;     // dyadic value of each selected cell
  std::vector<CellMask> trimmed;  // F_i = S^- cap {M_d <= 2^{a+1}}
};

CZPiece cz_decompose(const Field& f, const DyadicLattice& lattice,
                     double alpha, int threshold_exp,
                     const Field* precomputed_md = nullptr);

struct CZDecomposition {
  std::vector<CZPiece> pieces;  // every threshold with a nonempty level set
  Field md;                     // the dyadic maximal field
};

CZDecomposition cz_decompose_all(const Field& f, const DyadicLattice& lattice,
                                 double alpha);

/// Exact cell-set equality, disjointness and the per-rectangle average
/// condition for one piece.
VerificationReport cz_exactness_report(const Field& md, const CZPiece& piece);

/// Discrete measure and linearized operator of the testing argument:
///   mu(i,a)  = (|R^+|^alpha sigma_{R^+})^r w(F_{i,a}),
///   T g(i,a) = (1/sigma(R^+)) int_{S^+} |g| sigma.
struct LinearizedT {
  struct Entry {
    int piece = 0;   // index into CZDecomposition::pieces
    int i = 0;       // rectangle index within the piece
    double T = 0.0;  // T g (i,a)
    double mu = 0.0;
    double sigma_rplus = 0.0;  // int_{R^+} sigma
  };
  std::vector<Entry> entries;
  std::size_t skipped = 0;  // indices with sigma(R^+) = 0
};

LinearizedT linearized_T(const Field& g, const CZDecomposition& dec,
                         const DyadicLattice& lattice, const Field& sigma,
                         const Field& w, double r, double alpha);

/// Paper constant of the weak-type bound: 2^{r+1} C2^{r/q} for q > 1 and
/// 2^{r+1} C2^r for q = 1, with C2 the trimmed-overlap constant.
double weak_type_paper_constant(const Params& pr);

/// Weak (q,r) inequality with the explicit proof constants, all weight
/// constants estimated over the operator's own rectangle family.
VerificationReport verify_weak_type(const Field& f, const WeightPair& pair,
                                    const Params& pr,
                                    const ScaleFamily& scales);

/// Measured ratio of the same bound for the uncentered operator.  Whether
/// a weak-type bound holds for it is open, so the report never fails;
/// it only records the ratio.
VerificationReport measure_uncentered_weak(const Field& f,
                                           const WeightPair& pair,
                                           const Params& pr,
                                           const ScaleFamily& scales);

struct FSReports {
  VerificationReport weak;
  VerificationReport strong;
  double C1 = 0.0;  // weak-type constant of the pair (w, M^{gamma-} w)
};

/// Fefferman-Stein forms for the pair (w, M^{gamma-} w).
FSReports verify_fefferman_stein(const Field& f, const Field& w, double q,
                                 double gamma, double p,
                                 const ScaleFamily& scales);

/// Rectangle-wise identity [(w^{1/t}, v^{1/t})]^t_{t,t} = [(w,v)]_{q,q,s}.
VerificationReport verify_bump_identity(const WeightPair& pair, double q,
                                        double s, double gamma,
                                        const RectFamily& family);

/// Strong (q,q) bound under the bump condition, multiplier
/// (q/(q-1)) (s/(s-1)) 2^q C with C the weak-type constant at exponent t.
VerificationReport verify_strong_bump(const Field& f, const WeightPair& pair,
                                      double q, double s, double gamma,
                                      double p, const ScaleFamily& scales);

struct SawyerReports {
  VerificationReport intermediate;  // int (Md f)^r w <= 8^r sum T^r mu
  VerificationReport t_linf;        // sup T <= ||f sigma^{-1}||_{Linf(sigma)}
  VerificationReport t_weak;        // sum_{T>lambda} mu <= [S]^r (...)^{r/q}
  VerificationReport strong;        // interpolation-constant-dependent
  double sawyer_matched = 0.0;      // testing constant over the lattice family
};

/// Testing-condition route for the dyadic maximal function at gamma = 0.
/// The matched testing constant runs over the widened companions of the
/// lattice cells; the strong form uses a configurable interpolation
/// constant (default 2 q'^{1/r}, derived from the two endpoint bounds).
SawyerReports verify_sawyer(const Field& f, const WeightPair& pair, double q,
                            double r, double alpha,
                            const DyadicLattice& lattice,
                            double marcinkiewicz_constant = 0.0);

}  // namespace parweight
