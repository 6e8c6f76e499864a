#pragma once

#include "parweight/parallel.hpp"
#include "parweight/random_fields.hpp"
#include "parweight/verify.hpp"

namespace parweight {

/// Shared setup of a seeded trial batch on the unit grid [0,1]^{n+1}.
struct TrialSetup {
  int n = 1;
  double p = 1.0;
  Index cells = 32;  // per axis
  std::uint64_t seed = 7;
  int trials = 50;
  int jobs = default_jobs();
};

/// Default ladder for the unit grid: 4h up to 1/4, two scales per octave.
ScaleFamily default_scales(const Grid& g);

std::vector<VerificationReport> weak_type_trials(const TrialSetup& ts,
                                                 double q, double r,
                                                 double alpha, double gamma);

std::vector<VerificationReport> fefferman_stein_trials(const TrialSetup& ts,
                                                       double q, double gamma);

std::vector<VerificationReport> bump_identity_trials(const TrialSetup& ts,
                                                     double q, double s,
                                                     double gamma);

std::vector<VerificationReport> strong_bump_trials(const TrialSetup& ts,
                                                   double q, double s,
                                                   double gamma);

std::vector<VerificationReport> sawyer_trials(const TrialSetup& ts, double q,
                                              double r, double alpha);

std::vector<VerificationReport> domination_trials(const TrialSetup& ts,
                                                  double alpha, double r);

std::vector<VerificationReport> closure_trials(const TrialSetup& ts, double q,
                                               double r, double gamma);

/// Covering-selection batch: greedy coverage, antichain, per-bucket
/// overlap, mass retention and trimmed overlap on random inputs.
std::vector<VerificationReport> covering_trials(const TrialSetup& ts,
                                                double gamma, int items);

/// Cover-search batch: seeded random queries against the translated
/// lattice family; every query must be covered with all four bounds.
std::vector<VerificationReport> cover_search_trials(const TrialSetup& ts,
                                                    int queries);

}  // namespace parweight
