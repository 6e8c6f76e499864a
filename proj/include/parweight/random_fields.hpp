#pragma once

#include <cstdint>
#include <random>

#include "parweight/field.hpp"

namespace parweight {

/// Seeded generators for trial inputs.  Weights are exponentials of
/// box-smoothed noise (strictly positive by construction) with optional
/// multiplicative spikes; integrands may carry signs.
namespace gen {

inline Eigen::ArrayXd smoothed_noise(const Grid& g, std::mt19937_64& rng,
                                     int smooth_passes = 2) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::ArrayXd v(g.total_cells());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);

  // Per-axis three-point moving average, repeated.
  const int d = g.dim();
  Eigen::ArrayXd tmp(v.size());
  for (int pass = 0; pass < smooth_passes; ++pass) {
    for (int a = 0; a < d; ++a) {
      Index inner = 1;
      for (int b = a + 1; b < d; ++b) inner *= g.extents[b];
      Index outer = g.total_cells() / (inner * g.extents[a]);
      for (Index o = 0; o < outer; ++o)
        for (Index in = 0; in < inner; ++in) {
          auto at = [&](Index i) -> Index {
            return (o * g.extents[a] + i) * inner + in;
          };
          for (Index i = 0; i < g.extents[a]; ++i) {
            double acc = v[at(i)];
            int cnt = 1;
            if (i > 0) { acc += v[at(i - 1)]; ++cnt; }
            if (i + 1 < g.extents[a]) { acc += v[at(i + 1)]; ++cnt; }
            tmp[at(i)] = acc / cnt;
          }
        }
      v.swap(tmp);
    }
  }
  return v;
}

inline Field weight(const Grid& g, std::uint64_t seed, double amplitude = 1.0,
                    int spikes = 0, double spike_factor = 8.0,
                    std::string label = "w") {
  std::mt19937_64 rng(seed);
  Eigen::ArrayXd v = (amplitude * smoothed_noise(g, rng)).exp();
  if (spikes > 0) {
    std::uniform_int_distribution<Index> cell(0, g.total_cells() - 1);
    for (int s = 0; s < spikes; ++s) v[cell(rng)] *= spike_factor;
  }
  return Field(g, std::move(v), std::move(label));
}

inline Field integrand(const Grid& g, std::uint64_t seed,
                       bool signed_values = false, std::string label = "f") {
  std::mt19937_64 rng(seed);
  Eigen::ArrayXd v = (smoothed_noise(g, rng)).exp();
  if (signed_values) {
    std::bernoulli_distribution flip(0.25);
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (flip(rng)) v[i] = -v[i];
  }
  return Field(g, std::move(v), std::move(label));
}

}  // namespace gen
}  // namespace parweight
