#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace parweight {

/// Finite family of spatial sidelengths over which the suprema of the
/// maximal operators run, optionally floored at xi (only scales >= xi are
/// kept, the restricted-operator semantics).
struct ScaleFamily {
  std::vector<double> scales;  // strictly increasing, positive

  ScaleFamily() = default;
  explicit ScaleFamily(std::vector<double> s, double xi = 0.0) {
    for (double L : s)
      if (L >= xi && L > 0.0) scales.push_back(L);
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
    if (scales.empty())
      throw std::invalid_argument("ScaleFamily: no admissible scales");
  }

  /// Geometric ladder L_j = L_min * 2^{j/per_octave} up to L_max.
  static ScaleFamily geometric(double L_min, double L_max, int per_octave = 2,
                               double xi = 0.0) {
    if (!(L_min > 0.0) || !(L_max >= L_min))
      throw std::invalid_argument("ScaleFamily: bad ladder bounds");
    std::vector<double> s;
    const double step = std::pow(2.0, 1.0 / per_octave);
    for (double L = L_min; L <= L_max * (1.0 + 1e-12); L *= step)
      s.push_back(std::min(L, L_max));
    return ScaleFamily(std::move(s), xi);
  }

  size_t size() const { return scales.size(); }
  double largest() const { return scales.back(); }
  bool subset_of(const ScaleFamily& other, double tol = 1e-12) const {
    for (double L : scales) {
      bool found = false;
      for (double M : other.scales)
        if (std::abs(L - M) <= tol * std::max(L, M)) { found = true; break; }
      if (!found) return false;
    }
    return true;
  }
};

}  // namespace parweight
