#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace parweight {

/// Global exponent tuple governing the parabolic geometry and the
/// weighted inequalities.
///
///   n      spatial dimension (>= 1)
///   p      parabolic scaling exponent, 1 <= p < inf
///   gamma  time lag in [0, 1)
///   alpha  fractional order in [0, 1)
///   q, r   Lebesgue exponents, 1 <= q <= r
///   s      bump exponent (> 1 where used)
struct Params {
  int n = 1;
  double p = 1.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double q = 2.0;
  double r = 2.0;
  double s = 2.0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("Params: n must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p))
      throw std::invalid_argument("Params: require 1 <= p < inf");
    if (!(gamma >= 0.0 && gamma < 1.0))
      throw std::invalid_argument("Params: require 0 <= gamma < 1");
    if (!(alpha >= 0.0 && alpha < 1.0))
      throw std::invalid_argument("Params: require 0 <= alpha < 1");
    if (!(q >= 1.0)) throw std::invalid_argument("Params: require q >= 1");
    if (!(r >= q)) throw std::invalid_argument("Params: require r >= q");
  }

  /// Conjugate exponent q' = q/(q-1); only meaningful for q > 1.
  double q_conj() const {
    if (!(q > 1.0)) throw std::invalid_argument("q' undefined for q = 1");
    return q / (q - 1.0);
  }

  /// Checks the weak-type exponent relation 1/q - 1/r = alpha.
  bool weak_type_consistent(double tol = 1e-12) const {
    return std::abs(1.0 / q - 1.0 / r - alpha) <= tol;
  }
};

/// r determined by 1/q - 1/r = alpha, i.e. r = q / (1 - alpha q).
inline double weak_type_r(double q, double alpha) {
  double denom = 1.0 - alpha * q;
  if (!(denom > 0.0))
    throw std::invalid_argument("weak_type_r: need alpha < 1/q");
  return q / denom;
}

/// Intermediate exponent t of the bump condition, t - 1 = (q-1)/s.
inline double bump_t(double q, double s) {
  if (!(q > 1.0) || !(s > 1.0))
    throw std::invalid_argument("bump_t: need q > 1 and s > 1");
  return 1.0 + (q - 1.0) / s;
}

}  // namespace parweight
