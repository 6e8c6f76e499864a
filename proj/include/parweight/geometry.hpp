#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace parweight {

using Vec = Eigen::ArrayXd;

/// Axis-aligned box in R^{n+1}.  Axes 0..n-1 are spatial, axis n is time.
/// All membership and snapping logic treats boxes as half-open [lo, hi)
/// on every axis, so shared faces never double-count.
struct Box {
  Vec lo;
  Vec hi;

  Box() = default;
  Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size())
      throw std::invalid_argument("Box: dimension mismatch");
    if ((hi < lo).any()) throw std::invalid_argument("Box: requires lo <= hi");
  }

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const { return (hi - lo).prod(); }

  bool contains_point(const Vec& x) const {
    return (x >= lo).all() && (x < hi).all();
  }
  bool contains_box(const Box& b) const {
    return (b.lo >= lo).all() && (b.hi <= hi).all();
  }
  bool intersects(const Box& b) const {
    return (lo < b.hi).all() && (b.lo < hi).all();
  }
  Box intersection(const Box& b) const {
    Box out;
    out.lo = lo.max(b.lo);
    out.hi = hi.min(b.hi);
    out.hi = out.hi.max(out.lo);  // empty intersections collapse to slabs
    return out;
  }

  /// Reflection across the time slice {t = t0}.
  Box reflect_time(double t0) const {
    Box out = *this;
    const int d = dim() - 1;
    double a = lo[d], b = hi[d];
    out.lo[d] = 2.0 * t0 - b;
    out.hi[d] = 2.0 * t0 - a;
    return out;
  }

  /// Box inflated by margin_x on spatial axes and margin_t in time.
  Box inflated(double margin_x, double margin_t) const {
    Box out = *this;
    const int d = dim() - 1;
    for (int a = 0; a < d; ++a) {
      out.lo[a] -= margin_x;
      out.hi[a] += margin_x;
    }
    out.lo[d] -= margin_t;
    out.hi[d] += margin_t;
    return out;
  }
};

/// Parabolic rectangle Q(x,L) x (t - L^p, t + L^p): the spatial cube of
/// sidelength L centered at x crossed with a time interval of length 2 L^p.
struct ParabolicRectangle {
  Vec center_x;     // length n
  double center_t = 0.0;
  double L = 1.0;   // spatial sidelength, > 0
  double p = 1.0;   // scaling exponent, >= 1

  ParabolicRectangle() = default;
  ParabolicRectangle(Vec x, double t, double sidelength, double p_exp)
      : center_x(std::move(x)), center_t(t), L(sidelength), p(p_exp) {
    if (!(L > 0.0)) throw std::invalid_argument("ParabolicRectangle: L > 0");
    if (!(p >= 1.0)) throw std::invalid_argument("ParabolicRectangle: p >= 1");
  }

  int n() const { return static_cast<int>(center_x.size()); }
  double time_half_length() const { return std::pow(L, p); }
  double l_x() const { return L; }
  double l_t() const { return 2.0 * std::pow(L, p); }

  Box full_box() const {
    const int nn = n();
    Vec lo(nn + 1), hi(nn + 1);
    lo.head(nn) = center_x - L / 2.0;
    hi.head(nn) = center_x + L / 2.0;
    const double hp = time_half_length();
    lo[nn] = center_t - hp;
    hi[nn] = center_t + hp;
    return Box(std::move(lo), std::move(hi));
  }
};

inline void check_time_lag(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("time lag must satisfy 0 <= gamma < 1");
}

/// Upper part R^+(gamma) = Q(x,L) x (t + gamma L^p, t + L^p).
inline Box upper_part(const ParabolicRectangle& R, double gamma) {
  check_time_lag(gamma);
  const int n = R.n();
  Vec lo(n + 1), hi(n + 1);
  lo.head(n) = R.center_x - R.L / 2.0;
  hi.head(n) = R.center_x + R.L / 2.0;
  const double hp = R.time_half_length();
  lo[n] = R.center_t + gamma * hp;
  hi[n] = R.center_t + hp;
  return Box(std::move(lo), std::move(hi));
}

/// Lower part R^-(gamma) = Q(x,L) x (t - L^p, t - gamma L^p), the
/// reflection of R^+(gamma) across the time slice through the center.
inline Box lower_part(const ParabolicRectangle& R, double gamma) {
  check_time_lag(gamma);
  const int n = R.n();
  Vec lo(n + 1), hi(n + 1);
  lo.head(n) = R.center_x - R.L / 2.0;
  hi.head(n) = R.center_x + R.L / 2.0;
  const double hp = R.time_half_length();
  lo[n] = R.center_t - hp;
  hi[n] = R.center_t - gamma * hp;
  return Box(std::move(lo), std::move(hi));
}

/// |R^+(gamma)| = |R^-(gamma)| = (1 - gamma) L^{n+p}, exactly.
inline double lagged_part_volume(const ParabolicRectangle& R, double gamma) {
  check_time_lag(gamma);
  return (1.0 - gamma) * std::pow(R.L, static_cast<double>(R.n())) *
         R.time_half_length();
}

/// Center point of R^-(gamma): (x, t - (1+gamma) L^p / 2).
inline Vec lower_center(const ParabolicRectangle& R, double gamma) {
  check_time_lag(gamma);
  const int n = R.n();
  Vec z(n + 1);
  z.head(n) = R.center_x;
  z[n] = R.center_t - (1.0 + gamma) * R.time_half_length() / 2.0;
  return z;
}

/// Center point of R^+(gamma): (x, t + (1+gamma) L^p / 2).
inline Vec upper_center(const ParabolicRectangle& R, double gamma) {
  check_time_lag(gamma);
  const int n = R.n();
  Vec z(n + 1);
  z.head(n) = R.center_x;
  z[n] = R.center_t + (1.0 + gamma) * R.time_half_length() / 2.0;
  return z;
}

/// lambda-dilate: same center, spatial sidelength scaled to lambda L
/// (the time half-length becomes (lambda L)^p).
inline ParabolicRectangle dilate(const ParabolicRectangle& R, double lam) {
  if (!(lam > 0.0)) throw std::invalid_argument("dilate: lambda > 0 required");
  return ParabolicRectangle(R.center_x, R.center_t, lam * R.L, R.p);
}

/// Rectangle with prescribed lower-part center z = z(R^-(gamma)).
inline ParabolicRectangle rectangle_with_lower_center(const Vec& z, double L,
                                                      double p, double gamma) {
  check_time_lag(gamma);
  const int n = static_cast<int>(z.size()) - 1;
  Vec x = z.head(n);
  double hp = std::pow(L, p);
  return ParabolicRectangle(std::move(x), z[n] + (1.0 + gamma) * hp / 2.0, L, p);
}

/// Rectangle with prescribed upper-part center z = z(R^+(gamma)).
inline ParabolicRectangle rectangle_with_upper_center(const Vec& z, double L,
                                                      double p, double gamma) {
  check_time_lag(gamma);
  const int n = static_cast<int>(z.size()) - 1;
  Vec x = z.head(n);
  double hp = std::pow(L, p);
  return ParabolicRectangle(std::move(x), z[n] - (1.0 + gamma) * hp / 2.0, L, p);
}

}  // namespace parweight
