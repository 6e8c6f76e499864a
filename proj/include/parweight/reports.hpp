#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parweight/geometry.hpp"

namespace parweight {

inline constexpr double kRelSlack = 1e-9;

/// Weight-constant estimate over a rectangle family, with the rectangle
/// attaining the max.  value is +inf when a dual power hits a zero cell.
struct ConstantReport {
  double value = 0.0;
  std::optional<ParabolicRectangle> witness;
  std::size_t family_size = 0;

  bool finite() const { return std::isfinite(value); }
};

/// One verified inequality: pass iff lhs <= paper_constant * rhs * (1 + slack).
struct VerificationReport {
  std::string theorem;
  double lhs = 0.0;
  double rhs = 0.0;
  double paper_constant = 1.0;
  double ratio = 0.0;  // lhs / rhs
  bool pass = false;
  bool skipped = false;  // e.g. infinite constant
  std::uint64_t seed = 0;
  std::string grid;
  std::string note;
  std::vector<std::pair<std::string, double>> meta;

  static VerificationReport make(std::string theorem, double lhs, double rhs,
                                 double paper_constant,
                                 double slack = kRelSlack) {
    VerificationReport r;
    r.theorem = std::move(theorem);
    r.lhs = lhs;
    r.rhs = rhs;
    r.paper_constant = paper_constant;
    r.ratio = (rhs > 0.0) ? lhs / rhs
                          : (lhs == 0.0 ? 0.0
                                        : std::numeric_limits<double>::infinity());
    r.pass = lhs <= paper_constant * rhs * (1.0 + slack) ||
             (lhs == 0.0 && rhs == 0.0);
    return r;
  }
};

}  // namespace parweight
