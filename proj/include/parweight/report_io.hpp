#pragma once

#include <iosfwd>
#include <string>

#include "parweight/covering.hpp"
#include "parweight/dyadic.hpp"
#include "parweight/reports.hpp"

namespace parweight {

/// One JSON object (single line, sorted keys, deterministic doubles).
std::string to_json_line(const VerificationReport& rep);
std::string to_json(const ConstantReport& rep);

/// Flat CSV row: theorem, seed, lhs, rhs, constant, ratio, pass.
std::string csv_header();
std::string to_csv_row(const VerificationReport& rep);

/// Ordered selection log: {index, sidelength, point, kept|discarded(by)}.
std::string selection_log_json(const GreedySelection& sel);

/// One line per rectangle: k ix... it  s_minus_lo... s_minus_hi...
/// (tab-separated reals).
void dump_lattice(std::ostream& out, const DyadicLattice& lattice);

}  // namespace parweight
