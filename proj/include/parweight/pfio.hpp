#pragma once

#include <iosfwd>
#include <string>

#include "parweight/field.hpp"

namespace parweight {

/// "parfield v1" text format:
///   parfield v1
///   <d> dims: e_0 ... e_{d-1}
///   origin: o_0 ... o_{d-1}
///   spacing: h_0 ... h_{d-1}
/// followed by one value per line, row-major, last axis (time) fastest.
Field read_parfield(std::istream& in, std::string name = "f");
Field read_parfield_file(const std::string& path, std::string name = "f");
void write_parfield(std::ostream& out, const Field& f);
void write_parfield_file(const std::string& path, const Field& f);

}  // namespace parweight
