#include "parweight/pfio.hpp"

#include <fstream>
#include <sstream>

namespace parweight {

namespace {

std::runtime_error bad(const std::string& what) {
  return std::runtime_error("parfield: " + what);
}

}  // namespace

Field read_parfield(std::istream& in, std::string name) {
  std::string line;
  if (!std::getline(in, line) || line != "parfield v1")
    throw bad("missing 'parfield v1' header");

  if (!std::getline(in, line)) throw bad("missing dims line");
  std::istringstream dims(line);
  int d = 0;
  std::string word;
  if (!(dims >> d >> word) || word != "dims:" || d < 1)
    throw bad("malformed dims line");
  std::vector<Index> extents(d);
  for (int a = 0; a < d; ++a)
    if (!(dims >> extents[a]) || extents[a] <= 0)
      throw bad("malformed extent");

  if (!std::getline(in, line)) throw bad("missing origin line");
  std::istringstream ol(line);
  if (!(ol >> word) || word != "origin:") throw bad("malformed origin line");
  Vec origin(d);
  for (int a = 0; a < d; ++a)
    if (!(ol >> origin[a])) throw bad("malformed origin value");

  if (!std::getline(in, line)) throw bad("missing spacing line");
  std::istringstream sl(line);
  if (!(sl >> word) || word != "spacing:") throw bad("malformed spacing line");
  Vec spacing(d);
  for (int a = 0; a < d; ++a)
    if (!(sl >> spacing[a]) || !(spacing[a] > 0.0))
      throw bad("malformed spacing value");

  Grid g(std::move(origin), std::move(spacing), std::move(extents));
  Eigen::ArrayXd values(g.total_cells());
  for (Index i = 0; i < g.total_cells(); ++i) {
    if (!std::getline(in, line)) throw bad("fewer values than cells");
    values[i] = std::stod(line);
  }
  return Field(std::move(g), std::move(values), std::move(name));
}

Field read_parfield_file(const std::string& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw bad("cannot open " + path);
  return read_parfield(in, std::move(name));
}

void write_parfield(std::ostream& out, const Field& f) {
  const Grid& g = f.grid;
  const int d = g.dim();
  out << "parfield v1\n" << d << " dims:";
  for (int a = 0; a < d; ++a) out << ' ' << g.extents[a];
  out << "\norigin:";
  char buf[64];
  for (int a = 0; a < d; ++a) {
    std::snprintf(buf, sizeof buf, " %.17g", g.origin[a]);
    out << buf;
  }
  out << "\nspacing:";
  for (int a = 0; a < d; ++a) {
    std::snprintf(buf, sizeof buf, " %.17g", g.spacing[a]);
    out << buf;
  }
  out << '\n';
  for (Index i = 0; i < g.total_cells(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", f.values[i]);
    out << buf;
  }
}

void write_parfield_file(const std::string& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw bad("cannot open " + path + " for writing");
  write_parfield(out, f);
}

}  // namespace parweight
