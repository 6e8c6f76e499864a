#include "parweight/report_io.hpp"

#include <json.hpp>

#include <ostream>
#include <sstream>

namespace parweight {

using nlohmann::json;

namespace {

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_json_line(const VerificationReport& rep) {
  json j;
  j["theorem"] = rep.theorem;
  j["lhs"] = number_or_null(rep.lhs);
  j["rhs"] = number_or_null(rep.rhs);
  j["paper_constant"] = number_or_null(rep.paper_constant);
  j["ratio"] = number_or_null(rep.ratio);
  j["pass"] = rep.pass;
  if (rep.skipped) j["skipped"] = true;
  j["seed"] = rep.seed;
  if (!rep.grid.empty()) j["grid"] = rep.grid;
  if (!rep.note.empty()) j["note"] = rep.note;
  for (const auto& [k, v] : rep.meta) j["meta"][k] = number_or_null(v);
  return j.dump();
}

std::string to_json(const ConstantReport& rep) {
  json j;
  j["value"] = number_or_null(rep.value);
  j["finite"] = rep.finite();
  j["family_size"] = rep.family_size;
  if (rep.witness) {
    json w;
    w["x"] = std::vector<double>(rep.witness->center_x.data(),
                                 rep.witness->center_x.data() +
                                     rep.witness->center_x.size());
    w["t"] = rep.witness->center_t;
    w["L"] = rep.witness->L;
    j["witness"] = std::move(w);
  }
  return j.dump();
}

std::string csv_header() { return "theorem,seed,lhs,rhs,constant,ratio,pass"; }

std::string to_csv_row(const VerificationReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%.17g,%.17g,%.17g,%d",
                rep.theorem.c_str(),
                static_cast<unsigned long long>(rep.seed), rep.lhs, rep.rhs,
                rep.paper_constant, rep.ratio, rep.pass ? 1 : 0);
  return buf;
}

std::string selection_log_json(const GreedySelection& sel) {
  json arr = json::array();
  for (const SelectionLogEntry& e : sel.log) {
    json j;
    j["index"] = e.index;
    j["sidelength"] = e.sidelength;
    j["point"] =
        std::vector<double>(e.point.data(), e.point.data() + e.point.size());
    j["kept"] = e.kept;
    if (!e.kept) j["discarded_by"] = e.discarded_by;
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

void dump_lattice(std::ostream& out, const DyadicLattice& lattice) {
  char buf[64];
  for (int k = lattice.k_min(); k <= lattice.k_max(); ++k) {
    lattice.enumerate(k, [&](const std::vector<Index>& sx, Index st) {
      Box cell = lattice.cell_box(k, sx, st);
      out << k;
      for (Index v : sx) out << '\t' << v;
      out << '\t' << st;
      for (int a = 0; a < cell.dim(); ++a) {
        std::snprintf(buf, sizeof buf, "\t%.17g", cell.lo[a]);
        out << buf;
      }
      for (int a = 0; a < cell.dim(); ++a) {
        std::snprintf(buf, sizeof buf, "\t%.17g", cell.hi[a]);
        out << buf;
      }
      out << '\n';
    });
  }
}

}  // namespace parweight
