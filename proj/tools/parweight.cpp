// parweight: parabolic maximal functions, dyadic parabolic lattices and
// two-weight inequality verification on uniform grids.
//
// Subcommands: maximal, lattice, weights, cover, verify, demo.
// Exit codes: 0 success, 1 usage/contract error, 2 failed verification.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "parweight/parallel.hpp"
#include "parweight/pfio.hpp"
#include "parweight/report_io.hpp"
#include "parweight/trials.hpp"
#include "parweight/verify.hpp"

using namespace parweight;

namespace {

struct CommonOpts {
  int n = 1;
  double p = 1.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double q = 2.0;
  double r = 2.0;
  double s = 2.0;
  Index grid_cells = 32;
  std::uint64_t seed = 7;
  int jobs = default_jobs();
  std::string field_path;
  std::string out_path;
};

void add_param_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--n", o.n, "spatial dimension");
  cmd->add_option("--p", o.p, "parabolic exponent (>= 1)");
  cmd->add_option("--gamma", o.gamma, "time lag in [0,1)");
  cmd->add_option("--alpha", o.alpha, "fractional order in [0,1)");
  cmd->add_option("--q", o.q, "integrand exponent");
  cmd->add_option("--r", o.r, "target exponent");
  cmd->add_option("--s", o.s, "bump exponent");
  cmd->add_option("--grid", o.grid_cells, "cells per axis of the unit grid");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--jobs", o.jobs, "worker threads (env PARWEIGHT_JOBS)");
  cmd->add_option("--out", o.out_path, "output file (default stdout)");
}

Params to_params(const CommonOpts& o) {
  Params pr;
  pr.n = o.n;
  pr.p = o.p;
  pr.gamma = o.gamma;
  pr.alpha = o.alpha;
  pr.q = o.q;
  pr.r = o.r;
  pr.s = o.s;
  pr.validate();
  return pr;
}

Field load_or_generate(const CommonOpts& o, const std::string& role) {
  if (!o.field_path.empty()) return read_parfield_file(o.field_path, role);
  Grid g = Grid::unit(o.n + 1, o.grid_cells);
  if (role == "w" || role == "v")
    return gen::weight(g, o.seed + (role == "w" ? 1 : 2), 0.8, 0, 1.0, role);
  return gen::integrand(g, o.seed);
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  return file;
}

ScaleFamily parse_scales(const std::string& spec, const Grid& g) {
  if (spec.empty() || spec == "auto") return default_scales(g);
  std::vector<double> s;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) s.push_back(std::stod(tok));
  return ScaleFamily(std::move(s));
}

int emit_reports(const std::vector<VerificationReport>& reps,
                 const std::string& out_path, const std::string& csv_path) {
  std::ofstream file;
  std::ostream& out = open_out(file, out_path);
  for (const auto& rep : reps) out << to_json_line(rep) << '\n';
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    csv << csv_header() << '\n';
    for (const auto& rep : reps) csv << to_csv_row(rep) << '\n';
  }
  int failures = 0;
  for (const auto& rep : reps)
    if (!rep.pass && !rep.skipped) ++failures;
  if (failures > 0) {
    std::cerr << failures << " of " << reps.size()
              << " verification assertions failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parabolic maximal functions and two-weight inequalities"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonOpts o;
  std::string scales_spec = "auto";
  std::string csv_path;

  // maximal: evaluate one of the four operators over a grid field.
  auto* cmd_max = app.add_subcommand("maximal", "evaluate a maximal function");
  add_param_flags(cmd_max, o);
  cmd_max->add_option("--field", o.field_path, "input field (.pf)");
  cmd_max->add_option("--scales", scales_spec, "comma list or 'auto'");
  std::string direction = "forward";
  bool uncentered = false;
  cmd_max->add_option("--direction", direction, "forward|backward")
      ->check(CLI::IsMember({"forward", "backward"}));
  cmd_max->add_flag("--uncentered", uncentered, "uncentered variant");
  bool inside_only = false;
  cmd_max->add_flag("--inside-only", inside_only,
                    "restrict to rectangles inside the domain");

  // lattice: build/validate/dump.
  auto* cmd_lat = app.add_subcommand("lattice", "dyadic parabolic lattices");
  add_param_flags(cmd_lat, o);
  int k_min = 0, k_max = 4;
  std::vector<int> shift;
  double toffset = 0.0;
  double dom_lo = 0.0, dom_hi = 1.0;
  std::string action = "validate";
  cmd_lat->add_option("--kmin", k_min, "coarsest level");
  cmd_lat->add_option("--kmax", k_max, "finest level");
  cmd_lat->add_option("--shift", shift, "spatial shift digits in {0,1,2}");
  cmd_lat->add_option("--toffset", toffset, "time root offset");
  cmd_lat->add_option("--domain-lo", dom_lo, "domain lower corner");
  cmd_lat->add_option("--domain-hi", dom_hi, "domain upper corner");
  cmd_lat->add_option("action", action, "build|dump|validate")
      ->check(CLI::IsMember({"build", "dump", "validate"}));

  // weights: constant estimators.
  auto* cmd_wts = app.add_subcommand("weights", "weight-pair constants");
  add_param_flags(cmd_wts, o);
  std::string constant = "aqr";
  std::string w_path, v_path;
  cmd_wts->add_option("--constant", constant, "aqr|a1r|bump|sawyer|gap")
      ->check(CLI::IsMember({"aqr", "a1r", "bump", "sawyer", "gap"}));
  cmd_wts->add_option("--w", w_path, "weight w (.pf)");
  cmd_wts->add_option("--v", v_path, "weight v (.pf)");
  cmd_wts->add_option("--scales", scales_spec, "comma list or 'auto'");

  // cover: greedy selection and overlap statistics.
  auto* cmd_cov = app.add_subcommand("cover", "greedy covering selection");
  add_param_flags(cmd_cov, o);
  int items = 200;
  cmd_cov->add_option("--items", items, "random rectangles to select from");

  // verify: seeded trial batches per theorem.
  auto* cmd_ver = app.add_subcommand("verify", "inequality verification");
  add_param_flags(cmd_ver, o);
  std::string theorem = "weak";
  int trials = 50;
  cmd_ver->add_option("what", theorem, "weak|fs|bump|sawyer|domination")
      ->check(CLI::IsMember({"weak", "fs", "bump", "sawyer", "domination"}));
  cmd_ver->add_option("--trials", trials, "number of seeded trials");
  cmd_ver->add_option("--csv", csv_path, "also emit a flat CSV table");
  bool uncentered_measure = false;
  cmd_ver->add_flag("--uncentered-measure", uncentered_measure,
                    "also record measured (non-asserted) ratios for the "
                    "uncentered operator");

  // demo: one end-to-end seeded run with a CSV for plotting.
  auto* cmd_demo = app.add_subcommand("demo", "seeded end-to-end run");
  add_param_flags(cmd_demo, o);
  cmd_demo->add_option("--csv", csv_path, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
  }

  try {
    if (cmd_max->parsed()) {
      Field f = load_or_generate(o, "f");
      Params pr = to_params(o);
      pr.n = f.grid.dim() - 1;
      ScaleFamily scales = parse_scales(scales_spec, f.grid);
      TimeDirection dir = direction == "forward" ? TimeDirection::forward
                                                 : TimeDirection::backward;
      Field m = maximal_field(f, dir, !uncentered, pr, scales,
                              inside_only ? DomainPolicy::inside_only
                                          : DomainPolicy::zero_extend,
                              o.jobs);
      std::ofstream file;
      write_parfield(open_out(file, o.out_path), m);
      return 0;
    }

    if (cmd_lat->parsed()) {
      Box dom(Vec::Constant(o.n + 1, dom_lo), Vec::Constant(o.n + 1, dom_hi));
      DyadicLattice lat =
          build_lattice(dom, k_min, k_max, o.p, o.n, shift, toffset);
      if (action == "dump") {
        std::ofstream file;
        dump_lattice(open_out(file, o.out_path), lat);
        return 0;
      }
      if (action == "validate") {
        bool side = lat.sidelength_invariant();
        bool nest = widened_nesting_check(lat);
        std::cout << "sidelength_invariant: " << (side ? "pass" : "FAIL")
                  << "\nwidened_nesting: " << (nest ? "pass" : "FAIL")
                  << std::endl;
        return side && nest ? 0 : 2;
      }
      std::cout << "levels: " << lat.levels().size() << ", finest l_t "
                << lat.levels().back().lt << std::endl;
      return 0;
    }

    if (cmd_wts->parsed()) {
      Grid g = Grid::unit(o.n + 1, o.grid_cells);
      Field w = w_path.empty() ? gen::weight(g, o.seed + 1, 0.8, 0, 1.0, "w")
                               : read_parfield_file(w_path, "w");
      Field v = v_path.empty() ? gen::weight(w.grid, o.seed + 2, 0.8, 0, 1.0,
                                             "v")
                               : read_parfield_file(v_path, "v");
      WeightPair pair{std::move(w), std::move(v)};
      ScaleFamily scales = parse_scales(scales_spec, pair.w.grid);
      std::ofstream file;
      std::ostream& out = open_out(file, o.out_path);
      if (constant == "gap") {
        A1GapReport rep =
            a1_pointwise_gap(pair, o.r, o.gamma, o.p, scales);
        out << "{\"pointwise_max\":" << rep.pointwise_max
            << ",\"constant\":" << rep.constant
            << ",\"gap_over_constant\":" << rep.gap_over_constant
            << ",\"constant_over_gap\":" << rep.constant_over_gap << "}\n";
        return 0;
      }
      RectFamily fam = RectFamily::cell_centered(pair.w.grid, scales, o.p);
      ConstantReport rep;
      if (constant == "aqr")
        rep = a_qr_constant(pair, o.q, o.r, o.gamma, fam);
      else if (constant == "a1r")
        rep = a_1r_constant(pair, o.r, o.gamma, fam);
      else if (constant == "bump")
        rep = bump_constant(pair, o.q, o.s, o.gamma, fam);
      else
        rep = sawyer_constant(pair, o.q, o.r, o.alpha, fam, scales, o.p);
      out << to_json(rep) << '\n';
      return 0;
    }

    if (cmd_cov->parsed()) {
      // Seeded random input, greedy selection, overlap stats and the
      // ordered selection log.
      std::mt19937_64 rng(o.seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      SelectionInput input;
      input.gamma = o.gamma;
      const double Lmin = 4.0 / static_cast<double>(o.grid_cells);
      const double Lmax = (o.p > 1.0) ? 0.35 : 0.25;
      for (int m = 0; m < items; ++m) {
        double L = Lmin * std::exp(std::log(Lmax / Lmin) * unif(rng));
        double hp = std::pow(L, o.p);
        double zt_lo = (1.0 - o.gamma) * hp / 2.0;
        double zt_hi = 1.0 - (3.0 + o.gamma) * hp / 2.0;
        if (zt_hi <= zt_lo) continue;
        Vec z(o.n + 1);
        for (int a = 0; a < o.n; ++a) z[a] = L / 2.0 + (1.0 - L) * unif(rng);
        z[o.n] = zt_lo + (zt_hi - zt_lo) * unif(rng);
        SelectionItem item;
        item.point = z;
        item.rect = rectangle_with_lower_center(z, L, o.p, o.gamma);
        input.items.push_back(std::move(item));
      }
      input.validate();
      GreedySelection sel = greedy_select(input);
      Params pr = to_params(o);
      Index worst = 0;
      for (int k : occupied_buckets(input, sel.selected))
        worst = std::max(worst, scale_bucket_overlap(input, sel.selected, k));
      std::ofstream file;
      std::ostream& out = open_out(file, o.out_path);
      out << selection_log_json(sel) << '\n';
      std::cerr << "selected " << sel.selected.size() << " of "
                << input.items.size() << "; max bucket overlap " << worst
                << " (bound " << bucket_overlap_bound(pr) << ")" << std::endl;
      return static_cast<double>(worst) <= bucket_overlap_bound(pr) ? 0 : 2;
    }

    if (cmd_ver->parsed()) {
      TrialSetup ts;
      ts.n = o.n;
      ts.p = o.p;
      ts.cells = o.grid_cells;
      ts.seed = o.seed;
      ts.trials = trials;
      ts.jobs = o.jobs;
      std::vector<VerificationReport> reps;
      if (theorem == "weak") {
        Params pr = to_params(o);
        if (!pr.weak_type_consistent())
          throw std::invalid_argument("verify weak: need 1/q - 1/r = alpha");
        reps = weak_type_trials(ts, o.q, o.r, o.alpha, o.gamma);
        if (uncentered_measure) {
          Grid g = Grid::unit(o.n + 1, o.grid_cells);
          ScaleFamily scales = default_scales(g);
          for (int i = 0; i < trials; ++i) {
            Field f = gen::integrand(g, o.seed + 1000003ull * i + 7919ull);
            WeightPair pair{
                gen::weight(g, o.seed + 1000003ull * i + 2 * 7919ull, 0.8,
                            i % 3, 8.0, "w"),
                gen::weight(g, o.seed + 1000003ull * i + 3 * 7919ull, 0.8, 0,
                            1.0, "v")};
            reps.push_back(measure_uncentered_weak(f, pair, pr, scales));
          }
        }
      } else if (theorem == "fs") {
        reps = fefferman_stein_trials(ts, o.q, o.gamma);
      } else if (theorem == "bump") {
        auto ident = bump_identity_trials(ts, o.q, o.s, o.gamma);
        auto strong = strong_bump_trials(ts, o.q, o.s, o.gamma);
        reps.insert(reps.end(), ident.begin(), ident.end());
        reps.insert(reps.end(), strong.begin(), strong.end());
      } else if (theorem == "sawyer") {
        reps = sawyer_trials(ts, o.q, o.r, o.alpha);
      } else {
        reps = domination_trials(ts, o.alpha, o.r);
      }
      return emit_reports(reps, o.out_path, csv_path);
    }

    if (cmd_demo->parsed()) {
      TrialSetup ts;
      ts.n = 1;
      ts.p = 1.0;
      ts.cells = o.grid_cells;
      ts.seed = o.seed;
      ts.trials = 5;
      std::vector<VerificationReport> reps;
      auto append = [&](std::vector<VerificationReport> batch) {
        reps.insert(reps.end(), batch.begin(), batch.end());
      };
      append(weak_type_trials(ts, 2.0, 2.0, 0.0, 0.0));
      append(weak_type_trials(ts, 2.0, 4.0, 0.25, 0.5));
      append(fefferman_stein_trials(ts, 2.0, 0.0));
      append(bump_identity_trials(ts, 3.0, 2.0, 0.0));
      append(strong_bump_trials(ts, 3.0, 2.0, 0.0));
      {
        TrialSetup saw = ts;
        saw.cells = 16;
        append(sawyer_trials(saw, 2.0, 2.0, 0.0));
      }
      {
        TrialSetup dom = ts;
        dom.trials = 3;
        append(domination_trials(dom, 0.0, 2.0));
      }
      append(cover_search_trials(ts, 200));
      append(closure_trials(ts, 2.0, 2.0, 0.0));
      if (csv_path.empty()) csv_path = "parweight_demo.csv";
      int rc = emit_reports(reps, o.out_path, csv_path);
      std::cerr << "wrote " << reps.size() << " reports, CSV at " << csv_path
                << std::endl;
      return rc;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
