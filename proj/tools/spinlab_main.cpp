// spinlab: batch front end over the library modules. Each subcommand runs one
// verification pipeline and emits a JSON report. Exit codes: 0 all checks
// pass, 1 verification failures (report carries structured diffs), 2 input
// errors. Reports contain no timestamps, so equal inputs give equal bytes.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "spinlab/json_models.hpp"
#include "spinlab/spinlab.hpp"

using namespace spinlab;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  double tol = 0.0;  // 0 picks the per-subcommand default
  std::string json_path;
  bool quiet = false;
};

// Structured diffs for the report; presence of any entry makes the run fail.
struct Failures {
  Json items = Json::array();
  void add(const std::string& check, const Json& expected, const Json& actual) {
    items.push_back(Json{{"check", check}, {"expected", expected}, {"actual", actual}});
  }
  bool empty() const { return items.empty(); }
};

void emit(const Json& report, const GlobalOpts& g) {
  std::string text = report.dump(2);
  text += "\n";
  if (!g.json_path.empty()) {
    std::ofstream out(g.json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + g.json_path);
    out << text;
  }
  if (!g.quiet) std::fputs(text.c_str(), stdout);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << header << "\n";
  for (const std::string& r : rows) out << r << "\n";
}

// ---------------------------------------------------------------- quat-reps

struct QuatOpts {
  int n = 1;
  int samples = 25;
};

Json run_quat_reps(const QuatOpts& o, const GlobalOpts& g) {
  const double tol = g.tol > 0 ? g.tol : 1e-12;
  Failures f;

  IntertwinerReport rep = verify_intertwiner<CRat>(o.n);
  if (!rep.ok()) f.add("intertwiner", "c/h/tau/grading intertwined, gram scalar", "violated");

  double dev = basis_independence_max_dev(1, o.samples, static_cast<unsigned>(g.seed));
  if (!(dev < tol)) f.add("basis_independence_max_dev", Json{{"less_than", tol}}, dev);

  auto sum = direct_sum_compatibility<CRat>(1, 1);
  if (!sum.ok())
    f.add("direct_sum", "F on V (+) W = F^V tensor F^W",
          Json{{"c_ok", sum.c_ok}, {"h_ok", sum.h_ok}, {"tau_ok", sum.tau_ok}, {"f_ok", sum.f_ok}});

  return Json{{"n", o.n},
              {"intertwiner", rep},
              {"basis_independence",
               Json{{"samples", o.samples}, {"seed", g.seed}, {"max_dev", dev}, {"tol", tol}}},
              {"direct_sum",
               Json{{"c_ok", sum.c_ok}, {"h_ok", sum.h_ok}, {"tau_ok", sum.tau_ok}, {"f_ok", sum.f_ok}}},
              {"failures", f.items}};
}

// --------------------------------------------------------------- oscillator

struct OscOpts {
  int m = 1;
  double t = 8.0;
  std::string mode = "cylinder";
  int grid = 0;      // 0 picks the mode default
  double box = 0.0;  // 0 picks the mode default
  int levels = 8;
  std::string csv;
};

Json run_oscillator(const OscOpts& o, const GlobalOpts&) {
  Failures f;
  SpectralResult r;
  if (o.mode == "flat") {
    r = flat_susy_fd(o.t, o.grid ? o.grid : 2000, o.box > 0 ? o.box : 8.0, o.levels);
  } else {
    OscillatorProblem p;
    p.m = o.m;
    p.t = o.t;
    p.mode = MetricMode::cylindrical_end;
    p.n_radial = o.grid ? o.grid : (o.m == 1 ? 800 : 1200);
    p.box_radius = o.box > 0 ? o.box : 6.0;
    r = pseudo_susy_spectrum(p);
  }
  if (r.kernel_dim != 1) f.add("kernel_dim", 1, r.kernel_dim);
  if (!r.certified()) f.add("certified", true, Json{{"diagnostics", r.diagnostics}});

  if (!o.csv.empty()) {
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu,%.17g", i, r.eigenvalues[i]);
      rows.emplace_back(buf);
    }
    write_csv(o.csv, "index,eigenvalue", rows);
  }

  Json out = r;
  out["mode"] = o.mode;
  out["t"] = o.t;
  out["failures"] = f.items;
  return out;
}

// ------------------------------------------------------------------- witten

struct WittenOpts {
  std::string model_path;
  std::string sweep;  // start:factor:count
  double lambda = -1.0;
  std::string csv;
};

struct Sweep {
  double start = 0.0;
  double factor = 2.0;
  int count = 3;
};

Sweep parse_sweep(const std::string& text) {
  Sweep s;
  char extra;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &s.start, &s.factor, &s.count, &extra) != 3 ||
      s.start <= 0 || s.factor <= 1.0 || s.count < 1)
    throw std::runtime_error("bad --t-sweep, want start:factor:count with start > 0, factor > 1");
  return s;
}

Json run_witten(const WittenOpts& o, const GlobalOpts&) {
  Failures f;
  TameTupleModel model =
      o.model_path.empty()
          ? make_interval_model(400, 6.0, [](double x) { return x; }, {Interval{-1.0, 1.0}}, 1.0)
          : load_tame_model(o.model_path);
  CutoffProfile rho = o.model_path.empty()
                          ? CutoffProfile{2.0, 4.0}
                          : cutoff_from_json(load_json_file(o.model_path), model);
  const double lambda = o.lambda > 0 ? o.lambda : model.lambda_bar;

  TameReport tame = check_tame(model);
  if (!tame.all_pass()) {
    for (const TameCondition& c : tame.conditions)
      if (!c.pass) f.add("tame_condition", "pass", c.witness);
  }

  Sweep sweep;
  if (!o.sweep.empty()) {
    sweep = parse_sweep(o.sweep);
  } else {
    sweep.start = model.big_t;
  }

  Json runs = Json::array();
  Json skipped = Json::array();
  std::vector<std::string> csv_rows;
  int verified = 0;
  double t = sweep.start;
  for (int i = 0; i < sweep.count; ++i, t *= sweep.factor) {
    if (t < model.big_t) {
      skipped.push_back(t);
      continue;
    }
    LocalizationReport rep = verify_localization(model, t, lambda, rho);
    ++verified;
    if (!rep.all_pass())
      f.add("localization", Json{{"t", t}, {"bounds", "hold for all rows"}}, rep);
    runs.push_back(rep);
    if (!o.csv.empty()) {
      double worst_outside = 0.0, worst_rho = 1.0;
      for (const LocalizationRow& row : rep.rows) {
        worst_outside = std::max(worst_outside, row.outside_mass);
        worst_rho = std::min(worst_rho, row.rho_norm);
      }
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d", t, rep.bounds.a,
                    rep.bounds.b, worst_outside, worst_rho, int(rep.all_pass()));
      csv_rows.emplace_back(buf);
    }
  }
  if (verified == 0)
    f.add("sweep", "at least one t at or above the model threshold", Json{{"threshold", model.big_t}});
  if (!o.csv.empty()) write_csv(o.csv, "t,A,B,max_outside_mass,min_rho_norm,pass", csv_rows);

  return Json{{"model",
               Json{{"source", o.model_path.empty() ? "built-in linear" : o.model_path},
                    {"dofs", model.dofs()},
                    {"lambda_bar", model.lambda_bar},
                    {"threshold_T", model.big_t},
                    {"anticommutator_norm", model.anticommutator_norm}}},
              {"lambda", lambda},
              {"tame", tame},
              {"sweep", runs},
              {"skipped_below_threshold", skipped},
              {"failures", f.items}};
}

// ------------------------------------------------------------------- torsor

struct TorsorOpts {
  std::string mesh_path;
  int weight = 1;
  int subdiv = 2;
};

Json run_torsor(const TorsorOpts& o, const GlobalOpts& g) {
  const double tol = g.tol > 0 ? g.tol : 1e-6;
  Failures f;
  TriangulatedSphere mesh = o.mesh_path.empty() ? TriangulatedSphere::icosphere(o.subdiv)
                                                : TriangulatedSphere::load_off(o.mesh_path);
  StandardTriple triple(o.weight);

  ChernReport chern = chern_report(triple, mesh);
  if (!(chern.residue < tol)) f.add("chern_residue", Json{{"less_than", tol}}, chern.residue);

  int iota_sq = antipodal_lift_square(triple);
  int iota_expect = o.weight % 2 == 0 ? 1 : -1;
  if (iota_sq != iota_expect) f.add("iota_sq", iota_expect, iota_sq);

  const int nv = mesh.n_vertices();
  std::vector<CDbl> plus(nv, CDbl(1, 0)), minus(nv, CDbl(-1, 0));
  int inv_plus = component_invariant(EquivariantFunction(mesh, plus));
  int inv_minus = component_invariant(EquivariantFunction(mesh, minus));
  if (inv_plus != 1 || inv_minus != -1)
    f.add("components", Json{{"plus", 1}, {"minus", -1}},
          Json{{"plus", inv_plus}, {"minus", inv_minus}});

  return Json{{"chern", chern.chern},
              {"residue", chern.residue},
              {"max_plaquette", chern.max_plaquette},
              {"iota_sq", iota_sq},
              {"components", Json{{"plus", inv_plus}, {"minus", inv_minus},
                                  {"separated", inv_plus == 1 && inv_minus == -1}}},
              {"mesh", Json{{"source", o.mesh_path.empty() ? "icosphere" : o.mesh_path},
                            {"vertices", mesh.n_vertices()},
                            {"faces", mesh.n_faces()}}},
              {"weight", o.weight},
              {"failures", f.items}};
}

// ---------------------------------------------------------------------- fda

struct FdaOpts {
  std::string model_path;
  std::string check = "all";
};

Json run_fda(const FdaOpts& o, const GlobalOpts& g) {
  Failures f;
  FdaModel model = o.model_path.empty() ? FdaModel::sw_toy() : load_fda_model(o.model_path);

  Json out{{"label", model.label},
           {"dims", Json{{"n_vh", model.n_vh}, {"n_vr", model.n_vr}, {"n_wh", model.n_wh},
                         {"n_wr", model.n_wr}, {"stab", model.stab}}}};

  if (o.check == "all" || o.check == "axioms") {
    AxiomReport axioms = check_axioms(model, 40, static_cast<unsigned>(g.seed));
    out["axioms"] = axioms;
    for (const AxiomCheck& c : axioms.checks)
      if (!c.pass)
        f.add("axiom_" + std::to_string(c.index), "pass",
              Json{{"residual", c.residual}, {"note", c.note}});
  }
  if (o.check == "all" || o.check == "hk3") {
    if (model.n_vh == 1) {
      Hk3Report hk3 = hk3_conditions(model, static_cast<unsigned>(g.seed));
      out["hk3"] = hk3;
      if (!hk3.pass) f.add("hk3", "c = +1 with consistent flags", hk3.witness);
    } else {
      out["hk3"] = nullptr;  // extraction defined for rank-3 horizontal part only
    }
  }

  out["failures"] = f.items;
  return out;
}

// -------------------------------------------------------------------- gerbe

struct GerbeOpts {
  std::string nerve_path;
  std::string cochain_path;
  bool trivialize_flag = false;
};

Json run_gerbe(const GerbeOpts& o, const GlobalOpts&) {
  Failures f;
  if (o.nerve_path.empty() != o.cochain_path.empty())
    throw std::runtime_error("--nerve and --cochain must be given together");
  O1Gerbe gerbe = o.nerve_path.empty()
                      ? rp2_gerbe()
                      : O1Gerbe(load_nerve(o.nerve_path), load_sign_cochain(o.cochain_path));

  CocycleReport cocycle = verify_cocycle(gerbe);
  if (!cocycle.pass)
    f.add("cocycle", "delta s = 1 on every quadruple",
          Json{{"failing_quadruples", cocycle.failing_quadruples}});

  Json out{{"nerve", Json{{"n", gerbe.nerve.n},
                          {"pairs", gerbe.nerve.pairs.size()},
                          {"triples", gerbe.nerve.triples.size()},
                          {"quadruples", gerbe.nerve.quadruples.size()}}},
           {"cocycle", cocycle}};

  if (o.trivialize_flag) {
    TrivializationResult r = trivialize(gerbe);
    out["trivialization"] = r;
    bool certified = r.trivializable ? coboundary1(gerbe.nerve, r.edge_sections) == gerbe.sections
                                     : TrivializationResult::pairing(gerbe, r.obstruction) == -1;
    out["certified"] = certified;
    if (!certified)
      f.add("trivialization_certificate",
            "delta u = s, or an obstruction cycle pairing to -1", r);
  }

  out["failures"] = f.items;
  return out;
}

// ---------------------------------------------------------------------- all

Json run_all(const GlobalOpts& g, bool& pass) {
  Json out;
  pass = true;
  auto step = [&](const char* name, Json rep) {
    pass = pass && rep.at("failures").empty();
    out[name] = std::move(rep);
  };
  step("quat_reps", run_quat_reps(QuatOpts{}, g));
  step("oscillator", run_oscillator(OscOpts{}, g));
  step("witten", run_witten(WittenOpts{}, g));
  step("torsor", run_torsor(TorsorOpts{}, g));
  step("fda", run_fda(FdaOpts{}, g));
  GerbeOpts gerbe;
  gerbe.trivialize_flag = true;
  step("gerbe", run_gerbe(gerbe, g));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinlab: spectral and cohomological verification pipelines"};
  app.require_subcommand(1);
  app.fallthrough(true);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed for sampled checks")->capture_default_str();
  app.add_option("--tol", g.tol, "override the subcommand's default tolerance");
  app.add_option("--json", g.json_path, "write the JSON report to this path");
  app.add_flag("--quiet", g.quiet, "suppress the report on stdout");

  QuatOpts quat;
  CLI::App* c_quat = app.add_subcommand("quat-reps", "canonical intertwiner verification");
  c_quat->add_option("--n", quat.n, "quaternionic dimension")->check(CLI::Range(1, 3));
  c_quat->add_option("--samples", quat.samples, "random Sp(1) bases")->check(CLI::PositiveNumber);

  OscOpts osc;
  CLI::App* c_osc = app.add_subcommand("oscillator", "SUSY oscillator spectrum");
  c_osc->add_option("--m", osc.m, "quaternionic dimension")->check(CLI::Range(1, 4));
  c_osc->add_option("--t", osc.t, "deformation parameter")->check(CLI::PositiveNumber);
  c_osc->add_option("--mode", osc.mode, "flat or cylinder")
      ->check(CLI::IsMember({"flat", "cylinder"}));
  c_osc->add_option("--grid", osc.grid, "grid nodes (0 = default)");
  c_osc->add_option("--box", osc.box, "half-width of the computational box");
  c_osc->add_option("--levels", osc.levels, "eigenvalues to report")->check(CLI::PositiveNumber);
  c_osc->add_option("--csv", osc.csv, "write eigenvalues as CSV");

  WittenOpts wit;
  CLI::App* c_wit = app.add_subcommand("witten", "localization bound verification");
  c_wit->add_option("--model", wit.model_path, "tame model JSON");
  c_wit->add_option("--t-sweep", wit.sweep, "start:factor:count");
  c_wit->add_option("--lambda", wit.lambda, "packet cutoff (default: model lambda-bar)");
  c_wit->add_option("--report", g.json_path, "write the JSON report to this path");
  c_wit->add_option("--csv", wit.csv, "write per-t bound summary as CSV");

  TorsorOpts tor;
  CLI::App* c_tor = app.add_subcommand("torsor", "chern number and component invariants");
  c_tor->add_option("--mesh", tor.mesh_path, "OFF mesh over the sphere");
  c_tor->add_option("--weight", tor.weight, "line bundle weight")->check(CLI::Range(0, 6));
  c_tor->add_option("--subdiv", tor.subdiv, "icosphere subdivisions when no mesh is given")
      ->check(CLI::Range(0, 6));

  FdaOpts fda;
  CLI::App* c_fda = app.add_subcommand("fda", "free differential algebra axioms and classes");
  c_fda->add_option("--model", fda.model_path, "FDA model JSON");
  c_fda->add_option("--check", fda.check, "all, axioms, or hk3")
      ->check(CLI::IsMember({"all", "axioms", "hk3"}));

  GerbeOpts ger;
  CLI::App* c_ger = app.add_subcommand("gerbe", "O(1) gerbe cocycles and trivialization");
  c_ger->add_option("--nerve", ger.nerve_path, "nerve JSON");
  c_ger->add_option("--cochain", ger.cochain_path, "sign cochain JSON");
  c_ger->add_flag("--trivialize", ger.trivialize_flag, "run the trivialization solver");

  CLI::App* c_all = app.add_subcommand("all", "run every module with built-in inputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Json report;
    bool pass = false;
    if (c_quat->parsed()) {
      report = run_quat_reps(quat, g);
    } else if (c_osc->parsed()) {
      report = run_oscillator(osc, g);
    } else if (c_wit->parsed()) {
      report = run_witten(wit, g);
    } else if (c_tor->parsed()) {
      report = run_torsor(tor, g);
    } else if (c_fda->parsed()) {
      report = run_fda(fda, g);
    } else if (c_ger->parsed()) {
      report = run_gerbe(ger, g);
    } else if (c_all->parsed()) {
      report = run_all(g, pass);
      emit(report, g);
      return pass ? 0 : 1;
    }
    emit(report, g);
    return report.at("failures").empty() ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "spinlab: %s\n", e.what());
    return 2;
  }
}
