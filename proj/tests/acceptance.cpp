// Acceptance gate: one check per release criterion, one PASS/FAIL line each.
// Usage: acceptance [N]  (N in 1..8; no argument runs all).

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spinlab/clifford.hpp"
#include "spinlab/exterior.hpp"
#include "spinlab/fda.hpp"
#include "spinlab/gerbe.hpp"
#include "spinlab/grassmann.hpp"
#include "spinlab/oscillator.hpp"
#include "spinlab/quat_reps.hpp"
#include "spinlab/torsor.hpp"
#include "spinlab/witten.hpp"

using namespace spinlab;

namespace {

void detail(const char* fmt, ...) {
  std::va_list args;
  va_start(args, fmt);
  std::fprintf(stderr, "    ");
  std::vfprintf(stderr, fmt, args);
  std::fprintf(stderr, "\n");
  va_end(args);
}

template <typename S>
bool module_identities(const CliffordModule<S>& m) {
  Matrix<S> id = Matrix<S>::identity(m.dim);
  Matrix<S> eps = m.epsilon();
  for (int a = 0; a < m.vdim; ++a) {
    for (int b = 0; b < m.vdim; ++b) {
      Matrix<S> cc = m.c_gen[a] * m.c_gen[b] + m.c_gen[b] * m.c_gen[a];
      Matrix<S> hh = m.h_gen[a] * m.h_gen[b] + m.h_gen[b] * m.h_gen[a];
      Matrix<S> ch = m.c_gen[a] * m.h_gen[b] + m.h_gen[b] * m.c_gen[a];
      S g = (a == b) ? S(2) : S(0);
      if (!(cc + g * id).is_zero_matrix()) return false;
      if (!(hh - g * id).is_zero_matrix()) return false;
      if (!ch.is_zero_matrix()) return false;
    }
    if (!(eps * m.c_gen[a] + m.c_gen[a] * eps).is_zero_matrix()) return false;
    if (!(eps * m.h_gen[a] + m.h_gen[a] * eps).is_zero_matrix()) return false;
  }
  return true;
}

// 1. Clifford identities, exact rational, exterior dims <= 6 and both
//    quaternionic representations at n = 1.
bool criterion1() {
  bool ok = true;
  for (int d = 1; d <= 6; ++d) {
    auto m = exterior_module<CRat>(InnerProductSpace<CRat>::orthonormal(d));
    if (!module_identities(m)) {
      detail("exterior module dim %d fails an exact identity", d);
      ok = false;
    }
  }
  if (!module_identities(build_s0_module<CRat>(1))) {
    detail("S0 module at n = 1 fails an exact identity");
    ok = false;
  }
  if (!module_identities(build_s1_module<CRat>(1))) {
    detail("S1 module at n = 1 fails an exact identity");
    ok = false;
  }
  return ok;
}

// 2. Canonical intertwiner: intertwines c, h, tau; explicit wedge image of
//    the vacuum; 25 random Sp(1) bases, deviation < 1e-12; direct sum rule
//    at total real dimension 8.
bool criterion2() {
  bool ok = true;
  for (int n : {1, 2}) {
    auto rep = verify_intertwiner<CRat>(n);
    if (!rep.ok()) {
      detail("intertwiner verification fails at n = %d", n);
      ok = false;
    }
    long long want = 1;
    for (int k = 0; k < n; ++k) want *= 4;
    if (rep.gram_scale_num != want || rep.gram_scale_den != 1) {
      detail("gram scale at n = %d is %lld/%lld, want %lld", n, rep.gram_scale_num,
             rep.gram_scale_den, want);
      ok = false;
    }
  }
  auto vac = intertwiner_vacuum<CRat>(1, standard_frame<CRat>(1));
  CRat i = CRat::i();
  if (vac.size() != 4 || vac.at(0b0101) != CRat(1) || vac.at(0b1001) != CRat(-1) * i ||
      vac.at(0b0110) != i || vac.at(0b1010) != CRat(1)) {
    detail("vacuum wedge image differs from (e + i ei) ^ (ej - i ek)");
    ok = false;
  }
  double dev = basis_independence_max_dev(1, 25, 2024u);
  if (!(dev < 1e-12)) {
    detail("basis independence deviation %.3e >= 1e-12 over 25 Sp(1) bases", dev);
    ok = false;
  }
  auto sum = direct_sum_compatibility<CRat>(1, 1);
  if (!(sum.c_ok && sum.h_ok && sum.tau_ok && sum.f_ok)) {
    detail("F on V (+) W does not factor as F^V tensor F^W at real dim 8");
    ok = false;
  }
  return ok;
}

// 3. SUSY oscillator: kernel dim 1 for t in {0.5, 1, 2, 8}; Gaussian overlap
//    >= 0.9999; even/odd pairing of the nonzero spectrum to 1e-8.
bool criterion3() {
  bool ok = true;
  for (double t : {0.5, 1.0, 2.0, 8.0}) {
    auto fd = flat_susy_fd(t, 2000, 8.0, 5);
    if (fd.kernel_dim != 1) {
      detail("t = %g: kernel dimension %d != 1", t, fd.kernel_dim);
      ok = false;
      continue;
    }
    Grid1D g = full_line_grid(2000, 8.0);
    Eigen::VectorXd pred(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      pred(i) = flat_ground_state(t, g.nodes[i] * g.nodes[i]);
    pred.normalize();
    double overlap = std::abs(pred.dot(fd.kernel.col(0).normalized()));
    if (!(overlap >= 0.9999)) {
      detail("t = %g: ground state overlap %.6f < 0.9999", t, overlap);
      ok = false;
    }
    auto l = susy_lowering_matrix(g, flat_weights(t, g));
    auto pair = susy_pair_spectra(l, 5);
    for (int i = 1; i < 5; ++i) {
      double diff = std::abs(pair.even.values(i) - pair.odd.values(i - 1));
      if (!(diff < 1e-8)) {
        detail("t = %g: even/odd pairing off by %.3e at level %d", t, diff, i);
        ok = false;
      }
    }
  }
  return ok;
}

// 4. Pseudo-SUSY cylindrical end: kernel dim 1 for t >= computed threshold,
//    restriction to B_{1/2} matches the flat kernel with overlap >= 0.999.
bool criterion4() {
  bool ok = true;
  auto run = [&ok](int m, double t, int n_radial) {
    OscillatorProblem p;
    p.m = m;
    p.t = t;
    p.mode = MetricMode::cylindrical_end;
    p.n_radial = n_radial;
    p.box_radius = 6.0;
    auto r = pseudo_susy_spectrum(p);
    if (!(t >= r.threshold_t_min)) {
      detail("m = %d: t = %g below computed threshold %.3f", m, t, r.threshold_t_min);
      ok = false;
    }
    if (!r.certified() || r.kernel_dim != 1) {
      detail("m = %d, t = %g: kernel dim %d, certified %d", m, t, r.kernel_dim,
             int(r.certified()));
      ok = false;
      return;
    }
    Grid1D g = m == 1 ? full_line_grid(n_radial, p.box_radius)
                      : radial_grid(n_radial, p.box_radius);
    Eigen::VectorXd pred = predicted_pseudo_kernel(p, g);
    double ov = restricted_overlap(g, pred, r.kernel.col(0), 0.5);
    if (!(ov >= 0.999)) {
      detail("m = %d, t = %g: B_{1/2} overlap %.6f < 0.999", m, t, ov);
      ok = false;
    }
  };
  run(1, 6.0, 800);
  run(1, 8.0, 800);
  run(2, 16.0, 1200);
  return ok;
}

// 5. Witten localization on three 1-D tame models: A/B bounds for every
//    eigenvector below lambda-bar at every swept t >= T with the closed-form
//    A(t); Phi min singular >= 0.9 within the doubling sweep; subspace
//    distance < 0.1 at the final t.
bool criterion5() {
  bool ok = true;
  auto base = [](double x) {
    return std::abs(x) <= 1.5 ? std::sin(M_PI * x) : (x > 0 ? -1.0 : 1.0);
  };
  auto variant = [&](double slope) {
    return [slope, base](double x) {
      double a = std::abs(x);
      if (a <= 1.6) return base(x);
      double bump = slope * (a - 1.6);
      return x > 0 ? -1.0 - bump : 1.0 + bump;
    };
  };
  struct Case {
    const char* name;
    TameTupleModel model;
    CutoffProfile rho;
  };
  std::vector<Case> cases;
  cases.push_back({"linear", make_interval_model(400, 6.0, [](double x) { return x; },
                                                 {Interval{-1.0, 1.0}}, 1.0),
                   CutoffProfile{2.0, 4.0}});
  cases.push_back({"three-well", make_interval_model(400, 4.0, variant(0.0),
                                                     {Interval{-1.3, 1.3}}, 1.0),
                   CutoffProfile{1.6, 2.6}});
  cases.push_back({"three-well-sloped", make_interval_model(400, 4.0, variant(0.4),
                                                            {Interval{-1.3, 1.3}}, 1.0),
                   CutoffProfile{1.6, 2.6}});
  for (const Case& c : cases) {
    if (!check_tame(c.model).all_pass()) {
      detail("%s: tameness check fails", c.name);
      ok = false;
      continue;
    }
    for (double t : {c.model.big_t, 2.0 * c.model.big_t, 4.0 * c.model.big_t}) {
      LocalizationReport rep = verify_localization(c.model, t, c.model.lambda_bar, c.rho);
      double a2 = (c.model.lambda_bar + 2.0 * t * c.model.anticommutator_norm) *
                  c.model.h_inverse_norm_outside * c.model.h_inverse_norm_outside / (t * t);
      if (std::abs(rep.bounds.a - std::sqrt(a2)) > 1e-12) {
        detail("%s, t = %.3f: A(t) deviates from the closed formula", c.name, t);
        ok = false;
      }
      if (rep.rows.empty()) {
        detail("%s, t = %.3f: no eigenvector below lambda-bar", c.name, t);
        ok = false;
      }
      if (!rep.all_pass()) {
        for (const LocalizationRow& row : rep.rows)
          if (!row.pass)
            detail("%s, t = %.3f: eigenvalue %.4f outside %.4f !<= A %.4f or rho-norm %.4f "
                   "!>= B %.4f",
                   c.name, t, row.eigenvalue, row.outside_mass, row.a_bound, row.rho_norm,
                   row.b_bound);
        ok = false;
      }
    }
  }

  // Phi between the glued three-well pair.
  const TameTupleModel& w1 = cases[1].model;
  const TameTupleModel& w2 = cases[2].model;
  Interval u{-1.58, 1.58};
  CutoffProfile rho{1.35, 1.55};
  T0Search search = phi_t0_search(w1, w2, u, rho, 0.5, 0.1);
  if (!search.found || !(search.sweep.back().min_singular >= 0.9)) {
    detail("Phi doubling sweep does not reach min singular 0.9 (found %d)", int(search.found));
    ok = false;
  } else {
    EigenspacePacket p1 = eigenspace_packet(w1, search.t0, 0.5);
    EigenspacePacket p2 = eigenspace_packet(w2, search.t0, 0.5);
    Eigen::VectorXd rd(w1.dofs());
    for (int i = 0; i < w1.dofs(); ++i) rd(i) = rho(w1.dof_coord(i));
    Eigen::MatrixXd cut = rd.asDiagonal() * p1.vectors;
    double d = grassmann_distance(orthonormal_basis(cut), p2.vectors);
    if (!(d < 0.1)) {
      detail("subspace distance %.4f >= 0.1 at final t = %.3f", d, search.t0);
      ok = false;
    }
  }
  return ok;
}

// 6. Torsor: chern = 1 on >= 320 faces with residue < 1e-6; antipodal lift
//    squares to -1 (and +1 at weight 2); the component invariant separates
//    the constants and survives 20 random in-component deformations; group
//    law and lift commutation for 100 random B.
bool criterion6() {
  bool ok = true;
  auto mesh = TriangulatedSphere::icosphere(2);
  if (mesh.n_faces() < 320) {
    detail("mesh has %d faces < 320", mesh.n_faces());
    ok = false;
  }
  ChernReport rep = chern_report(StandardTriple(1), mesh);
  if (rep.chern != 1 || !(rep.residue < 1e-6)) {
    detail("chern %d (want 1), residue %.3e (want < 1e-6)", rep.chern, rep.residue);
    ok = false;
  }
  if (antipodal_lift_square(StandardTriple(1)) != -1) {
    detail("antipodal lift square at weight 1 is not -1");
    ok = false;
  }
  if (antipodal_lift_square(StandardTriple(2)) != 1) {
    detail("antipodal lift square at weight 2 is not +1");
    ok = false;
  }

  const int nv = mesh.n_vertices();
  std::vector<CDbl> plus(nv, CDbl(1, 0)), minus(nv, CDbl(-1, 0));
  if (component_invariant(EquivariantFunction(mesh, plus)) != 1 ||
      component_invariant(EquivariantFunction(mesh, minus)) != -1) {
    detail("component invariant does not separate the constants");
    ok = false;
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-0.4, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    // exp(a + i b) with a even and b odd keeps the function equivariant and
    // nonvanishing, so the component cannot change
    double c1 = coef(rng), c2 = coef(rng), c3 = coef(rng), c4 = coef(rng);
    int want = trial % 2 == 0 ? 1 : -1;
    std::vector<CDbl> f(want == 1 ? plus : minus);
    for (int i = 0; i < nv; ++i) {
      const Vec3& x = mesh.vertices[i];
      double a = c1 * x[0] * x[1] + c2 * x[2] * x[2];
      double b = c3 * x[0] + c4 * x[1] * x[2] * x[2];
      f[i] *= std::exp(CDbl(a, b));
    }
    int got = component_invariant(EquivariantFunction(mesh, f));
    if (got != want) {
      detail("deformation %d moved the invariant: %d -> %d", trial, want, got);
      ok = false;
    }
  }

  StandardTriple t1(1);
  std::normal_distribution<double> gs(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Quat g1 = sample_unit_quat(rng), g2 = sample_unit_quat(rng);
    BundleAut a1 = su2_action(g1, t1), a2 = su2_action(g2, t1), a12 = su2_action(g1 * g2, t1);
    Vec3 x = normalized3({gs(rng), gs(rng), gs(rng)});
    FiberPoint p{sphere_to_chart(x), CDbl(0.8, -0.3)};
    if (!fiber_points_equal(a1.apply(a2.apply(p)), a12.apply(p), 1, 1e-11)) {
      detail("group law fails on sample %d", trial);
      ok = false;
    }
    if (!fiber_points_equal(a1.apply(t1.antipodal_lift(p)), t1.antipodal_lift(a1.apply(p)), 1,
                            1e-11)) {
      detail("lift commutation fails on sample %d", trial);
      ok = false;
    }
  }
  return ok;
}

// 7. FDA pipeline: sw toy passes the nine axioms; c = +1 with the degree-2
//    extraction cross-checked against the direct reduction for ring ranks
//    (n, a) in {1, 2}^2; stabilization leaves the class unchanged.
bool criterion7() {
  bool ok = true;
  FdaModel toy = FdaModel::sw_toy();
  AxiomReport axioms = check_axioms(toy);
  if (!axioms.all_pass()) {
    for (const AxiomCheck& c : axioms.checks)
      if (!c.pass) detail("axiom %d fails: %s", c.index, c.note.c_str());
    ok = false;
  }
  Hk3Report r = hk3_conditions(toy);
  if (!r.pass || r.c_class != 1 || r.c_direct != 1) {
    detail("hk3: pass %d, c %lld, direct %lld (want 1, 1): %s", int(r.pass), r.c_class,
           r.c_direct, r.witness.c_str());
    ok = false;
  }
  long long direct = r.c_direct;
  for (int n : {1, 2})
    for (int a : {1, 2}) {
      long long extracted = index_integrand_degree2(n, a, direct);
      if (extracted != direct) {
        detail("extraction at ring ranks (%d, %d) gives %lld, direct reduction %lld", n, a,
               extracted, direct);
        ok = false;
      }
    }
  Hk3Report s = hk3_conditions(stabilize(toy, 2));
  if (!s.pass || s.c_class != 1) {
    detail("stabilization changed the class: pass %d, c %lld", int(s.pass), s.c_class);
    ok = false;
  }
  return ok;
}

// 8. Gerbe: delta^2 = 1 on 1000 random cochains; solver vs brute force on
//    nerves with <= 12 unknowns; the rp2 cocycle certified non-trivializable.
bool criterion8() {
  bool ok = true;
  std::mt19937_64 rng(4242);
  std::bernoulli_distribution coin(0.5);
  for (int n : {5, 6, 8}) {
    FiniteNerve g = FiniteNerve::complete(n, 3);
    int count = n == 5 ? 334 : 333;
    for (int trial = 0; trial < count; ++trial) {
      Cochain1 u(g.pairs.size());
      for (int& s : u) s = coin(rng) ? 1 : -1;
      Cochain3 z = coboundary2(g, coboundary1(g, u));
      for (int v : z)
        if (v != 1) {
          detail("delta delta != 1 on complete(%d)", n);
          ok = false;
        }
    }
  }

  for (int n : {4, 5}) {  // 6 and 10 edge unknowns
    FiniteNerve g = FiniteNerve::complete(n, 3);
    for (int trial = 0; trial < 100; ++trial) {
      Cochain2 s(g.triples.size());
      for (int& v : s) v = coin(rng) ? 1 : -1;
      O1Gerbe gg(g, s);
      TrivializationResult fast = trivialize(gg);
      std::optional<Cochain1> brute = trivialize_brute(gg);
      if (fast.trivializable != brute.has_value()) {
        detail("solver disagrees with brute force on complete(%d), trial %d", n, trial);
        ok = false;
        continue;
      }
      if (fast.trivializable && coboundary1(g, fast.edge_sections) != s) {
        detail("solver solution does not satisfy delta u = s on complete(%d)", n);
        ok = false;
      }
      if (!fast.trivializable && TrivializationResult::pairing(gg, fast.obstruction) != -1) {
        detail("obstruction certificate does not pair to -1 on complete(%d)", n);
        ok = false;
      }
    }
  }

  O1Gerbe rp2 = rp2_gerbe();
  TrivializationResult r = trivialize(rp2);
  if (r.trivializable || TrivializationResult::pairing(rp2, r.obstruction) != -1) {
    detail("rp2 gerbe not certified: trivializable %d", int(r.trivializable));
    ok = false;
  }
  if (trivialize_brute(rp2).has_value()) {
    detail("brute force trivializes the rp2 gerbe");
    ok = false;
  }
  return ok;
}

struct Criterion {
  int index;
  const char* description;
  bool (*run)();
};

const Criterion criteria[] = {
    {1, "Clifford identities, exact rational, dims <= 6 and quaternionic reps", criterion1},
    {2, "canonical intertwiner: generator rules, 25 random bases, direct sums", criterion2},
    {3, "SUSY oscillator: simple kernel, Gaussian overlap, spectral pairing", criterion3},
    {4, "pseudo-SUSY cylindrical end: kernel above threshold, B_1/2 overlap", criterion4},
    {5, "Witten localization bounds, Phi isomorphism, subspace distance", criterion5},
    {6, "torsor: chern = 1, lift squares, components, SU(2) action", criterion6},
    {7, "FDA: nine axioms, c = +1 extraction vs direct, stabilization", criterion7},
    {8, "gerbe: delta^2 = 1, solver vs brute force, rp2 obstruction", criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 8) {
      std::fprintf(stderr, "usage: %s [1..8]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (only && c.index != only) continue;
    bool pass = c.run();
    std::printf("criterion %d: %s  %s\n", c.index, pass ? "PASS" : "FAIL", c.description);
    if (!pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
