// Spin(3)-torsor geometry: chern numbers of the standard triples, the
// antipodal lift, the SU(2) action, the two-component invariant, and the
// square root correction.

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "spinlab/torsor.hpp"

using namespace spinlab;

TEST_CASE("chart and spinor roundtrips") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vec3 x = normalized3({g(rng), g(rng), g(rng)});
    ChartPoint p = sphere_to_chart(x);
    Vec3 back = chart_to_sphere(p);
    CHECK(norm3({back[0] - x[0], back[1] - x[1], back[2] - x[2]}) < 1e-12);
    Quat h = spinor_over(x);
    Vec3 bp = spinor_base_point(spinor_coords(h));
    CHECK(norm3({bp[0] - x[0], bp[1] - x[1], bp[2] - x[2]}) < 1e-12);
  }
}

TEST_CASE("adjoint rotation is the double cover") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Quat q = sample_unit_quat(rng);
    Vec3 x = normalized3({g(rng), g(rng), g(rng)});
    Vec3 gx = adjoint_rotate(q, x);
    CHECK(std::abs(norm3(gx) - 1.0) < 1e-12);  // isometry
    Vec3 nx = adjoint_rotate(Quat{-q.w, -q.x, -q.y, -q.z}, x);
    CHECK(norm3({gx[0] - nx[0], gx[1] - nx[1], gx[2] - nx[2]}) < 1e-12);  // -q acts equally
  }
}

TEST_CASE("chern numbers of the standard triples") {
  auto mesh = TriangulatedSphere::icosphere(2);
  REQUIRE(mesh.n_faces() == 320);
  for (int k : {0, 1, 2}) {
    ChernReport rep = chern_report(StandardTriple(k), mesh);
    INFO("weight " << k);
    CHECK(rep.chern == k);
    CHECK(rep.residue < 1e-6);
  }
  auto rep3 = chern_report(StandardTriple(1), TriangulatedSphere::icosphere(3));
  CHECK(rep3.chern == 1);
  CHECK(rep3.residue < 1e-6);
}

TEST_CASE("antipodal lift squares to (-1)^k") {
  CHECK(antipodal_lift_square(StandardTriple(0)) == 1);
  CHECK(antipodal_lift_square(StandardTriple(1)) == -1);
  CHECK(antipodal_lift_square(StandardTriple(2)) == 1);
}

TEST_CASE("SU(2) action: group law, lift commutation, adjoint covering") {
  std::mt19937_64 rng(7);
  StandardTriple t1(1);
  std::normal_distribution<double> gs(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Quat g1 = sample_unit_quat(rng), g2 = sample_unit_quat(rng);
    BundleAut a1 = su2_action(g1, t1), a2 = su2_action(g2, t1), a12 = su2_action(g1 * g2, t1);
    Vec3 x = normalized3({gs(rng), gs(rng), gs(rng)});
    FiberPoint p{sphere_to_chart(x), CDbl(0.8, -0.3)};
    CHECK(fiber_points_equal(a1.apply(a2.apply(p)), a12.apply(p), 1, 1e-11));
    CHECK(fiber_points_equal(a1.apply(t1.antipodal_lift(p)), t1.antipodal_lift(a1.apply(p)), 1,
                             1e-11));
    Vec3 moved = chart_to_sphere(a1.apply_base(p.base));
    Vec3 want = adjoint_rotate(g1, x);
    CHECK(norm3({moved[0] - want[0], moved[1] - want[1], moved[2] - want[2]}) < 1e-11);
  }
}

TEST_CASE("the center acts by (-1)^k on fibers") {
  StandardTriple t1(1);
  BundleAut minus = su2_action(Quat{-1, 0, 0, 0}, t1);
  FiberPoint p{{Chart::north, CDbl(0.4, 0.7)}, CDbl(1.0, 2.0)};
  FiberPoint mp = minus.apply(p);
  CHECK(mp.base.chart == p.base.chart);
  CHECK(std::abs(mp.base.zeta - p.base.zeta) < 1e-15);
  CHECK(std::abs(mp.alpha - (-p.alpha)) < 1e-12);
}

TEST_CASE("component invariant separates the two components") {
  auto mesh = TriangulatedSphere::icosphere(2);
  const int nv = mesh.n_vertices();
  std::vector<CDbl> one(nv, CDbl(1, 0)), neg(nv, CDbl(-1, 0));
  CHECK(component_invariant(EquivariantFunction(mesh, one)) == 1);
  CHECK(component_invariant(EquivariantFunction(mesh, neg)) == -1);

  // a genuinely varying representative of the odd component
  std::vector<CDbl> ex(nv);
  for (int i = 0; i < nv; ++i) ex[i] = -std::exp(CDbl(0, M_PI * mesh.vertices[i][2]));
  CHECK(component_invariant(EquivariantFunction(mesh, ex)) == -1);
}

TEST_CASE("component invariant is deformation stable") {
  auto mesh = TriangulatedSphere::icosphere(2);
  const int nv = mesh.n_vertices();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::vector<CDbl> plus(nv, CDbl(1, 0)), minus(nv, CDbl(-1, 0));
  for (int trial = 0; trial < 5; ++trial) {
    // multiply by exp(a + i b), a even, b odd: stays equivariant and
    // nonvanishing, hence in the same component
    double c1 = u(rng), c2 = u(rng), c3 = u(rng), c4 = u(rng);
    auto deform = [&](std::vector<CDbl> f) {
      for (int i = 0; i < nv; ++i) {
        const Vec3& x = mesh.vertices[i];
        double a = c1 * x[0] * x[1] + c2 * x[2] * x[2];
        double b = c3 * x[0] + c4 * x[1] * x[2] * x[2];
        f[i] *= std::exp(CDbl(a, b));
      }
      return f;
    };
    CHECK(component_invariant(EquivariantFunction(mesh, deform(plus))) == 1);
    CHECK(component_invariant(EquivariantFunction(mesh, deform(minus))) == -1);
  }
}

TEST_CASE("equivariant function validation") {
  auto mesh = TriangulatedSphere::icosphere(1);
  const int nv = mesh.n_vertices();
  std::vector<CDbl> bad(nv, CDbl(0, 1));  // i != conj(i): antipodal relation fails
  CHECK_THROWS_AS(EquivariantFunction(mesh, bad), std::invalid_argument);
  std::vector<CDbl> zero(nv, CDbl(1, 0));
  zero[3] = CDbl(0, 0);
  CHECK_THROWS_AS(EquivariantFunction(mesh, zero), std::invalid_argument);
}

TEST_CASE("square root correction") {
  auto mesh = TriangulatedSphere::icosphere(2);
  const int nv = mesh.n_vertices();
  // psi = exp(2 g + 2 i u) with g odd, u even satisfies psi(x) conj(psi(-x)) = 1
  std::vector<CDbl> psi(nv);
  for (int i = 0; i < nv; ++i) {
    const Vec3& x = mesh.vertices[i];
    double g = 0.3 * x[0] + 0.2 * x[1] * x[1] * x[1];
    double u = 0.4 * x[2] * x[2] + 0.25 * x[0] * x[0] * x[1] * x[1];
    psi[i] = std::exp(CDbl(2.0 * g, 2.0 * u));
  }
  auto sq = local_square_root_correction(mesh, psi);
  CHECK(sq.max_square_residual < 1e-12);
  CHECK(sq.max_compatibility_residual < 1e-12);

  // constant unimodular psi: chi = e^{i 0.6}, phi = chi / |chi|^2 = chi
  std::vector<CDbl> pconst(nv, std::exp(CDbl(0, 1.2)));
  auto sq2 = local_square_root_correction(mesh, pconst);
  CHECK(std::abs(sq2.phi[0] - std::exp(CDbl(0, 0.6))) < 1e-12);
}

TEST_CASE("OFF round trip") {
  auto mesh = TriangulatedSphere::icosphere(1);
  std::string path = "torsor_roundtrip.off";
  mesh.save_off(path);
  auto loaded = TriangulatedSphere::load_off(path);
  REQUIRE(loaded.n_vertices() == mesh.n_vertices());
  REQUIRE(loaded.n_faces() == mesh.n_faces());
  CHECK(chern_number(StandardTriple(1), loaded) == 1);
  std::remove(path.c_str());
}
