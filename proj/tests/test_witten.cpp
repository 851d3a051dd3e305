// Witten deformation on 1-D tame tuples: bound formulas, tameness checks,
// eigenvector localization, the comparison map Phi, distance certificates.

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "spinlab/grassmann.hpp"
#include "spinlab/witten.hpp"

using namespace spinlab;

namespace {

double linear_pot(double x) { return x; }

TameTupleModel canonical_model() {
  return make_interval_model(400, 6.0, linear_pot, {Interval{-1.0, 1.0}}, 1.0);
}

}  // namespace

TEST_CASE("localization bound formula") {
  LocalizationBounds lb = localization_bound_formula(1.0, 1.0, 1.0, 10.0);
  CHECK(std::abs(lb.a * lb.a - 0.21) < 1e-15);
  CHECK(std::abs(lb.a - std::sqrt(0.21)) < 1e-15);
  CHECK(std::abs(lb.b - (1.0 - std::sqrt(0.21))) < 1e-15);

  LocalizationBounds degenerate = localization_bound_formula(1.0, 1.0, 0.0, 10.0);
  CHECK(degenerate.a == 0.0);
  CHECK(degenerate.b == 1.0);

  LocalizationBounds big = localization_bound_formula(4.0, 2.0, 3.0, 0.5);
  CHECK(big.b == 0.0);  // A > 1 clamps B at zero
}

TEST_CASE("canonical model w = x: derived constants and tameness") {
  TameTupleModel model = canonical_model();
  CHECK(model.dofs() == 801);
  CHECK(std::abs(model.anticommutator_norm - (0.5 + std::sqrt(2.0) / 2.0)) < 1e-12);
  CHECK(std::abs(model.h_inverse_norm_outside - 1.0 / 1.005) < 1e-12);
  CHECK(model.big_t > 9.0);
  CHECK(model.big_t < 10.5);

  // Dirac block exactly symmetric, Clifford exactly antisymmetric.
  Eigen::MatrixXd dd(model.dirac), cc(model.clifford);
  CHECK((dd - dd.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((cc + cc.transpose()).cwiseAbs().maxCoeff() == 0.0);

  TameReport rep = check_tame(model);
  for (int i = 0; i < 6; ++i) {
    INFO("condition " << i + 1 << ": " << rep.conditions[i].witness);
    CHECK(rep.conditions[i].pass);
  }
  CHECK(rep.all_pass());
}

TEST_CASE("eigenspace packets: simple kernel, 2t ladder") {
  TameTupleModel model = canonical_model();
  double t = 12.0;
  EigenspacePacket p = eigenspace_packet(model, t, 1.0);
  REQUIRE(p.dim() == 1);
  CHECK(std::abs(p.eigenvalues(0)) < 5e-2);
  CHECK(p.nearest_excluded > 2.0 * t - 1.0);
  CHECK(p.max_residual < 1e-8 * (1.0 + t * t));

  EigenspacePacket wide = eigenspace_packet(model, t, 2.0 * t + 1.0);
  REQUIRE(wide.dim() == 3);
  CHECK(std::abs(wide.eigenvalues(1) - 2.0 * t) < 0.2);
  CHECK(std::abs(wide.eigenvalues(2) - 2.0 * t) < 0.2);
}

TEST_CASE("localization verification at t = 20") {
  TameTupleModel model = canonical_model();
  CHECK_THROWS_AS(localization_bounds(model, 1.0), std::invalid_argument);

  LocalizationReport rep = verify_localization(model, 20.0, 1.0, CutoffProfile{2.0, 4.0});
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.all_pass());
  CHECK(rep.rows[0].slack() >= 0.0);
  CHECK(rep.bounds.a < 0.36);
}

TEST_CASE("Phi with identity glue is the identity") {
  TameTupleModel model = canonical_model();
  Interval u{-3.0, 3.0};
  CutoffProfile rho_one{7.0, 8.0};  // identically 1 on the dofs
  PhiReport rep = phi_map(model, model, u, rho_one, 0.5, 12.0);
  CHECK(rep.dims_match);
  CHECK(rep.dim1 == 1);
  CHECK(std::abs(rep.min_singular - 1.0) < 1e-12);
  CHECK(std::abs(rep.phi(0, 0) - 1.0) < 1e-12);

  // lambda sitting on an eigenvalue is rejected
  EigenspacePacket p = eigenspace_packet(model, 12.0, 1.0);
  CHECK_THROWS_AS(phi_map(model, model, u, rho_one, p.eigenvalues(0), 12.0),
                  std::runtime_error);
}

TEST_CASE("Phi between models differing outside U") {
  TameTupleModel model = canonical_model();
  auto modified = [](double x) {
    double a = std::abs(x);
    return a <= 2.0 ? x : x + 0.4 * (x > 0 ? a - 2.0 : -(a - 2.0));
  };
  TameTupleModel model2 = make_interval_model(400, 6.0, modified, {Interval{-1.0, 1.0}}, 1.0);
  Interval u{-1.5, 1.5};
  CutoffProfile rho{1.2, 1.45};

  PhiReport rep = phi_map(model, model2, u, rho, 0.5, 16.0);
  CHECK(rep.dims_match);
  CHECK(rep.dim1 == 1);
  CHECK(rep.min_singular >= 0.9);
  CHECK(rep.max_singular <= 1.0 + 1e-9);

  T0Search search = phi_t0_search(model, model2, u, rho, 0.5, 0.1);
  REQUIRE(search.found);
  CHECK(std::abs(search.t0 - std::max(model.big_t, model2.big_t)) < 1e-12);
  CHECK(search.sweep.size() == 1);

  // measured packet distance after cutoff is small at t0
  EigenspacePacket p1 = eigenspace_packet(model, search.t0, 0.5);
  EigenspacePacket p2 = eigenspace_packet(model2, search.t0, 0.5);
  Eigen::VectorXd rd(model.dofs());
  for (int i = 0; i < model.dofs(); ++i) rd(i) = rho(model.dof_coord(i));
  Eigen::MatrixXd cut = rd.asDiagonal() * p1.vectors;
  CHECK(grassmann_distance(orthonormal_basis(cut), p2.vectors) < 0.1);

  // unreachable tolerance: doubling gives up after the 2^10 cap
  T0Search fail = phi_t0_search(model, model2, u, rho, 0.5, -1.0);
  CHECK(!fail.found);
  CHECK(fail.sweep.size() == 11);

  // glue violation: potentials disagree on a larger U
  CHECK_THROWS_AS(phi_map(model, model2, Interval{-2.5, 2.5}, rho, 0.5, 16.0),
                  std::invalid_argument);
}

TEST_CASE("composition coherence on a three-well family") {
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
  std::vector<Interval> f{Interval{-1.3, 1.3}};
  TameTupleModel w1 = make_interval_model(400, 4.0, variant(0.0), f, 1.0);
  TameTupleModel w2 = make_interval_model(400, 4.0, variant(0.4), f, 1.0);
  TameTupleModel w3 = make_interval_model(400, 4.0, variant(0.8), f, 1.0);
  Interval u{-1.58, 1.58};
  CutoffProfile rho{1.35, 1.55};

  double resid[2];
  int k = 0;
  for (double t : {12.0, 24.0}) {
    EigenspacePacket q1 = eigenspace_packet(w1, t, 0.5);
    CHECK(q1.dim() == 3);  // three wells, three near-zero states
    PhiReport p21 = phi_map(w1, w2, u, rho, 0.5, t);
    PhiReport p32 = phi_map(w2, w3, u, rho, 0.5, t);
    PhiReport p31 = phi_map(w1, w3, u, rho, 0.5, t);
    CHECK(p21.dims_match);
    CHECK(p32.dims_match);
    CHECK(p31.dims_match);
    CHECK(p21.dim1 == 3);
    CHECK(p21.min_singular > 0.9);
    resid[k++] = (p31.phi - p32.phi * p21.phi).norm();
  }
  CHECK(resid[1] < resid[0]);  // coherence sharpens as t grows
  CHECK(resid[1] < 0.05);
}

TEST_CASE("eigenvalue perturbation to distance certificate") {
  DistanceCertificate cert = eigenvalue_to_distance(1.0, {0.5}, {0.51});
  CHECK(std::abs(cert.per_step - 0.04) < 1e-15);
  CHECK(std::abs(cert.d_bound - 0.2) < 1e-15);

  DistanceCertificate zero = eigenvalue_to_distance(1.0, {0.1, 0.2}, {0.1, 0.2});
  CHECK(zero.per_step == 0.0);
  CHECK(zero.d_bound == 0.0);

  CHECK_THROWS_AS(eigenvalue_to_distance(1.0, {0.99}, {0.995}), std::invalid_argument);
  CHECK_THROWS_AS(eigenvalue_to_distance(1.0, {0.1, 0.2}, {0.1}), std::invalid_argument);

  // the certificate dominates the measured distance on random graph
  // perturbations of a 3-dim packet in a 40-dim ambient space
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 40, r = 3;
  Eigen::VectorXd diag(n);
  diag << 0.1, 0.2, 0.3, Eigen::VectorXd::LinSpaced(n - r, 1.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, r);
    for (int j = 0; j < r; ++j) {
      e(j, j) = 1.0;
      Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
      for (int i = r; i < n; ++i) f(i) = g(rng);
      e.col(j) += 0.05 / f.norm() * f;
    }
    Eigen::MatrixXd q = orthonormal_basis(e);
    Eigen::MatrixXd form = q.transpose() * diag.asDiagonal() * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form);
    std::vector<double> reference{0.1, 0.2, 0.3};
    std::vector<double> perturbed(es.eigenvalues().data(), es.eigenvalues().data() + r);
    DistanceCertificate c = eigenvalue_to_distance(1.0, reference, perturbed);
    double measured = grassmann_distance(q, Eigen::MatrixXd::Identity(n, n).leftCols(r));
    CHECK(c.d_bound >= measured);
  }
}

TEST_CASE("degenerate and failing tuples") {
  TameTupleModel flat0 =
      make_interval_model(64, 3.0, [](double) { return 0.0; }, {Interval{-1.0, 1.0}}, 1.0);
  TameReport rep = check_tame(flat0);
  CHECK(!rep.conditions[2].pass);
  CHECK(rep.conditions[2].witness.find("vanishes") != std::string::npos);
  CHECK(!rep.all_pass());

  TameTupleModel overreach =
      make_interval_model(400, 6.0, linear_pot, {Interval{-1.0, 1.0}}, 5000.0, 2.0);
  TameReport rep2 = check_tame(overreach);
  CHECK(!rep2.conditions[4].pass);

  CHECK_THROWS_AS(make_interval_model(4, 1.0, linear_pot, {}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_interval_model(64, 1.0, linear_pot, {}, -1.0), std::invalid_argument);
}
