// SUSY oscillator: exact flat spectrum, the staggered FD discretization, the
// cylindrical-end pseudo model, and the stabilization homotopy.

#include <catch2/catch_amalgamated.hpp>

#include "spinlab/oscillator.hpp"

using namespace spinlab;

TEST_CASE("cutoff profiles: values, joints, monotonicity") {
  CHECK(rho_bar(0.0) == 1.0);
  CHECK(rho_bar(0.5) == 1.0);
  CHECK(rho_bar(1.0) == 0.0);
  CHECK(std::abs(rho_bar(0.75) - 0.5) < 1e-12);
  CHECK(rho_bar_prime(0.5) == 0.0);
  CHECK(rho_bar_prime(1.0) == 0.0);

  CHECK(rho_sat(0.25) == 0.25);
  CHECK(rho_sat(1.0) == 1.0);
  CHECK(rho_sat(2.0) == 1.0);
  CHECK(std::abs(rho_sat_prime(0.4999999) - 1.0) < 1e-5);
  CHECK(std::abs(rho_sat_prime(0.9999999)) < 1e-5);
  for (double t = 0.0; t < 1.2; t += 0.01) {
    CHECK(rho_sat_prime(t) >= -1e-15);
    CHECK(rho_sat(t) <= 1.0 + 1e-15);
  }
  CHECK(rho_sat_over_r(0.0) == 1.0);
  CHECK(std::abs(rho_sat_over_r(1e-12) - 1.0) < 1e-9);
}

TEST_CASE("exact flat spectrum: multiplicities, kernel, gap") {
  auto r = flat_susy_spectrum(1, 1.0, 3);
  REQUIRE(r.eigenvalues.size() == 1 + 2 + 2 + 2);
  CHECK(r.eigenvalues[0] == 0.0);
  CHECK(r.eigenvalues[1] == 2.0);
  CHECK(r.eigenvalues[2] == 2.0);
  CHECK(r.gap == 2.0);
  CHECK(r.kernel_dim == 1);

  CHECK(flat_susy_spectrum(1, 3.0, 1).gap == 6.0);

  // m = 4 at t = 2: level 1 has multiplicity 2m = 8.
  auto r4 = flat_susy_spectrum(4, 2.0, 2);
  int count_l1 = 0;
  for (double ev : r4.eigenvalues)
    if (std::abs(ev - 4.0) < 1e-12) ++count_l1;
  CHECK(count_l1 == 8);
}

TEST_CASE("staggered FD scheme: no doublers, Gaussian kernel, SUSY pairing") {
  auto fd = flat_susy_fd(1.0, 2000, 8.0, 5);
  CHECK(fd.kernel_dim == 1);
  CHECK(std::abs(fd.gap - 2.0) < 1e-3);

  Grid1D g = full_line_grid(2000, 8.0);
  auto l = susy_lowering_matrix(g, flat_weights(1.0, g));
  auto pair = susy_pair_spectra(l, 5);
  CHECK(pair.even.values(0) < 1e-10);
  for (int i = 1; i < 5; ++i) {
    // even sector 0, 2, 4, 6, 8, each simple
    CHECK(std::abs(pair.even.values(i) - 2.0 * i) < 5e-3);
    // nonzero spectrum pairs exactly across the grading
    CHECK(std::abs(pair.even.values(i) - pair.odd.values(i - 1)) < 1e-8);
  }

  Eigen::VectorXd pred(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    pred(i) = flat_ground_state(1.0, g.nodes[i] * g.nodes[i]);
  pred.normalize();
  double overlap = std::abs(pred.dot(fd.kernel.col(0).normalized()));
  CHECK(overlap > 0.9999);
  CHECK(fd.kernel.col(0).sum() > 0);  // positive phase normalization
  CHECK(std::abs(fd.kernel.col(0).norm() * std::sqrt(g.h) - 1.0) < 1e-12);
}

TEST_CASE("pseudo model, m = 1 full line: threshold, kernel, correspondence") {
  OscillatorProblem p;
  p.m = 1;
  p.t = 8.0;
  p.mode = MetricMode::cylindrical_end;
  p.n_radial = 800;
  p.box_radius = 6.0;
  auto r = pseudo_susy_spectrum(p);
  CHECK(r.certified());
  CHECK(r.kernel_dim == 1);
  CHECK(r.threshold_t_min > 1.0);
  CHECK(r.threshold_t_min < 8.0);
  CHECK(std::abs(r.gap - 16.0) < 0.1);

  Grid1D g = full_line_grid(p.n_radial, p.box_radius);
  Eigen::VectorXd pred = predicted_pseudo_kernel(p, g);
  CHECK(restricted_overlap(g, pred, r.kernel.col(0), 0.5) >= 0.999);

  auto corr = kernel_correspondence(g, pred, r.kernel.col(0));
  CHECK(corr.coefficient > 0);
  CHECK(corr.tau_invariance_residual < 1e-9);
  CHECK(end_blocks_repeat(p, g));
  auto self_corr = kernel_correspondence(g, pred, pred);
  CHECK(std::abs(self_corr.coefficient - 1.0) < 1e-12);
}

TEST_CASE("pseudo model below threshold reports a diagnostic") {
  OscillatorProblem p;
  p.m = 1;
  p.t = 0.01;
  p.mode = MetricMode::cylindrical_end;
  p.n_radial = 800;
  p.box_radius = 6.0;
  auto r = pseudo_susy_spectrum(p);
  CHECK(!r.certified());
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].find("kernel not localized") == 0);
}

TEST_CASE("pseudo model, m = 2 radial scheme") {
  OscillatorProblem p;
  p.m = 2;
  p.t = 16.0;
  p.mode = MetricMode::cylindrical_end;
  p.n_radial = 1200;
  p.box_radius = 6.0;
  Grid1D g = radial_grid(p.n_radial, p.box_radius);
  auto l = pseudo_lowering_matrix(p, g, p.t);
  Eigen::VectorXd pred = predicted_pseudo_kernel(p, g);
  CHECK((l * pred.normalized()).norm() < 1e-2);  // continuum kernel nearly annihilated

  auto r = pseudo_susy_spectrum(p);
  CHECK(r.certified());
  CHECK(r.kernel_dim == 1);
  CHECK(std::abs(r.gap - 63.25) < 0.5);
  CHECK(restricted_overlap(g, pred, r.kernel.col(0), 0.5) >= 0.999);
  CHECK(end_blocks_repeat(p, g));
}

TEST_CASE("localization threshold formula") {
  OscillatorProblem p;
  p.m = 1;
  p.t = 8.0;
  p.mode = MetricMode::cylindrical_end;
  Grid1D g = full_line_grid(800, 6.0);
  ThresholdEstimate th = localization_threshold(p, g);
  double a = th.anticommutator_norm, b = th.h_inverse_norm_outside;
  double expect = 4.0 * a * b * b +
                  2.0 * std::sqrt(4.0 * a * a * b * b * b * b + p.lambda_bar * b * b);
  CHECK(std::abs(th.t_min - expect) < 1e-12);
  CHECK(std::abs(th.t_min - 5.605) < 0.1);

  OscillatorProblem p2;
  p2.m = 2;
  p2.t = 16.0;
  p2.mode = MetricMode::cylindrical_end;
  ThresholdEstimate th2 = localization_threshold(p2, radial_grid(1200, 6.0));
  CHECK(std::abs(th2.t_min - 14.739) < 0.2);
}

TEST_CASE("anticommutator is order zero: cutoff commutator decays") {
  OscillatorProblem p;
  p.m = 2;
  p.t = 8.0;
  p.mode = MetricMode::cylindrical_end;
  double c1 = anticommutator_order0_commutator(p, radial_grid(200, 6.0));
  double c2 = anticommutator_order0_commutator(p, radial_grid(400, 6.0));
  double c3 = anticommutator_order0_commutator(p, radial_grid(800, 6.0));
  CHECK(c2 < 0.7 * c1);
  CHECK(c3 < 0.7 * c2);

  OscillatorProblem p1;
  p1.m = 1;
  p1.t = 8.0;
  p1.mode = MetricMode::cylindrical_end;
  double d1 = anticommutator_order0_commutator(p1, full_line_grid(200, 6.0));
  double d2 = anticommutator_order0_commutator(p1, full_line_grid(400, 6.0));
  CHECK(d2 < 0.7 * d1);
}

TEST_CASE("2-D Kronecker sum: kernel is the outer product of 1-D kernels") {
  int n = 120;
  Grid1D g = full_line_grid(n, 6.0);
  auto l = susy_lowering_matrix(g, flat_weights(2.0, g));
  Eigen::SparseMatrix<double> lt = Eigen::SparseMatrix<double>(l.transpose());
  Eigen::SparseMatrix<double> h1 = (lt * l).pruned();
  const int nn = n + 1;
  Eigen::SparseMatrix<double> id(nn, nn);
  id.setIdentity();
  Eigen::SparseMatrix<double> h2 = sparse_kron(h1, id) + sparse_kron(id, h1);
  auto p1 = smallest_eigs_sparse(h1, 1);
  auto p2 = smallest_eigs_sparse(h2, 1, 999);
  Eigen::VectorXd outer(nn * nn);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j) outer(i * nn + j) = p1.vectors(i, 0) * p1.vectors(j, 0);
  outer.normalize();
  Eigen::VectorXd got = p2.vectors.col(0);
  if (outer.dot(got) < 0) got = -got;
  CHECK((outer - got).norm() < 1e-9);
}

TEST_CASE("stabilization homotopy: endpoints, degenerate radius, equivariance") {
  StabilizationHomotopy hom;
  hom.dim_v = 1;
  hom.dim_vp = 1;
  Eigen::VectorXd v1(1), v2(1);
  v1 << 0.0;
  v2 << 0.7;
  Eigen::MatrixXd h = hom(1.0, v1, v2);
  Eigen::MatrixXd expect = dense_kron(StabilizationHomotopy::eps_of(1),
                                      StabilizationHomotopy::h_of(1, rho_sat_over_r(0.7) * v2));
  CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-15);

  v1 << 3.0;
  Eigen::MatrixXd h0 = hom(0.0, v1, v2);
  double joint = std::sqrt(9.0 + 0.49);
  double gamma = rho_sat(joint) / joint;
  Eigen::MatrixXd e0 =
      dense_kron(StabilizationHomotopy::h_of(1, gamma * v1), Eigen::MatrixXd::Identity(2, 2)) +
      dense_kron(StabilizationHomotopy::eps_of(1), StabilizationHomotopy::h_of(1, gamma * v2));
  CHECK((h0 - e0).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::VectorXd a(1), b(1);
  a << 0.31;
  b << -0.82;
  CHECK(hom.equivariance_residual(0.37, a, b) < 1e-12);

  StabilizationHomotopy hom2;
  hom2.dim_v = 2;
  hom2.dim_vp = 1;
  Eigen::VectorXd aa(2), bb(1);
  aa << 0.3, -1.4;
  bb << 0.9;
  CHECK(hom2.equivariance_residual(0.61, aa, bb) < 1e-12);
  Eigen::MatrixXd hh = hom2(0.4, aa, bb);
  CHECK((hh - hh.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}
