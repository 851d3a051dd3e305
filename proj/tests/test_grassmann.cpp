// Grassmann distance: closed forms, bound agreement, metric axioms.

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "spinlab/grassmann.hpp"

using namespace spinlab;

namespace {

Eigen::MatrixXd unit_col(int n, int i) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, 1);
  e(i, 0) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("identical subspaces have distance zero") {
  Eigen::MatrixXd q(4, 2);
  q << 1, 0, 0, 1, 0, 0, 0, 0;
  GrassmannReport rep = grassmann_distance_report(q, q);
  CHECK(rep.distance < 1e-12);
  CHECK(rep.lower_bound < 1e-12);
  // sqrt amplifies fp noise near zero: sqrt(1e-15) ~ 3e-8
  CHECK(std::abs(rep.exact_small_r - rep.lower_bound) < 1e-7);
}

TEST_CASE("closed forms: orthogonal lines and a pi/6 rotation") {
  CHECK(std::abs(grassmann_distance(unit_col(3, 0), unit_col(3, 1)) - std::sqrt(2.0)) < 1e-12);

  Eigen::MatrixXd a(2, 1), b(2, 1);
  a << 1, 0;
  b << std::cos(M_PI / 6), std::sin(M_PI / 6);
  GrassmannReport rot = grassmann_distance_report(a, b);
  CHECK(std::abs(rot.distance - 2.0 * std::sin(M_PI / 12)) < 1e-12);
  CHECK(std::abs(rot.distance - 0.517638090205042) < 1e-12);
  CHECK(std::abs(rot.exact_small_r - rot.distance) < 1e-9);
}

TEST_CASE("bounds coincide, metric axioms, ordered cosines") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rand_mat = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng);
    return m;
  };
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd e1 = rand_mat(10, 3), e2 = rand_mat(10, 3), e3 = rand_mat(10, 3);
    GrassmannReport r12 = grassmann_distance_report(e1, e2);
    CHECK(std::abs(r12.upper_bound - r12.lower_bound) < 1e-10);
    CHECK(std::abs(r12.exact_small_r - r12.lower_bound) < 1e-8);
    CHECK(std::abs(grassmann_distance(e2, e1) - r12.distance) < 1e-10);  // symmetry
    double d13 = grassmann_distance(e1, e3), d23 = grassmann_distance(e2, e3);
    CHECK(d13 <= r12.distance + d23 + 1e-9);  // triangle inequality
    Eigen::VectorXd cosines = principal_angle_cosines(e1, e2);
    for (int i = 1; i < cosines.size(); ++i) CHECK(cosines(i) <= cosines(i - 1) + 1e-14);
    CHECK(cosines.minCoeff() >= 0.0);
    CHECK(cosines.maxCoeff() <= 1.0);
  }
}

TEST_CASE("input validation") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rand_mat = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng);
    return m;
  };
  CHECK_THROWS_AS(grassmann_distance(rand_mat(5, 2), rand_mat(5, 3)), std::invalid_argument);

  Eigen::MatrixXd sing(4, 2);
  sing << 1, 1, 1, 1, 0, 0, 0, 0;
  CHECK_THROWS_AS(orthonormal_basis(sing), std::invalid_argument);
}
