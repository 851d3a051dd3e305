#pragma once

// Distance d_H on the Grassmannian of a (discretized) Hilbert space:
// d_H(E, E') is the infimum over d such that every orthonormal basis of one
// subspace admits an orthonormal basis of the other within sqrt(sum |e_i -
// e'_i|^2) <= d, and symmetrically. For a fixed basis Q1 W the inner minimum
// over bases Q2 V is 2r - 2 ||W^T Q1^T Q2||_* (von Neumann), and the nuclear
// norm is invariant under the orthogonal W, so the sup-min collapses to the
// closed form sqrt(2 sum_i (1 - cos theta_i)) in the principal angles.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spinlab {

// Thin orthonormal basis of the column span; throws on rank deficiency.
inline Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& v) {
  if (v.cols() == 0 || v.rows() < v.cols())
    throw std::invalid_argument("orthonormal_basis: need 1 <= cols <= rows");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  Eigen::MatrixXd r = qr.matrixQR().topRows(v.cols()).triangularView<Eigen::Upper>();
  double scale = r.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    if (std::abs(r(j, j)) < 1e-12 * (scale > 0 ? scale : 1.0))
      throw std::invalid_argument("orthonormal_basis: rank-deficient span");
  return qr.householderQ() * Eigen::MatrixXd::Identity(v.rows(), v.cols());
}

// Cosines of the principal angles between equal-dimensional spans,
// descending, clamped to [0, 1].
inline Eigen::VectorXd principal_angle_cosines(const Eigen::MatrixXd& e1,
                                               const Eigen::MatrixXd& e2) {
  if (e1.rows() != e2.rows() || e1.cols() != e2.cols())
    throw std::invalid_argument("principal_angle_cosines: dimension mismatch");
  Eigen::MatrixXd q1 = orthonormal_basis(e1);
  Eigen::MatrixXd q2 = orthonormal_basis(e2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q1.transpose() * q2);
  Eigen::VectorXd c = svd.singularValues();
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = std::clamp(c(i), 0.0, 1.0);
  return c;
}

struct GrassmannReport {
  Eigen::VectorXd cosines;      // principal angle cosines, descending
  double lower_bound = 0.0;     // principal-angle closed form
  double upper_bound = 0.0;     // greedy matching of the principal bases
  double exact_small_r = -1.0;  // r <= 3: sup over sampled O(r) frames
  double distance = 0.0;
};

namespace detail {

// Deterministic sample of O(r) for r <= 3: rotation grids in each plane,
// with and without a reflection.
inline std::vector<Eigen::MatrixXd> orthogonal_samples(int r) {
  std::vector<Eigen::MatrixXd> out;
  auto push_with_reflection = [&](const Eigen::MatrixXd& w) {
    out.push_back(w);
    Eigen::MatrixXd f = w;
    f.col(0) = -f.col(0);
    out.push_back(f);
  };
  if (r == 1) {
    push_with_reflection(Eigen::MatrixXd::Identity(1, 1));
    return out;
  }
  auto givens = [&](int i, int j, double th) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(r, r);
    g(i, i) = std::cos(th);
    g(j, j) = std::cos(th);
    g(i, j) = -std::sin(th);
    g(j, i) = std::sin(th);
    return g;
  };
  const int steps = (r == 2) ? 24 : 8;
  for (int a = 0; a < steps; ++a) {
    double ta = 2.0 * M_PI * a / steps;
    if (r == 2) {
      push_with_reflection(givens(0, 1, ta));
      continue;
    }
    for (int b = 0; b < steps; ++b)
      for (int c = 0; c < steps; ++c) {
        double tb = M_PI * b / steps, tc = 2.0 * M_PI * c / steps;
        push_with_reflection(givens(0, 1, ta) * givens(0, 2, tb) * givens(0, 1, tc));
      }
  }
  return out;
}

inline double nuclear_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().sum();
}

}  // namespace detail

inline GrassmannReport grassmann_distance_report(const Eigen::MatrixXd& e1,
                                                 const Eigen::MatrixXd& e2) {
  if (e1.rows() != e2.rows() || e1.cols() != e2.cols())
    throw std::invalid_argument("grassmann_distance: dimension mismatch");
  GrassmannReport rep;
  Eigen::MatrixXd q1 = orthonormal_basis(e1);
  Eigen::MatrixXd q2 = orthonormal_basis(e2);
  const int r = static_cast<int>(q1.cols());
  Eigen::MatrixXd m = q1.transpose() * q2;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  rep.cosines = svd.singularValues();
  double s = 0.0;
  for (int i = 0; i < r; ++i) s += 1.0 - std::clamp(rep.cosines(i), 0.0, 1.0);
  rep.lower_bound = std::sqrt(2.0 * s);

  // Greedy matching between the principal bases (sign-resolved); the pairs
  // are bi-orthogonal, so this lands exactly on the closed form.
  Eigen::MatrixXd p1 = q1 * svd.matrixU();
  Eigen::MatrixXd p2 = q2 * svd.matrixV();
  std::vector<bool> used(r, false);
  double cost = 0.0;
  for (int i = 0; i < r; ++i) {
    int best = -1;
    double best_dot = -1.0;
    for (int j = 0; j < r; ++j) {
      if (used[j]) continue;
      double d = std::abs(p1.col(i).dot(p2.col(j)));
      if (d > best_dot) {
        best_dot = d;
        best = j;
      }
    }
    used[best] = true;
    cost += 2.0 - 2.0 * std::min(best_dot, 1.0);
  }
  rep.upper_bound = std::sqrt(std::max(0.0, cost));

  if (r <= 3) {
    double sup = 0.0;
    for (const Eigen::MatrixXd& w : detail::orthogonal_samples(r)) {
      double inner = 2.0 * r - 2.0 * detail::nuclear_norm(w.transpose() * m);
      sup = std::max(sup, inner);
    }
    rep.exact_small_r = std::sqrt(std::max(0.0, sup));
  }
  rep.distance = rep.upper_bound;
  return rep;
}

inline double grassmann_distance(const Eigen::MatrixXd& e1, const Eigen::MatrixXd& e2) {
  return grassmann_distance_report(e1, e2).distance;
}

}  // namespace spinlab
