#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <random>
#include <stdexcept>
#include <vector>

namespace spinlab {

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, matching order
};

// Canonical eigenvector sign: first component with |v_i| > tol is positive.
inline void fix_vector_signs(Eigen::MatrixXd& vecs, double tol = 1e-12) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
    for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
      double v = vecs(r, c);
      if (v > tol) break;
      if (v < -tol) {
        vecs.col(c) = -vecs.col(c);
        break;
      }
    }
  }
}

// Full dense symmetric eigendecomposition, ascending, canonical signs.
inline EigenPairs sym_eigs(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eigs: eigensolver failed to converge");
  EigenPairs out{solver.eigenvalues(), solver.eigenvectors()};
  fix_vector_signs(out.vectors);
  return out;
}

// Smallest k eigenpairs of a symmetric positive semidefinite sparse matrix
// via inverse subspace iteration with Rayleigh-Ritz extraction. The shift
// regularizes a possibly singular A; Ritz values are of A itself.
inline EigenPairs smallest_eigs_sparse(const Eigen::SparseMatrix<double>& a,
                                       int k, unsigned seed = 12345,
                                       int max_iter = 200,
                                       double tol = 1e-11) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("smallest_eigs_sparse: square matrix required");
  if (k <= 0 || k > n) throw std::invalid_argument("smallest_eigs_sparse: bad k");
  const int m = std::min<Eigen::Index>(n, k + 8);  // oversampled block

  Eigen::SparseMatrix<double> shifted = a;
  const double shift = 1e-10;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(shifted);
  if (chol.info() != Eigen::Success)
    throw std::runtime_error("smallest_eigs_sparse: factorization failed");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = gauss(rng);

  Eigen::VectorXd ritz;
  Eigen::MatrixXd basis;
  for (int it = 0; it < max_iter; ++it) {
    x = chol.solve(x);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    Eigen::MatrixXd aq = a * q;
    Eigen::MatrixXd small = q.transpose() * aq;
    small = 0.5 * (small + small.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(small);
    basis = q * rr.eigenvectors();
    ritz = rr.eigenvalues();
    x = basis;
    // Converge on the actual residuals of the wanted pairs, not on Ritz
    // value deltas (values settle long before the vectors do).
    Eigen::MatrixXd abasis = aq * rr.eigenvectors().leftCols(k);
    double resid = 0.0;
    for (int c = 0; c < k; ++c)
      resid = std::max(resid, (abasis.col(c) - ritz(c) * basis.col(c)).norm());
    double scale = 1.0 + ritz.head(k).cwiseAbs().maxCoeff();
    if (resid < tol * scale && it >= 3) break;
  }
  EigenPairs out;
  out.values = ritz.head(k);
  out.vectors = basis.leftCols(k);
  fix_vector_signs(out.vectors);
  return out;
}

// Dense Kronecker product.
inline Eigen::MatrixXd dense_kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Sparse Kronecker product.
inline Eigen::SparseMatrix<double> sparse_kron(const Eigen::SparseMatrix<double>& a,
                                               const Eigen::SparseMatrix<double>& b) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (Eigen::SparseMatrix<double>::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (Eigen::SparseMatrix<double>::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  Eigen::SparseMatrix<double> out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// Residual check ||A v - mu v|| per column; used by spectral result types.
template <typename Mat>
double max_eigen_residual(const Mat& a, const EigenPairs& pairs) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < pairs.vectors.cols(); ++c) {
    double r = (a * pairs.vectors.col(c) - pairs.values(c) * pairs.vectors.col(c)).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace spinlab
