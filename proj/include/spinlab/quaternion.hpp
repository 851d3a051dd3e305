#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "spinlab/core/dense.hpp"
#include "spinlab/core/scalar.hpp"

namespace spinlab {

// Quaternion q = w + x i + y j + z k.
struct Quat {
  double w = 0, x = 0, y = 0, z = 0;

  friend Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quat operator+(const Quat& a, const Quat& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quat operator*(double s, const Quat& a) {
    return {s * a.w, s * a.x, s * a.y, s * a.z};
  }
  Quat conj() const { return {w, -x, -y, -z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  Quat normalized() const {
    double n = norm();
    if (n == 0) throw std::invalid_argument("Quat: cannot normalize zero");
    return {w / n, x / n, y / n, z / n};
  }
};

inline Quat sample_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Quat q{g(rng), g(rng), g(rng), g(rng)};
  while (q.norm() < 1e-6) q = Quat{g(rng), g(rng), g(rng), g(rng)};
  return q.normalized();
}

// Right-multiplication matrices on H^n = R^{4n} in the basis
// (e_1, e_1 i, e_1 j, e_1 k, e_2, ...). Columns are images; composition
// convention: applying R_i first then R_j equals R_k, i.e. Rj_mat * Ri_mat
// = Rk_mat (right action reverses products: (v i) j = v (ij)).
template <typename S>
Matrix<S> right_mult_matrix(int n, const std::array<std::array<int, 4>, 4>& block) {
  Matrix<S> m(4 * n, 4 * n);
  for (int l = 0; l < n; ++l)
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r)
        if (block[r][c] != 0) m(4 * l + r, 4 * l + c) = S(block[r][c]);
  return m;
}

template <typename S>
Matrix<S> right_i_matrix(int n) {
  return right_mult_matrix<S>(n, {{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}}});
}
template <typename S>
Matrix<S> right_j_matrix(int n) {
  return right_mult_matrix<S>(n, {{{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}}});
}
template <typename S>
Matrix<S> right_k_matrix(int n) {
  return right_mult_matrix<S>(n, {{{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}}});
}

// Quaternionic vector space H^n as R^{4n} with its right multiplications.
// The metric is the standard one, invariant under all three (Pin(2) sits
// inside the unit quaternions acting this way).
template <typename S>
struct QuaternionicSpace {
  int n = 0;
  Matrix<S> ri, rj, rk;

  explicit QuaternionicSpace(int quat_dim)
      : n(quat_dim),
        ri(right_i_matrix<S>(quat_dim)),
        rj(right_j_matrix<S>(quat_dim)),
        rk(right_k_matrix<S>(quat_dim)) {
    if (quat_dim < 0) throw std::invalid_argument("QuaternionicSpace: negative dim");
  }
  int real_dim() const { return 4 * n; }

  Matrix<S> right_mult(const Quat& q) const {
    Matrix<S> m = Matrix<S>::identity(real_dim());
    // Exact only for rational q components; numeric S is the common case.
    return S(q.w) * m + S(q.x) * ri + S(q.y) * rj + S(q.z) * rk;
  }
};

// Left multiplication by the unit quaternion b on q = z + j w, written in
// the complex coordinates (z, w). This is the standard SU(2) form.
inline Matrix<CDbl> su2_from_quat(const Quat& b) {
  CDbl b1(b.w, b.x), b2(b.y, -b.z);
  Matrix<CDbl> m(2, 2);
  m(0, 0) = b1;
  m(0, 1) = -std::conj(b2);
  m(1, 0) = b2;
  m(1, 1) = std::conj(b1);
  return m;
}

inline Quat quat_from_su2(const Matrix<CDbl>& m) {
  if (m.rows() != 2 || m.cols() != 2) throw std::invalid_argument("quat_from_su2: need 2x2");
  CDbl b1 = m(0, 0), b2 = m(1, 0);
  return Quat{b1.real(), b1.imag(), b2.real(), -b2.imag()};
}

// Orthonormal quaternionic basis sampled at random: real Gram-Schmidt of a
// Gaussian vector against the span of the quadruples accepted so far, then
// completion of the new quadruple by the right multiplications (the span of
// the previous quadruples is R-invariant, so the whole quadruple is
// automatically orthogonal to it; within a quadruple orthogonality follows
// from skewness of R_i, R_j, R_k). Columns: (v_1, v_1 i, v_1 j, v_1 k, ...).
inline Matrix<double> sample_spn_basis(int n, std::mt19937_64& rng) {
  const int d = 4 * n;
  QuaternionicSpace<double> hs(n);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix<double> basis(d, d);
  std::vector<std::vector<double>> cols;
  for (int l = 0; l < n; ++l) {
    std::vector<double> v(d);
    for (;;) {
      for (int i = 0; i < d; ++i) v[i] = g(rng);
      for (const auto& c : cols) {
        double dot = 0;
        for (int i = 0; i < d; ++i) dot += c[i] * v[i];
        for (int i = 0; i < d; ++i) v[i] -= dot * c[i];
      }
      double nrm2 = 0;
      for (int i = 0; i < d; ++i) nrm2 += v[i] * v[i];
      if (nrm2 > 1e-8) {
        double nrm = std::sqrt(nrm2);
        for (int i = 0; i < d; ++i) v[i] /= nrm;
        break;
      }
    }
    std::vector<std::vector<double>> quad{v, hs.ri.apply(v), hs.rj.apply(v), hs.rk.apply(v)};
    for (int c = 0; c < 4; ++c) {
      for (int r = 0; r < d; ++r) basis(r, 4 * l + c) = quad[c][r];
      cols.push_back(quad[c]);
    }
  }
  return basis;
}

}  // namespace spinlab
