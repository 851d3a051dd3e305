#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scalar.hpp"

namespace spinlab {

// Minimal dense matrix over an arbitrary scalar. Used for the exact-arithmetic
// identity checks; numeric spectral work goes through Eigen instead.
template <typename S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols, S(0)) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }
  static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

  int rows() const { return r_; }
  int cols() const { return c_; }

  S& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
  const S& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

  friend Matrix operator+(const Matrix& x, const Matrix& y) {
    check_same_shape(x, y);
    Matrix z(x.r_, x.c_);
    for (size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = x.a_[k] + y.a_[k];
    return z;
  }
  friend Matrix operator-(const Matrix& x, const Matrix& y) {
    check_same_shape(x, y);
    Matrix z(x.r_, x.c_);
    for (size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = x.a_[k] - y.a_[k];
    return z;
  }
  friend Matrix operator*(const S& s, const Matrix& x) {
    Matrix z(x.r_, x.c_);
    for (size_t k = 0; k < x.a_.size(); ++k) z.a_[k] = s * x.a_[k];
    return z;
  }
  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.c_ != y.r_) throw std::invalid_argument("Matrix::mul shape mismatch");
    Matrix z(x.r_, y.c_);
    for (int i = 0; i < x.r_; ++i)
      for (int k = 0; k < x.c_; ++k) {
        const S& v = x(i, k);
        if (is_zero(v)) continue;
        for (int j = 0; j < y.c_; ++j) z(i, j) += v * y(k, j);
      }
    return z;
  }
  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_;
  }
  friend bool operator!=(const Matrix& x, const Matrix& y) { return !(x == y); }

  Matrix transpose() const {
    Matrix z(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) z(j, i) = (*this)(i, j);
    return z;
  }
  Matrix conjugate() const {
    Matrix z(r_, c_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) z(i, j) = conj_of((*this)(i, j));
    return z;
  }
  Matrix dagger() const { return conjugate().transpose(); }

  bool is_zero_matrix() const {
    for (const S& v : a_)
      if (!is_zero(v)) return false;
    return true;
  }

  // Largest entry magnitude, as a double. Meaningful in numeric mode and as a
  // crude deviation measure in exact mode.
  double max_abs() const {
    double m = 0.0;
    for (const S& v : a_) {
      double t = abs2_dbl(v);
      if (t > m) m = t;
    }
    return std::sqrt(m);
  }

  std::vector<S> apply(const std::vector<S>& x) const {
    assert(static_cast<int>(x.size()) == c_);
    std::vector<S> y(r_, S(0));
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j)
        if (!is_zero((*this)(i, j))) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix z(x.r_ * y.r_, x.c_ * y.c_);
    for (int i = 0; i < x.r_; ++i)
      for (int j = 0; j < x.c_; ++j) {
        if (is_zero(x(i, j))) continue;
        for (int p = 0; p < y.r_; ++p)
          for (int q = 0; q < y.c_; ++q)
            z(i * y.r_ + p, j * y.c_ + q) = x(i, j) * y(p, q);
      }
    return z;
  }

 private:
  static void check_same_shape(const Matrix& x, const Matrix& y) {
    if (x.r_ != y.r_ || x.c_ != y.c_) throw std::invalid_argument("Matrix shape mismatch");
  }
  int r_ = 0, c_ = 0;
  std::vector<S> a_;
};

template <typename S>
Matrix<CDbl> to_cdbl_matrix(const Matrix<S>& m) {
  Matrix<CDbl> z(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) z(i, j) = to_cdbl(m(i, j));
  return z;
}

}  // namespace spinlab
