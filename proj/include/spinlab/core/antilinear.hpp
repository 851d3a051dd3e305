#pragma once

#include <stdexcept>

#include "dense.hpp"

namespace spinlab {

// Possibly anti-linear operator: x -> m * x        (conj == false)
//                                x -> m * conj(x)  (conj == true)
// Composition tracks the flag so tau^2 bookkeeping stays exact.
template <typename S>
struct Op {
  Matrix<S> m;
  bool conj = false;

  static Op linear(Matrix<S> mat) { return {std::move(mat), false}; }
  static Op antilinear(Matrix<S> mat) { return {std::move(mat), true}; }
  static Op identity(int n) { return {Matrix<S>::identity(n), false}; }

  std::vector<S> apply(const std::vector<S>& x) const {
    if (!conj) return m.apply(x);
    std::vector<S> xc(x.size());
    for (size_t k = 0; k < x.size(); ++k) xc[k] = conj_of(x[k]);
    return m.apply(xc);
  }

  // (a o b)(x) = a(b(x))
  friend Op compose(const Op& a, const Op& b) {
    Matrix<S> rhs = a.conj ? b.m.conjugate() : b.m;
    return {a.m * rhs, a.conj != b.conj};
  }

  friend Op tensor(const Op& a, const Op& b) {
    if (a.conj != b.conj)
      throw std::invalid_argument("Op::tensor requires equal linearity flags");
    return {kron(a.m, b.m), a.conj};
  }

  friend bool operator==(const Op& a, const Op& b) { return a.conj == b.conj && a.m == b.m; }
};

}  // namespace spinlab
