#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "core/dense.hpp"
#include "core/scalar.hpp"

namespace spinlab {

// Finite-dimensional inner-product space. `neg` flags a negative-definite
// pairing (the metric matrix itself stays positive-definite); `herm` selects
// the Hermitian pairing, which conjugates the contracting vector's
// coefficients.
template <typename S>
struct InnerProductSpace {
  int dim = 0;
  Matrix<S> metric;
  bool neg = false;
  bool herm = false;

  static InnerProductSpace orthonormal(int d, bool herm = false, bool neg = false) {
    return {d, Matrix<S>::identity(d), neg, herm};
  }

  // <u, v> with the sign flag applied; conjugates u in Hermitian mode.
  S pairing(const std::vector<S>& u, const std::vector<S>& v) const {
    S acc(0);
    for (int i = 0; i < dim; ++i) {
      S ui = herm ? conj_of(u[i]) : u[i];
      if (is_zero(ui)) continue;
      for (int j = 0; j < dim; ++j) acc += ui * metric(i, j) * v[j];
    }
    return neg ? -acc : acc;
  }
};

// Element of the exterior algebra over a `dim`-generator space, stored as a
// sparse map from basis-subset bitmask to coefficient. Monomial order is
// lexicographic by mask value; all signs are insertion-sort counts in that
// order.
template <typename S>
struct GradedElement {
  int dim = 0;
  std::map<uint32_t, S> coef;

  GradedElement() = default;
  explicit GradedElement(int d) : dim(d) {}

  static GradedElement unit(int d) {
    GradedElement e(d);
    e.coef[0] = S(1);
    return e;
  }
  static GradedElement monomial(int d, uint32_t mask, S c = S(1)) {
    GradedElement e(d);
    if (!is_zero(c)) e.coef[mask] = std::move(c);
    return e;
  }

  void add_term(uint32_t mask, const S& c) {
    auto it = coef.find(mask);
    if (it == coef.end()) {
      if (!is_zero(c)) coef.emplace(mask, c);
    } else {
      it->second += c;
      if (is_zero(it->second)) coef.erase(it);
    }
  }

  friend GradedElement operator+(const GradedElement& a, const GradedElement& b) {
    GradedElement r = a;
    for (const auto& [m, c] : b.coef) r.add_term(m, c);
    return r;
  }
  friend GradedElement operator-(const GradedElement& a, const GradedElement& b) {
    GradedElement r = a;
    for (const auto& [m, c] : b.coef) r.add_term(m, -c);
    return r;
  }
  friend GradedElement operator*(const S& s, const GradedElement& a) {
    GradedElement r(a.dim);
    if (is_zero(s)) return r;
    for (const auto& [m, c] : a.coef) r.add_term(m, s * c);
    return r;
  }
  friend bool operator==(const GradedElement& a, const GradedElement& b) {
    return a.dim == b.dim && a.coef == b.coef;
  }

  bool is_zero_elem() const { return coef.empty(); }

  std::vector<S> to_vector() const {
    std::vector<S> v(size_t(1) << dim, S(0));
    for (const auto& [m, c] : coef) v[m] = c;
    return v;
  }
  static GradedElement from_vector(int d, const std::vector<S>& v) {
    GradedElement e(d);
    for (uint32_t m = 0; m < v.size(); ++m)
      if (!is_zero(v[m])) e.coef[m] = v[m];
    return e;
  }
};

inline int monomial_degree(uint32_t mask) { return std::popcount(mask); }

// Sign of e_mask_a wedge e_mask_b as an insertion-sort count; 0 on overlap.
inline int wedge_sign(uint32_t a, uint32_t b) {
  if (a & b) return 0;
  int inv = 0;
  while (b) {
    uint32_t low = b & (~b + 1);
    int i = std::countr_zero(low);
    inv += std::popcount(a >> (i + 1));
    b ^= low;
  }
  return (inv & 1) ? -1 : 1;
}

template <typename S>
GradedElement<S> wedge(const GradedElement<S>& a, const GradedElement<S>& b) {
  if (a.dim != b.dim) throw std::invalid_argument("wedge: mismatched ambient spaces");
  GradedElement<S> r(a.dim);
  for (const auto& [ma, ca] : a.coef)
    for (const auto& [mb, cb] : b.coef) {
      int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      S term = ca * cb;
      if (s < 0) term = -term;
      r.add_term(ma | mb, term);
    }
  return r;
}

// Wedge by the degree-1 element with coefficient vector z.
template <typename S>
GradedElement<S> wedge_vector(const std::vector<S>& z, const GradedElement<S>& a) {
  GradedElement<S> r(a.dim);
  for (int i = 0; i < a.dim; ++i) {
    if (is_zero(z[i])) continue;
    uint32_t gi = uint32_t(1) << i;
    for (const auto& [m, c] : a.coef) {
      int s = wedge_sign(gi, m);
      if (s == 0) continue;
      S term = z[i] * c;
      if (s < 0) term = -term;
      r.add_term(gi | m, term);
    }
  }
  return r;
}

// Interior product by the covector lambda (a degree -1 graded derivation):
// lambda \contract (e_{i1} ^ ... ^ e_{ik}) = sum_r (-1)^{r-1} lambda_{ir} (drop e_{ir}).
template <typename S>
GradedElement<S> contract_covector(const std::vector<S>& lambda, const GradedElement<S>& a) {
  GradedElement<S> r(a.dim);
  for (const auto& [m, c] : a.coef) {
    uint32_t rest = m;
    int pos = 0;
    while (rest) {
      uint32_t low = rest & (~rest + 1);
      int i = std::countr_zero(low);
      if (!is_zero(lambda[i])) {
        S term = lambda[i] * c;
        if (pos & 1) term = -term;
        r.add_term(m ^ low, term);
      }
      rest ^= low;
      ++pos;
    }
  }
  return r;
}

// Metric-dual covector of v: lambda_i = sgn * sum_j conj?(v_j) metric(j, i).
template <typename S>
std::vector<S> dual_covector(const InnerProductSpace<S>& sp, const std::vector<S>& v) {
  std::vector<S> lambda(sp.dim, S(0));
  for (int i = 0; i < sp.dim; ++i) {
    S acc(0);
    for (int j = 0; j < sp.dim; ++j) {
      S vj = sp.herm ? conj_of(v[j]) : v[j];
      if (!is_zero(vj)) acc += vj * sp.metric(j, i);
    }
    lambda[i] = sp.neg ? -acc : acc;
  }
  return lambda;
}

// v \contract a, dual to wedge via the (possibly signed, possibly Hermitian)
// pairing of the supplied space.
template <typename S>
GradedElement<S> contract(const std::vector<S>& v, const GradedElement<S>& a,
                          const InnerProductSpace<S>& sp) {
  if (sp.dim != a.dim) throw std::invalid_argument("contract: mismatched ambient spaces");
  return contract_covector(dual_covector(sp, v), a);
}

// c(v) = v^ - v_contract and h(v) = v^ + v_contract on the exterior algebra.
template <typename S>
GradedElement<S> clifford_action(const std::vector<S>& v, const GradedElement<S>& a,
                                 const InnerProductSpace<S>& sp) {
  return wedge_vector(v, a) - contract(v, a, sp);
}
template <typename S>
GradedElement<S> hermitian_action(const std::vector<S>& v, const GradedElement<S>& a,
                                  const InnerProductSpace<S>& sp) {
  return wedge_vector(v, a) + contract(v, a, sp);
}

// Dense matrix of a graded-element endomorphism, columns indexed by monomials
// in mask order.
template <typename S, typename F>
Matrix<S> materialize(int dim, F&& op) {
  int n = 1 << dim;
  Matrix<S> m(n, n);
  for (int j = 0; j < n; ++j) {
    GradedElement<S> col = op(GradedElement<S>::monomial(dim, uint32_t(j)));
    for (const auto& [mask, c] : col.coef) m(int(mask), j) = c;
  }
  return m;
}

}  // namespace spinlab
