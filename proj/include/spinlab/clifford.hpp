#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "core/antilinear.hpp"
#include "exterior.hpp"

namespace spinlab {

template <typename S>
struct FactorInfo {
  int dim = 0;
  std::vector<int> parity;
};

// Graded module with a Clifford family c(v), a Hermitian family h(v), the
// grading involution epsilon and an anti-linear tau. Both families are stored
// through their generator matrices; c(v), h(v) are real-linear in v.
// Invariants (verified by the test suite, exact in rational mode):
//   c(v)^2 = -|v|^2, h(v)^2 = +|v|^2, {c(v), h(w)} = 0,
//   epsilon anti-commutes with c(v) and h(v).
template <typename S>
struct CliffordModule {
  int dim = 0;                     // module dimension
  std::vector<int> parity;        // per basis index, 0 = even, 1 = odd
  int vdim = 0;                    // real dimension of the acting vector space
  std::vector<Matrix<S>> c_gen;   // c(e_k)
  std::vector<Matrix<S>> h_gen;   // h(e_k)
  Op<S> tau;
  std::vector<FactorInfo<S>> factors;

  Matrix<S> epsilon() const {
    Matrix<S> e(dim, dim);
    for (int i = 0; i < dim; ++i) e(i, i) = parity[i] ? S(-1) : S(1);
    return e;
  }

  // v is a real coefficient vector (entries of S with zero imaginary part).
  Matrix<S> c(const std::vector<S>& v) const { return combine(c_gen, v); }
  Matrix<S> h(const std::vector<S>& v) const { return combine(h_gen, v); }

 private:
  Matrix<S> combine(const std::vector<Matrix<S>>& gen, const std::vector<S>& v) const {
    if (static_cast<int>(v.size()) != vdim)
      throw std::invalid_argument("CliffordModule: vector dimension mismatch");
    Matrix<S> m(dim, dim);
    for (int k = 0; k < vdim; ++k)
      if (!is_zero(v[k])) m = m + v[k] * gen[k];
    return m;
  }
};

// Lambda* over the given space with c = wedge - contract, h = wedge + contract
// and tau = plain coefficient conjugation.
template <typename S>
CliffordModule<S> exterior_module(const InnerProductSpace<S>& sp) {
  CliffordModule<S> m;
  m.dim = 1 << sp.dim;
  m.vdim = sp.dim;
  m.parity.resize(m.dim);
  for (int i = 0; i < m.dim; ++i) m.parity[i] = monomial_degree(uint32_t(i)) & 1;
  for (int k = 0; k < sp.dim; ++k) {
    std::vector<S> ek(sp.dim, S(0));
    ek[k] = S(1);
    m.c_gen.push_back(materialize<S>(
        sp.dim, [&](const GradedElement<S>& x) { return clifford_action(ek, x, sp); }));
    m.h_gen.push_back(materialize<S>(
        sp.dim, [&](const GradedElement<S>& x) { return hermitian_action(ek, x, sp); }));
  }
  m.tau = Op<S>::antilinear(Matrix<S>::identity(m.dim));
  m.factors = {{m.dim, m.parity}};
  return m;
}

// Graded tensor product over the direct sum of the acting spaces:
//   c = c1 (x) 1 + eps1 (x) c2,  h = h1 (x) 1 + eps1 (x) h2,
//   tau = tau1 (x) tau2,         eps = eps1 (x) eps2.
template <typename S>
CliffordModule<S> graded_tensor(const CliffordModule<S>& a, const CliffordModule<S>& b) {
  CliffordModule<S> m;
  m.dim = a.dim * b.dim;
  m.vdim = a.vdim + b.vdim;
  m.parity.resize(m.dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < b.dim; ++j) m.parity[i * b.dim + j] = (a.parity[i] + b.parity[j]) & 1;
  Matrix<S> ia = Matrix<S>::identity(a.dim), ib = Matrix<S>::identity(b.dim);
  Matrix<S> ea = a.epsilon();
  for (int k = 0; k < a.vdim; ++k) {
    m.c_gen.push_back(kron(a.c_gen[k], ib));
    m.h_gen.push_back(kron(a.h_gen[k], ib));
  }
  for (int k = 0; k < b.vdim; ++k) {
    m.c_gen.push_back(kron(ea, b.c_gen[k]));
    m.h_gen.push_back(kron(ea, b.h_gen[k]));
  }
  m.tau = tensor(a.tau, b.tau);
  m.factors = a.factors;
  m.factors.insert(m.factors.end(), b.factors.begin(), b.factors.end());
  return m;
}

template <typename S>
CliffordModule<S> graded_tensor_many(const std::vector<CliffordModule<S>>& parts) {
  if (parts.empty()) throw std::invalid_argument("graded_tensor_many: no factors");
  CliffordModule<S> m = parts[0];
  for (size_t k = 1; k < parts.size(); ++k) m = graded_tensor(m, parts[k]);
  return m;
}

// Tensor module assembled with the epsilon-prefix rule taken in the priority
// given by `order` (order[0] is assembled first), while the underlying space
// keeps the original kron layout. order must be a permutation of 0..k-1.
template <typename S>
CliffordModule<S> graded_tensor_ordered(const std::vector<CliffordModule<S>>& parts,
                                        const std::vector<int>& order) {
  size_t k = parts.size();
  if (order.size() != k) throw std::invalid_argument("graded_tensor_ordered: bad permutation");
  std::vector<bool> seen(k, false);
  for (int o : order) {
    if (o < 0 || o >= static_cast<int>(k) || seen[o])
      throw std::invalid_argument("graded_tensor_ordered: bad permutation");
    seen[o] = true;
  }
  // position of each factor in the priority order
  std::vector<int> pos(k);
  for (size_t p = 0; p < k; ++p) pos[order[p]] = static_cast<int>(p);

  CliffordModule<S> m;
  m.dim = 1;
  m.vdim = 0;
  for (const auto& f : parts) {
    m.dim *= f.dim;
    m.vdim += f.vdim;
  }
  m.parity.assign(m.dim, 0);
  {
    std::vector<int> radix(k);
    for (size_t f = 0; f < k; ++f) radix[f] = parts[f].dim;
    for (int i = 0; i < m.dim; ++i) {
      int rest = i, p = 0;
      for (int f = static_cast<int>(k) - 1; f >= 0; --f) {
        p += parts[f].parity[rest % radix[f]];
        rest /= radix[f];
      }
      m.parity[i] = p & 1;
    }
  }
  auto lift = [&](int which, const Matrix<S>& g, bool prefix_eps) {
    Matrix<S> acc(1, 1);
    acc(0, 0) = S(1);
    for (size_t f = 0; f < k; ++f) {
      if (static_cast<int>(f) == which)
        acc = kron(acc, g);
      else if (prefix_eps && pos[f] < pos[which])
        acc = kron(acc, parts[f].epsilon());
      else
        acc = kron(acc, Matrix<S>::identity(parts[f].dim));
    }
    return acc;
  };
  for (size_t f = 0; f < k; ++f)
    for (int g = 0; g < parts[f].vdim; ++g) {
      m.c_gen.push_back(lift(static_cast<int>(f), parts[f].c_gen[g], true));
      m.h_gen.push_back(lift(static_cast<int>(f), parts[f].h_gen[g], true));
    }
  Op<S> t = parts[0].tau;
  for (size_t f = 1; f < k; ++f) t = tensor(t, parts[f].tau);
  m.tau = t;
  for (const auto& f : parts)
    m.factors.insert(m.factors.end(), f.factors.begin(), f.factors.end());
  return m;
}

// Composition of reorderings: apply `second` first, then `first` expressed
// relative to the already-permuted list.
inline std::vector<int> compose_orders(const std::vector<int>& first,
                                       const std::vector<int>& second) {
  std::vector<int> r(first.size());
  for (size_t i = 0; i < first.size(); ++i) r[i] = second[first[i]];
  return r;
}

// The reordering sign operator G: diagonal, acting by (-1) for every factor
// pair that is odd in the basis element and inverted by the permutation.
// G conjugates the standard assembly into the `order` assembly and satisfies
// G(compose_orders(s, p)) = G(s) * G(p).
template <typename S>
Matrix<S> reorder_operator(const std::vector<FactorInfo<S>>& factors,
                           const std::vector<int>& order) {
  size_t k = factors.size();
  if (order.size() != k) throw std::invalid_argument("reorder_operator: bad permutation");
  std::vector<int> pos(k, -1);
  for (size_t p = 0; p < k; ++p) {
    if (order[p] < 0 || order[p] >= static_cast<int>(k) || pos[order[p]] != -1)
      throw std::invalid_argument("reorder_operator: bad permutation");
    pos[order[p]] = static_cast<int>(p);
  }
  int dim = 1;
  for (const auto& f : factors) dim *= f.dim;
  Matrix<S> g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    int rest = i;
    std::vector<int> par(k);
    for (int f = static_cast<int>(k) - 1; f >= 0; --f) {
      par[f] = factors[f].parity[rest % factors[f].dim];
      rest /= factors[f].dim;
    }
    int inv = 0;
    for (size_t a = 0; a < k; ++a)
      for (size_t b = a + 1; b < k; ++b)
        if (pos[a] > pos[b] && par[a] && par[b]) ++inv;
    g(i, i) = (inv & 1) ? S(-1) : S(1);
  }
  return g;
}

template <typename S>
Matrix<S> reorder_operator(const CliffordModule<S>& m, const std::vector<int>& order) {
  return reorder_operator(m.factors, order);
}

}  // namespace spinlab
