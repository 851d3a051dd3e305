#pragma once

// The two irreducible Cl(V ⊕ V⁻) modules carried by a quaternionic space V:
//   S0 = Λ*_C V ⊗_C Λ*_C V   (V read as C^{2n} through right-i)
//   S1 = Λ*_R V ⊗_R C
// with generator families c (Clifford, square -1) and h (Hermitian, square
// +1), the anti-linear right-j symmetry τ, and the canonical intertwiner
// F : S0 → S1. All identities here are exact over complex rationals.

#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinlab/clifford.hpp"
#include "spinlab/core/antilinear.hpp"
#include "spinlab/core/dense.hpp"
#include "spinlab/core/scalar.hpp"
#include "spinlab/exterior.hpp"
#include "spinlab/quaternion.hpp"

namespace spinlab {

template <typename S>
using SparseVec = std::map<std::uint32_t, S>;

namespace detail {

inline int sgn_below(std::uint32_t mask, int pos) {
  return std::popcount(mask & ((1u << pos) - 1u)) % 2 ? -1 : 1;
}

template <typename S>
void add_sparse(SparseVec<S>& out, std::uint32_t key, const S& val) {
  auto it = out.find(key);
  if (it == out.end()) {
    if (!is_zero(val)) out.emplace(key, val);
    return;
  }
  it->second = it->second + val;
  if (is_zero(it->second)) out.erase(it);
}

// Signed generator permutation applied to a monomial: images of the set
// bits in ascending order, product of per-generator signs, then the
// inversion parity of the image sequence.
inline std::pair<int, std::uint32_t> map_monomial(
    std::uint32_t mask, const std::vector<int>& perm, const std::vector<int>& gen_sign) {
  int sign = 1;
  std::uint32_t out = 0;
  std::vector<int> images;
  for (std::uint32_t m = mask; m;) {
    int b = std::countr_zero(m);
    m &= m - 1;
    sign *= gen_sign[b];
    images.push_back(perm[b]);
  }
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      if (images[i] > images[j]) sign = -sign;
  for (int g : images) {
    if (out & (1u << g)) throw std::logic_error("map_monomial: collision");
    out |= 1u << g;
  }
  return {sign, out};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Complex coordinates of H^n: q = z + j w identifies each quaternionic line
// with two complex slots, (e_l, e_l i) -> slot 2l and (e_l j, e_l k) ->
// slot 2l+1 with z_{2l+1} = gamma - i*delta (right-i times e_l j is -e_l k).

struct ComplexSlot {
  int slot;
  int phase_re;  // phase in {1, i, -i} as (re, im)
  int phase_im;
};

inline ComplexSlot complex_slot_of_real_gen(int b) {
  int l = b / 4, r = b % 4;
  switch (r) {
    case 0: return {2 * l, 1, 0};
    case 1: return {2 * l, 0, 1};
    case 2: return {2 * l + 1, 1, 0};
    default: return {2 * l + 1, 0, -1};
  }
}

template <typename S>
S slot_phase(const ComplexSlot& cs) {
  S p(cs.phase_re);
  if (cs.phase_im != 0) p = p + S(cs.phase_im) * imag_unit<S>();
  return p;
}

// Complex coordinates of a real vector in H^n.
template <typename S>
std::vector<S> complex_coords(int n, const std::vector<S>& v) {
  if (static_cast<int>(v.size()) != 4 * n)
    throw std::invalid_argument("complex_coords: dimension mismatch");
  std::vector<S> z(2 * n, S(0));
  for (int b = 0; b < 4 * n; ++b) {
    ComplexSlot cs = complex_slot_of_real_gen(b);
    z[cs.slot] = z[cs.slot] + v[b] * slot_phase<S>(cs);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Sparse generator actions. S0 keys pack (first mask << 2n) | second mask;
// S1 keys are masks over the 4n real generators.

inline int s0_factor_dim(int n) { return 1 << (2 * n); }
inline int s0_dim(int n) { return 1 << (4 * n); }
inline int s1_dim(int n) { return 1 << (4 * n); }

// K(z) = z∧ - z⌟ on Λ*_C with the Hermitian dual (contraction conjugates z).
template <typename S>
void complex_k_action(std::uint32_t mask, const ComplexSlot& cs, const S& scale,
                      std::vector<std::pair<std::uint32_t, S>>& out) {
  const S p = slot_phase<S>(cs);
  const int s = cs.slot;
  const int sgn = detail::sgn_below(mask, s);
  if (!(mask >> s & 1u)) {
    out.emplace_back(mask | (1u << s), scale * S(sgn) * p);
  } else {
    out.emplace_back(mask & ~(1u << s), S(-1) * scale * S(sgn) * conj_of(p));
  }
}

// c0(b) = ε ⊗ K(z(b)) for the b-th real basis vector of H^n.
template <typename S>
SparseVec<S> s0_c(int n, int b, const SparseVec<S>& x) {
  SparseVec<S> out;
  const int w = 2 * n;
  const ComplexSlot cs = complex_slot_of_real_gen(b);
  std::vector<std::pair<std::uint32_t, S>> terms;
  for (const auto& [key, coef] : x) {
    std::uint32_t m0 = key >> w, m = key & ((1u << w) - 1u);
    S pre = (std::popcount(m0) % 2) ? S(-1) * coef : coef;
    terms.clear();
    complex_k_action<S>(m, cs, pre, terms);
    for (auto& [nm, c] : terms) detail::add_sparse(out, (m0 << w) | nm, c);
  }
  return out;
}

// h0(b) = (i·K(z(b))) ⊗ 1.
template <typename S>
SparseVec<S> s0_h(int n, int b, const SparseVec<S>& x) {
  SparseVec<S> out;
  const int w = 2 * n;
  const ComplexSlot cs = complex_slot_of_real_gen(b);
  const S iu = imag_unit<S>();
  std::vector<std::pair<std::uint32_t, S>> terms;
  for (const auto& [key, coef] : x) {
    std::uint32_t m0 = key >> w, m = key & ((1u << w) - 1u);
    terms.clear();
    complex_k_action<S>(m0, cs, iu * coef, terms);
    for (auto& [nm0, c] : terms) detail::add_sparse(out, (nm0 << w) | m, c);
  }
  return out;
}

// Right-j on Λ*_C, monomial-wise with conjugation: f_{2l} -> f_{2l+1},
// f_{2l+1} -> -f_{2l}. Within a pair both bits survive with sign +1.
inline std::pair<int, std::uint32_t> j_complex_monomial(int n, std::uint32_t mask) {
  int sign = 1;
  std::uint32_t out = 0;
  for (int l = 0; l < n; ++l) {
    std::uint32_t lo = 1u << (2 * l), hi = 1u << (2 * l + 1);
    bool a = mask & lo, b = mask & hi;
    if (a && b) {
      out |= lo | hi;
    } else if (a) {
      out |= hi;
    } else if (b) {
      out |= lo;
      sign = -sign;
    }
  }
  return {sign, out};
}

// τ0 = (ε ∘ (·j)) ⊗ (·j), anti-linear. The grading sign on the first
// factor is forced: the scalar i in h0 anti-commutes with any anti-linear
// map, so the plain (·j) ⊗ (·j) would satisfy τ h(v) = -h(vj) τ and no
// grading-preserving intertwiner with S1 could match both τ's. With the ε
// twist both commutation diagrams hold and τ0² = ε ⊗ ε is unchanged.
template <typename S>
SparseVec<S> s0_tau(int n, const SparseVec<S>& x) {
  SparseVec<S> out;
  const int w = 2 * n;
  for (const auto& [key, coef] : x) {
    std::uint32_t m0 = key >> w, m = key & ((1u << w) - 1u);
    auto [sg0, n0] = j_complex_monomial(n, m0);
    auto [sg1, n1] = j_complex_monomial(n, m);
    if (std::popcount(m0) % 2) sg0 = -sg0;
    detail::add_sparse(out, (n0 << w) | n1, S(sg0 * sg1) * conj_of(coef));
  }
  return out;
}

template <typename S>
SparseVec<S> s0_eps(int n, const SparseVec<S>& x) {
  SparseVec<S> out;
  for (const auto& [key, coef] : x) {
    int deg = std::popcount(key);
    detail::add_sparse(out, key, (deg % 2) ? S(-1) * coef : coef);
  }
  (void)n;
  return out;
}

// S1 actions. c1(v) = v∧ - v⌟ and h1(v) = v∧ + v⌟ for a real coefficient
// vector v over the 4n generators (real bilinear pairing, no conjugation).
template <typename S>
SparseVec<S> s1_clifford_vec(int n, const std::vector<S>& v, int contract_sign,
                             const SparseVec<S>& x) {
  SparseVec<S> out;
  for (const auto& [mask, coef] : x) {
    for (int g = 0; g < 4 * n; ++g) {
      if (is_zero(v[g])) continue;
      int sgn = detail::sgn_below(mask, g);
      if (!(mask >> g & 1u)) {
        detail::add_sparse(out, mask | (1u << g), v[g] * S(sgn) * coef);
      } else {
        detail::add_sparse(out, mask & ~(1u << g), S(contract_sign) * v[g] * S(sgn) * coef);
      }
    }
  }
  return out;
}

template <typename S>
SparseVec<S> s1_c_vec(int n, const std::vector<S>& v, const SparseVec<S>& x) {
  return s1_clifford_vec(n, v, -1, x);
}
template <typename S>
SparseVec<S> s1_h_vec(int n, const std::vector<S>& v, const SparseVec<S>& x) {
  return s1_clifford_vec(n, v, +1, x);
}

template <typename S>
std::vector<S> real_unit_vec(int n, int g, const S& scale = S(1)) {
  std::vector<S> v(4 * n, S(0));
  v[g] = scale;
  return v;
}

template <typename S>
SparseVec<S> s1_c(int n, int g, const SparseVec<S>& x) {
  return s1_c_vec(n, real_unit_vec<S>(n, g), x);
}
template <typename S>
SparseVec<S> s1_h(int n, int g, const SparseVec<S>& x) {
  return s1_h_vec(n, real_unit_vec<S>(n, g), x);
}

// τ1(ω ⊗ z) = (ω·j) ⊗ z̄. Right-j permutes real generators in 4-blocks:
// e -> ej, ei -> ek (sign +), ej -> -e, ek -> -ei.
template <typename S>
SparseVec<S> s1_tau(int n, const SparseVec<S>& x) {
  std::vector<int> perm(4 * n), sign(4 * n);
  for (int g = 0; g < 4 * n; ++g) {
    int r = g % 4;
    perm[g] = (r < 2) ? g + 2 : g - 2;
    sign[g] = (r < 2) ? 1 : -1;
  }
  SparseVec<S> out;
  for (const auto& [mask, coef] : x) {
    auto [sg, nm] = detail::map_monomial(mask, perm, sign);
    detail::add_sparse(out, nm, S(sg) * conj_of(coef));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense modules (small n). Factor bookkeeping matches graded_tensor's.

namespace detail {

template <typename S, typename OpFn>
Matrix<S> materialize_sparse(int dim, OpFn&& op) {
  Matrix<S> m(dim, dim);
  for (int j = 0; j < dim; ++j) {
    SparseVec<S> unit{{static_cast<std::uint32_t>(j), S(1)}};
    for (const auto& [key, coef] : op(unit)) m(static_cast<int>(key), j) = coef;
  }
  return m;
}

}  // namespace detail

template <typename S>
CliffordModule<S> build_s0_module(int n) {
  if (n < 0 || 4 * n > 8)
    throw std::invalid_argument("build_s0_module: dense mode limited to n <= 2");
  const int dim = s0_dim(n);
  CliffordModule<S> mod;
  mod.dim = dim;
  mod.vdim = 4 * n;
  mod.parity.resize(dim);
  for (int k = 0; k < dim; ++k) mod.parity[k] = std::popcount(static_cast<unsigned>(k)) % 2;
  for (int b = 0; b < 4 * n; ++b) {
    mod.c_gen.push_back(detail::materialize_sparse<S>(
        dim, [&](const SparseVec<S>& x) { return s0_c(n, b, x); }));
    mod.h_gen.push_back(detail::materialize_sparse<S>(
        dim, [&](const SparseVec<S>& x) { return s0_h(n, b, x); }));
  }
  mod.tau = Op<S>::antilinear(detail::materialize_sparse<S>(
      dim, [&](const SparseVec<S>& x) { return s0_tau(n, x); }));
  const int nf = s0_factor_dim(n);
  std::vector<int> fp(nf);
  for (int k = 0; k < nf; ++k) fp[k] = std::popcount(static_cast<unsigned>(k)) % 2;
  mod.factors = {FactorInfo<S>{nf, fp}, FactorInfo<S>{nf, fp}};
  return mod;
}

template <typename S>
CliffordModule<S> build_s1_module(int n) {
  if (n < 0 || 4 * n > 8)
    throw std::invalid_argument("build_s1_module: dense mode limited to n <= 2");
  const int dim = s1_dim(n);
  CliffordModule<S> mod;
  mod.dim = dim;
  mod.vdim = 4 * n;
  mod.parity.resize(dim);
  for (int k = 0; k < dim; ++k) mod.parity[k] = std::popcount(static_cast<unsigned>(k)) % 2;
  for (int g = 0; g < 4 * n; ++g) {
    mod.c_gen.push_back(detail::materialize_sparse<S>(
        dim, [&](const SparseVec<S>& x) { return s1_c(n, g, x); }));
    mod.h_gen.push_back(detail::materialize_sparse<S>(
        dim, [&](const SparseVec<S>& x) { return s1_h(n, g, x); }));
  }
  mod.tau = Op<S>::antilinear(detail::materialize_sparse<S>(
      dim, [&](const SparseVec<S>& x) { return s1_tau(n, x); }));
  mod.factors = {FactorInfo<S>{dim, mod.parity}};
  return mod;
}

// ---------------------------------------------------------------------------
// Canonical intertwiner. The generator rule fixes
//   F(1 ⊗ 1) = ∧_l (e_l + i e_l i) ∧ (e_l j - i e_l k)   in Λ*_R V ⊗ C,
// and every other column follows by applying creation combinations that act
// exactly on monomials:
//   A2(a) = ½(c(r_a) - i c(r_a i))  equals  ε ⊗ f_a∧   on S0,
//   A1(a) = ½(-i h(r_a) - h(r_a i)) equals  f_a∧ ⊗ 1   on S0,
// where r_a is the real vector with complex coordinates = unit at slot a
// (r_a = e_l for a = 2l, r_a = e_l j for a = 2l+1). Applying the mirrored
// combinations on the S1 side therefore transports columns exactly; no
// linear solving is involved. Intertwining is certified separately by the
// exact generator checks below.

namespace detail {

// (g1, coeff1) and (g2, coeff2) with r_a = e(g1), r_a·i = coeff2·e(g2).
inline std::pair<int, int> creation_real_gens(int a) { return {2 * a, 2 * a + 1}; }
inline int creation_second_sign(int a) { return (a % 2 == 0) ? 1 : -1; }

template <typename S>
SparseVec<S> apply_a2_s1(int n, int a, const SparseVec<S>& x) {
  auto [g1, g2] = creation_real_gens(a);
  int s2 = creation_second_sign(a);
  const S half = S(1) / S(2);
  SparseVec<S> out = s1_c(n, g1, x);
  SparseVec<S> other = s1_c(n, g2, x);
  const S im = imag_unit<S>();
  for (auto& [k, v] : other) detail::add_sparse(out, k, S(-s2) * im * v);
  for (auto& [k, v] : out) v = half * v;
  return out;
}

template <typename S>
SparseVec<S> apply_a1_s1(int n, int a, const SparseVec<S>& x) {
  auto [g1, g2] = creation_real_gens(a);
  int s2 = creation_second_sign(a);
  const S half = S(1) / S(2);
  const S im = imag_unit<S>();
  SparseVec<S> out;
  for (auto& [k, v] : s1_h(n, g1, x)) detail::add_sparse(out, k, S(-1) * im * v);
  for (auto& [k, v] : s1_h(n, g2, x)) detail::add_sparse(out, k, S(-s2) * v);
  for (auto& [k, v] : out) v = half * v;
  return out;
}

}  // namespace detail

// F(1⊗1) for an arbitrary orthonormal quaternionic frame given by real
// coefficient vectors (columns l: (v_l, v_l i, v_l j, v_l k)).
template <typename S>
SparseVec<S> intertwiner_vacuum(int n, const std::vector<std::vector<S>>& frame) {
  // wedge_vector prepends, so feed the 2n factors right to left.
  const S im = imag_unit<S>();
  std::vector<std::vector<S>> gens;
  for (int l = 0; l < n; ++l) {
    std::vector<S> first(4 * n, S(0)), second(4 * n, S(0));
    for (int i = 0; i < 4 * n; ++i) {
      first[i] = frame[4 * l][i] + im * frame[4 * l + 1][i];
      second[i] = frame[4 * l + 2][i] - im * frame[4 * l + 3][i];
    }
    gens.push_back(first);
    gens.push_back(second);
  }
  GradedElement<S> ordered = GradedElement<S>::unit(4 * n);
  for (auto it = gens.rbegin(); it != gens.rend(); ++it) ordered = wedge_vector(*it, ordered);
  SparseVec<S> out;
  for (const auto& [mask, coef] : ordered.coef) out.emplace(mask, coef);
  return out;
}

template <typename S>
std::vector<std::vector<S>> standard_frame(int n) {
  std::vector<std::vector<S>> frame;
  for (int g = 0; g < 4 * n; ++g) frame.push_back(real_unit_vec<S>(n, g));
  return frame;
}

// All columns of F, indexed by the packed S0 key.
template <typename S>
std::vector<SparseVec<S>> canonical_intertwiner_columns(int n) {
  const int w = 2 * n;
  const int total = s0_dim(n);
  std::vector<SparseVec<S>> cols(total);
  cols[0] = intertwiner_vacuum<S>(n, standard_frame<S>(n));
  for (int key = 1; key < total; ++key) {
    std::uint32_t m0 = static_cast<std::uint32_t>(key) >> w;
    std::uint32_t m = static_cast<std::uint32_t>(key) & ((1u << w) - 1u);
    if (m0 == 0) {
      int a = std::countr_zero(m);
      cols[key] = detail::apply_a2_s1<S>(n, a, cols[key & (key - 1)]);
    } else {
      int a = std::countr_zero(m0);
      std::uint32_t prev = ((m0 & (m0 - 1)) << w) | m;
      cols[key] = detail::apply_a1_s1<S>(n, a, cols[prev]);
    }
  }
  return cols;
}

template <typename S>
Matrix<S> canonical_intertwiner(int n) {
  if (4 * n > 12) throw std::invalid_argument("canonical_intertwiner: dense cap exceeded");
  auto cols = canonical_intertwiner_columns<S>(n);
  Matrix<S> f(s1_dim(n), s0_dim(n));
  for (int j = 0; j < s0_dim(n); ++j)
    for (const auto& [key, coef] : cols[j]) f(static_cast<int>(key), j) = coef;
  return f;
}

// ---------------------------------------------------------------------------
// Exact verification helpers shared by tests and the CLI.

struct IntertwinerReport {
  bool c_ok = true, h_ok = true, tau_ok = true, grading_ok = true;
  bool gram_scaled_identity = true;
  long long gram_scale_num = 0, gram_scale_den = 1;  // F†F = scale · id
  bool ok() const { return c_ok && h_ok && tau_ok && grading_ok && gram_scaled_identity; }
};

template <typename S>
bool sparse_equal(const SparseVec<S>& a, const SparseVec<S>& b) {
  return a == b;
}

// F c0(b) = c1(b) F, F h0(b) = h1(b) F, F τ0 = τ1 F (anti-linear: applied
// to real basis columns, the conjugation lands on F's matrix entries; we
// apply both sides to basis vectors so the comparison is exact).
template <typename S>
IntertwinerReport verify_intertwiner(int n) {
  IntertwinerReport rep;
  const int w = 2 * n;
  auto cols = canonical_intertwiner_columns<S>(n);
  const int total = s0_dim(n);

  auto apply_f = [&](const SparseVec<S>& x, bool conj_input) {
    SparseVec<S> out;
    for (const auto& [key, coef] : x) {
      S c = conj_input ? conj_of(coef) : coef;
      for (const auto& [k2, v2] : cols[key]) detail::add_sparse(out, k2, c * v2);
    }
    return out;
  };

  for (int key = 0; key < total; ++key) {
    SparseVec<S> unit{{static_cast<std::uint32_t>(key), S(1)}};
    int parity = std::popcount(static_cast<unsigned>(key)) % 2;
    for (const auto& [mask, coef] : cols[key]) {
      (void)coef;
      if (static_cast<int>(std::popcount(mask)) % 2 != parity) rep.grading_ok = false;
    }
    for (int b = 0; b < 4 * n; ++b) {
      if (!sparse_equal(apply_f(s0_c(n, b, unit), false), s1_c(n, b, apply_f(unit, false))))
        rep.c_ok = false;
      if (!sparse_equal(apply_f(s0_h(n, b, unit), false), s1_h(n, b, apply_f(unit, false))))
        rep.h_ok = false;
    }
    // τ1(F x) vs F(τ0 x): τ0(unit) has honest coefficients; F applied to an
    // already-conjugated element needs no further twist.
    if (!sparse_equal(apply_f(s0_tau(n, unit), false), s1_tau(n, apply_f(unit, false))))
      rep.tau_ok = false;
  }

  // Gram matrix: F†F should be 4^n times the identity (F/2^n is unitary).
  if constexpr (scalar_traits<S>::exact) {
    for (int i = 0; i < total && rep.gram_scaled_identity; ++i) {
      for (int j = i; j < total; ++j) {
        S dot(0);
        const auto& a = cols[i];
        const auto& b = cols[j];
        for (const auto& [k, v] : a) {
          auto it = b.find(k);
          if (it != b.end()) dot = dot + conj_of(v) * it->second;
        }
        if (i == j) {
          S expect(1);
          for (int q = 0; q < n; ++q) expect = S(4) * expect;
          if (!(dot == expect)) {
            rep.gram_scaled_identity = false;
            break;
          }
          rep.gram_scale_num = 1;
          for (int q = 0; q < n; ++q) rep.gram_scale_num *= 4;
          rep.gram_scale_den = 1;
        } else if (!is_zero(dot)) {
          rep.gram_scaled_identity = false;
          break;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Basis independence: rebuild F's conjugating data from a random Sp(n)
// frame B. The construction in the new frame has the same matrix, so
// independence says U1 F U0† = F where U0, U1 are the induced exterior
// basis changes. Returns the max entrywise deviation over the samples.

template <typename S>
Matrix<S> exterior_power_matrix(const Matrix<S>& t) {
  const int d = t.cols();
  const int dim = 1 << d;
  Matrix<S> out(dim, dim);
  for (int mask = 0; mask < dim; ++mask) {
    GradedElement<S> elem = GradedElement<S>::unit(d);
    for (int g = d - 1; g >= 0; --g) {
      if (!(mask >> g & 1)) continue;
      std::vector<S> col(d);
      for (int r = 0; r < d; ++r) col[r] = t(r, g);
      elem = wedge_vector(col, elem);
    }
    for (const auto& [k, v] : elem.coef) out(static_cast<int>(k), mask) = v;
  }
  return out;
}

inline double basis_independence_max_dev(int n, int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  Matrix<CDbl> f = to_cdbl_matrix(canonical_intertwiner<CRat>(n));
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Matrix<double> basis = sample_spn_basis(n, rng);
    // Complex 2n x 2n change: columns are complex coordinates of the new
    // frame vectors v_l and v_l j (slots 2l, 2l+1).
    Matrix<CDbl> tc(2 * n, 2 * n);
    for (int l = 0; l < n; ++l) {
      for (int which = 0; which < 2; ++which) {
        std::vector<CDbl> real_col(4 * n);
        for (int r = 0; r < 4 * n; ++r) real_col[r] = CDbl(basis(r, 4 * l + 2 * which), 0.0);
        auto z = complex_coords<CDbl>(n, real_col);
        for (int r = 0; r < 2 * n; ++r) tc(r, 2 * l + which) = z[r];
      }
    }
    Matrix<CDbl> t_lambda = exterior_power_matrix(tc);
    Matrix<CDbl> u0 = kron(t_lambda, t_lambda);
    Matrix<CDbl> breal(4 * n, 4 * n);
    for (int r = 0; r < 4 * n; ++r)
      for (int c = 0; c < 4 * n; ++c) breal(r, c) = CDbl(basis(r, c), 0.0);
    Matrix<CDbl> u1 = exterior_power_matrix(breal);
    Matrix<CDbl> lhs = u1 * f * u0.dagger();
    worst = std::max(worst, (lhs - f).max_abs());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Direct sums. The canonical identification S0(V ⊕ W) ≅ S0(V) ⊗ S0(W)
// swaps the two middle exterior factors with the Koszul sign
// (-1)^{|W-first| · |V-second|}; the S1 identification splits real
// monomials with no sign. Both are checked generator-by-generator against
// the graded tensor formulas, and F(V⊕W) against F(V) ⊗ F(W).

struct DirectSumReport {
  bool c_ok = true, h_ok = true, tau_ok = true, f_ok = true;
  bool ok() const { return c_ok && h_ok && tau_ok && f_ok; }
};

// The signed-permutation part of τ0 (no conjugation); see the τ ⊗ τ note
// inside direct_sum_compatibility.
template <typename S>
SparseVec<S> s0_tau_linear_part(int n, const SparseVec<S>& x) {
  SparseVec<S> out;
  const int w = 2 * n;
  for (const auto& [key, coef] : x) {
    std::uint32_t m0 = key >> w, m = key & ((1u << w) - 1u);
    auto [sg0, n0] = j_complex_monomial(n, m0);
    auto [sg1, n1] = j_complex_monomial(n, m);
    if (std::popcount(m0) % 2) sg0 = -sg0;
    detail::add_sparse(out, (n0 << w) | n1, S(sg0 * sg1) * coef);
  }
  return out;
}

namespace detail {

// Split a packed S0(V⊕W) key into (key_V, key_W, sign).
inline std::tuple<std::uint32_t, std::uint32_t, int> split_s0_key(int nv, int nw,
                                                                  std::uint32_t key) {
  const int wj = 2 * (nv + nw), wv = 2 * nv, ww = 2 * nw;
  std::uint32_t m0 = key >> wj, m = key & ((1u << wj) - 1u);
  std::uint32_t mv0 = m0 & ((1u << wv) - 1u), mw0 = m0 >> wv;
  std::uint32_t mv = m & ((1u << wv) - 1u), mw = m >> wv;
  int sign = (std::popcount(mw0) * std::popcount(mv)) % 2 ? -1 : 1;
  std::uint32_t kv = (mv0 << wv) | mv;
  std::uint32_t kw = (mw0 << ww) | mw;
  return {kv, kw, sign};
}

template <typename S>
std::map<std::uint64_t, S> split_s0(int nv, int nw, const SparseVec<S>& x) {
  std::map<std::uint64_t, S> out;
  const std::uint64_t dw = static_cast<std::uint64_t>(s0_dim(nw));
  for (const auto& [key, coef] : x) {
    auto [kv, kw, sg] = split_s0_key(nv, nw, key);
    std::uint64_t k2 = static_cast<std::uint64_t>(kv) * dw + kw;
    auto it = out.find(k2);
    S add = S(sg) * coef;
    if (it == out.end()) {
      if (!is_zero(add)) out.emplace(k2, add);
    } else {
      it->second = it->second + add;
      if (is_zero(it->second)) out.erase(it);
    }
  }
  return out;
}

// Apply a per-factor sparse op to the joint (V-key * dimW + W-key) space.
template <typename S, typename OpV>
std::map<std::uint64_t, S> joint_apply_first(int nw, OpV&& op,
                                             const std::map<std::uint64_t, S>& x) {
  std::map<std::uint64_t, S> out;
  const std::uint64_t dw = static_cast<std::uint64_t>(s0_dim(nw));
  for (const auto& [key, coef] : x) {
    std::uint32_t kv = static_cast<std::uint32_t>(key / dw);
    std::uint64_t kw = key % dw;
    SparseVec<S> unit{{kv, coef}};
    for (const auto& [nk, nv2] : op(unit)) {
      std::uint64_t k2 = static_cast<std::uint64_t>(nk) * dw + kw;
      auto it = out.find(k2);
      if (it == out.end()) {
        if (!is_zero(nv2)) out.emplace(k2, nv2);
      } else {
        it->second = it->second + nv2;
        if (is_zero(it->second)) out.erase(it);
      }
    }
  }
  return out;
}

template <typename S, typename OpW>
std::map<std::uint64_t, S> joint_apply_second(int nw, bool eps_prefix, OpW&& op,
                                              const std::map<std::uint64_t, S>& x) {
  std::map<std::uint64_t, S> out;
  const std::uint64_t dw = static_cast<std::uint64_t>(s0_dim(nw));
  for (const auto& [key, coef] : x) {
    std::uint64_t kv = key / dw;
    std::uint32_t kw = static_cast<std::uint32_t>(key % dw);
    S pre = coef;
    if (eps_prefix && std::popcount(kv) % 2) pre = S(-1) * pre;
    SparseVec<S> unit{{kw, pre}};
    for (const auto& [nk, nv2] : op(unit)) {
      std::uint64_t k2 = kv * dw + nk;
      auto it = out.find(k2);
      if (it == out.end()) {
        if (!is_zero(nv2)) out.emplace(k2, nv2);
      } else {
        it->second = it->second + nv2;
        if (is_zero(it->second)) out.erase(it);
      }
    }
  }
  return out;
}

}  // namespace detail

template <typename S>
DirectSumReport direct_sum_compatibility(int nv, int nw) {
  if (4 * (nv + nw) > 12)
    throw std::invalid_argument("direct_sum_compatibility: total real dim cap is 12");
  DirectSumReport rep;
  const int n = nv + nw;
  const int total = s0_dim(n);
  const std::uint64_t dw = static_cast<std::uint64_t>(s0_dim(nw));

  auto fv = canonical_intertwiner_columns<S>(nv);
  auto fw = canonical_intertwiner_columns<S>(nw);
  auto fj = canonical_intertwiner_columns<S>(n);

  for (int key = 0; key < total; ++key) {
    SparseVec<S> unit{{static_cast<std::uint32_t>(key), S(1)}};
    auto split_unit = detail::split_s0(nv, nw, unit);

    for (int b = 0; b < 4 * n; ++b) {
      bool in_v = b < 4 * nv;
      int bl = in_v ? b : b - 4 * nv;
      auto lhs_c = detail::split_s0(nv, nw, s0_c(n, b, unit));
      auto lhs_h = detail::split_s0(nv, nw, s0_h(n, b, unit));
      std::map<std::uint64_t, S> rhs_c, rhs_h;
      if (in_v) {
        rhs_c = detail::joint_apply_first<S>(
            nw, [&](const SparseVec<S>& x) { return s0_c(nv, bl, x); }, split_unit);
        rhs_h = detail::joint_apply_first<S>(
            nw, [&](const SparseVec<S>& x) { return s0_h(nv, bl, x); }, split_unit);
      } else {
        rhs_c = detail::joint_apply_second<S>(
            nw, true, [&](const SparseVec<S>& x) { return s0_c(nw, bl, x); }, split_unit);
        rhs_h = detail::joint_apply_second<S>(
            nw, true, [&](const SparseVec<S>& x) { return s0_h(nw, bl, x); }, split_unit);
      }
      if (lhs_c != rhs_c) rep.c_ok = false;
      if (lhs_h != rhs_h) rep.h_ok = false;
    }

    {
      auto lhs = detail::split_s0(nv, nw, s0_tau(n, unit));
      auto mid = detail::joint_apply_first<S>(
          nw, [&](const SparseVec<S>& x) { return s0_tau(nv, x); }, split_unit);
      // τ ⊗ τ: the second factor's τ sees coefficients already conjugated
      // by the first application; conjugating twice would undo it, so the
      // second op runs on magnitudes only. Both τ matrices are real signed
      // permutations, which makes the plain composition correct here.
      auto rhs = detail::joint_apply_second<S>(
          nw, false, [&](const SparseVec<S>& x) { return s0_tau_linear_part(nw, x); }, mid);
      if (lhs != rhs) rep.tau_ok = false;
    }

    {
      // F(V⊕W) then split on the S1 side vs split on S0 then F ⊗ F.
      std::map<std::uint64_t, S> lhs;
      for (const auto& [k1, v1] : fj[key]) {
        std::uint32_t mv = k1 & ((1u << (4 * nv)) - 1u);
        std::uint32_t mw = k1 >> (4 * nv);
        std::uint64_t k2 = static_cast<std::uint64_t>(mv) * s1_dim(nw) + mw;
        auto it = lhs.find(k2);
        if (it == lhs.end())
          lhs.emplace(k2, v1);
        else
          it->second = it->second + v1;
      }
      std::map<std::uint64_t, S> rhs;
      for (const auto& [k2, coef] : split_unit) {
        std::uint32_t kv = static_cast<std::uint32_t>(k2 / dw);
        std::uint32_t kw = static_cast<std::uint32_t>(k2 % dw);
        for (const auto& [mv, av] : fv[kv])
          for (const auto& [mw, aw] : fw[kw]) {
            std::uint64_t kk = static_cast<std::uint64_t>(mv) * s1_dim(nw) + mw;
            S add = coef * av * aw;
            auto it = rhs.find(kk);
            if (it == rhs.end()) {
              if (!is_zero(add)) rhs.emplace(kk, add);
            } else {
              it->second = it->second + add;
              if (is_zero(it->second)) rhs.erase(it);
            }
          }
      }
      if (lhs != rhs) rep.f_ok = false;
    }
  }
  return rep;
}

}  // namespace spinlab
