#pragma once

// Cech data for O(1) (sign-valued) gerbes on a finite cover.
//
// The nerve of a finite cover is recorded combinatorially: overlap pairs,
// triple overlaps, quadruple overlaps.  A gerbe assigns a sign s_{ijk} to
// every triple; the cocycle condition lives on quadruples,
//
//   (delta s)_{ijkl} = s_{jkl} s_{ikl} s_{ijl} s_{ijk} = +1,
//
// and a trivialization is an edge cochain u with (delta u)_{ijk} =
// u_{jk} u_{ik} u_{ij} = s_{ijk}.  Inverses are invisible because every
// value squares to one, so delta is the plain product over faces.
//
// Trivialization is a linear solve over F2.  When no solution exists the
// solver returns a certificate: a 2-cycle z (a set of triples in which
// every pair occurs an even number of times) with prod_{z} s = -1.  Any
// coboundary pairs to +1 against a cycle, so the certificate is a
// machine-checkable proof of non-trivializability.
//
// The bundled fixture is the six-chart projective plane: the quotient of
// the icosahedron by the antipodal map.  Its gerbe is the cup square of
// the double-cover edge cochain and is certified non-trivializable by the
// sum of all ten faces.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinlab {

// Combinatorial nerve: vertices 0..n-1, plus sorted simplex tables.
// Simplices are strictly increasing index tuples; the tables are kept in
// lexicographic order and must be downward closed.
struct FiniteNerve {
  int n = 0;
  std::vector<std::array<int, 2>> pairs;
  std::vector<std::array<int, 3>> triples;
  std::vector<std::array<int, 4>> quadruples;

  void validate() const {
    auto in_range = [&](int v) { return v >= 0 && v < n; };
    auto check_sorted = [&](const auto& list, const char* what) {
      for (size_t t = 0; t < list.size(); ++t) {
        const auto& s = list[t];
        for (size_t k = 0; k + 1 < s.size(); ++k)
          if (!(s[k] < s[k + 1]))
            throw std::invalid_argument(std::string("FiniteNerve: ") + what +
                                        " entries must be strictly increasing");
        for (int v : s)
          if (!in_range(v)) throw std::invalid_argument("FiniteNerve: vertex index out of range");
        if (t > 0 && !(list[t - 1] < s))
          throw std::invalid_argument(std::string("FiniteNerve: ") + what +
                                      " table must be lexicographically sorted and unique");
      }
    };
    check_sorted(pairs, "pair");
    check_sorted(triples, "triple");
    check_sorted(quadruples, "quadruple");
    for (const auto& t : triples)
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
          if (pair_index(t[a], t[b]) < 0)
            throw std::invalid_argument("FiniteNerve: triple has a missing pair face");
    for (const auto& q : quadruples)
      for (int a = 0; a < 4; ++a) {
        std::array<int, 3> f;
        int m = 0;
        for (int b = 0; b < 4; ++b)
          if (b != a) f[m++] = q[b];
        if (triple_index(f[0], f[1], f[2]) < 0)
          throw std::invalid_argument("FiniteNerve: quadruple has a missing triple face");
      }
  }

  // Index of {i, j} (i < j) in the pair table, or -1.
  int pair_index(int i, int j) const {
    std::array<int, 2> key = {std::min(i, j), std::max(i, j)};
    auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
    if (it == pairs.end() || *it != key) return -1;
    return static_cast<int>(it - pairs.begin());
  }

  int triple_index(int i, int j, int k) const {
    std::array<int, 3> key = {i, j, k};
    std::sort(key.begin(), key.end());
    auto it = std::lower_bound(triples.begin(), triples.end(), key);
    if (it == triples.end() || *it != key) return -1;
    return static_cast<int>(it - triples.begin());
  }

  // Complete nerve on n vertices including simplices up to dimension
  // max_dim (2 = triples, 3 = quadruples).  max_dim 2 models a cover whose
  // quadruple overlaps are empty (a tetrahedron boundary for n = 4).
  static FiniteNerve complete(int n, int max_dim = 3) {
    if (n < 0 || max_dim < 1 || max_dim > 3)
      throw std::invalid_argument("FiniteNerve::complete: bad arguments");
    FiniteNerve g;
    g.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) g.pairs.push_back({i, j});
    if (max_dim >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int k = j + 1; k < n; ++k) g.triples.push_back({i, j, k});
    if (max_dim >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int k = j + 1; k < n; ++k)
            for (int l = k + 1; l < n; ++l) g.quadruples.push_back({i, j, k, l});
    g.validate();
    return g;
  }
};

// Sign-valued cochains, one entry per simplex in nerve table order.
using Cochain1 = std::vector<int>;
using Cochain2 = std::vector<int>;
using Cochain3 = std::vector<int>;

namespace detail {
inline void require_signs(const std::vector<int>& c, size_t want, const char* what) {
  if (c.size() != want) throw std::invalid_argument(std::string(what) + ": cochain size mismatch");
  for (int v : c)
    if (v != 1 && v != -1) throw std::invalid_argument(std::string(what) + ": entries must be +-1");
}
}  // namespace detail

inline Cochain2 coboundary1(const FiniteNerve& g, const Cochain1& u) {
  detail::require_signs(u, g.pairs.size(), "coboundary1");
  Cochain2 s(g.triples.size(), 1);
  for (size_t t = 0; t < g.triples.size(); ++t) {
    const auto& [i, j, k] = g.triples[t];
    s[t] = u[g.pair_index(j, k)] * u[g.pair_index(i, k)] * u[g.pair_index(i, j)];
  }
  return s;
}

inline Cochain3 coboundary2(const FiniteNerve& g, const Cochain2& s) {
  detail::require_signs(s, g.triples.size(), "coboundary2");
  Cochain3 z(g.quadruples.size(), 1);
  for (size_t q = 0; q < g.quadruples.size(); ++q) {
    const auto& [i, j, k, l] = g.quadruples[q];
    z[q] = s[g.triple_index(j, k, l)] * s[g.triple_index(i, k, l)] * s[g.triple_index(i, j, l)] *
           s[g.triple_index(i, j, k)];
  }
  return z;
}

// Cup square of an edge cochain: (u ^ u)_{ijk} is -1 exactly when both the
// front face u_{ij} and the back face u_{jk} are -1.
inline Cochain2 cup_square(const FiniteNerve& g, const Cochain1& u) {
  detail::require_signs(u, g.pairs.size(), "cup_square");
  Cochain2 s(g.triples.size(), 1);
  for (size_t t = 0; t < g.triples.size(); ++t) {
    const auto& [i, j, k] = g.triples[t];
    if (u[g.pair_index(i, j)] < 0 && u[g.pair_index(j, k)] < 0) s[t] = -1;
  }
  return s;
}

struct O1Gerbe {
  FiniteNerve nerve;
  Cochain2 sections;  // s_{ijk} per triple

  O1Gerbe(FiniteNerve g, Cochain2 s) : nerve(std::move(g)), sections(std::move(s)) {
    nerve.validate();
    detail::require_signs(sections, nerve.triples.size(), "O1Gerbe");
  }
};

struct CocycleReport {
  bool pass = true;
  std::vector<int> failing_quadruples;  // indices into nerve.quadruples
};

inline CocycleReport verify_cocycle(const O1Gerbe& g) {
  CocycleReport r;
  Cochain3 z = coboundary2(g.nerve, g.sections);
  for (size_t q = 0; q < z.size(); ++q)
    if (z[q] != 1) {
      r.pass = false;
      r.failing_quadruples.push_back(static_cast<int>(q));
    }
  return r;
}

struct TrivializationResult {
  bool trivializable = false;
  Cochain1 edge_sections;       // delta u = s when trivializable
  std::vector<int> obstruction;  // triple indices of a 2-cycle pairing to -1 otherwise

  // Pairing of the gerbe sections with the obstruction cycle; -1 certifies.
  static int pairing(const O1Gerbe& g, const std::vector<int>& cycle) {
    int p = 1;
    for (int t : cycle) p *= g.sections.at(static_cast<size_t>(t));
    return p;
  }
};

// Solves delta u = s over F2 by Gaussian elimination.  Rows carry a
// provenance block so an inconsistent row names the original equations
// whose sum it is; those triples form the obstruction cycle.
inline TrivializationResult trivialize(const O1Gerbe& g) {
  const FiniteNerve& nerve = g.nerve;
  const size_t np = nerve.pairs.size(), nt = nerve.triples.size();
  if (np > (1u << 20)) throw std::invalid_argument("trivialize: nerve too large");

  const size_t words = (np + nt + 1 + 63) / 64;
  auto bit_get = [&](const std::vector<uint64_t>& row, size_t b) {
    return (row[b >> 6] >> (b & 63)) & 1u;
  };
  auto bit_flip = [](std::vector<uint64_t>& row, size_t b) { row[b >> 6] ^= uint64_t(1) << (b & 63); };

  // Layout per row: [0, np) coefficients, [np, np+nt) provenance, np+nt rhs.
  std::vector<std::vector<uint64_t>> rows(nt, std::vector<uint64_t>(words, 0));
  for (size_t t = 0; t < nt; ++t) {
    const auto& [i, j, k] = nerve.triples[t];
    bit_flip(rows[t], static_cast<size_t>(nerve.pair_index(i, j)));
    bit_flip(rows[t], static_cast<size_t>(nerve.pair_index(i, k)));
    bit_flip(rows[t], static_cast<size_t>(nerve.pair_index(j, k)));
    bit_flip(rows[t], np + t);
    if (g.sections[t] < 0) bit_flip(rows[t], np + nt);
  }

  std::vector<size_t> pivot_row_of_col(np, SIZE_MAX);
  size_t rank = 0;
  for (size_t col = 0; col < np && rank < nt; ++col) {
    size_t piv = SIZE_MAX;
    for (size_t r = rank; r < nt; ++r)
      if (bit_get(rows[r], col)) {
        piv = r;
        break;
      }
    if (piv == SIZE_MAX) continue;
    std::swap(rows[rank], rows[piv]);
    for (size_t r = 0; r < nt; ++r)
      if (r != rank && bit_get(rows[r], col))
        for (size_t w = 0; w < words; ++w) rows[r][w] ^= rows[rank][w];
    pivot_row_of_col[col] = rank;
    ++rank;
  }

  TrivializationResult out;
  for (size_t r = rank; r < nt; ++r) {
    if (!bit_get(rows[r], np + nt)) continue;
    // 0 = 1 row: its provenance is a cycle with odd pairing.
    for (size_t t = 0; t < nt; ++t)
      if (bit_get(rows[r], np + t)) out.obstruction.push_back(static_cast<int>(t));
    // Certificate self-check: every pair covered evenly, pairing odd.
    std::vector<int> cover(np, 0);
    int pairing = 1;
    for (int t : out.obstruction) {
      const auto& [i, j, k] = nerve.triples[static_cast<size_t>(t)];
      ++cover[static_cast<size_t>(nerve.pair_index(i, j))];
      ++cover[static_cast<size_t>(nerve.pair_index(i, k))];
      ++cover[static_cast<size_t>(nerve.pair_index(j, k))];
      pairing *= g.sections[static_cast<size_t>(t)];
    }
    for (int c : cover)
      if (c % 2 != 0) throw std::logic_error("trivialize: obstruction is not a cycle");
    if (pairing != -1) throw std::logic_error("trivialize: obstruction pairing is even");
    out.trivializable = false;
    return out;
  }

  out.trivializable = true;
  out.edge_sections.assign(np, 1);
  for (size_t col = 0; col < np; ++col) {
    size_t r = pivot_row_of_col[col];
    if (r != SIZE_MAX && bit_get(rows[r], np + nt)) out.edge_sections[col] = -1;
  }
  if (coboundary1(nerve, out.edge_sections) != g.sections)
    throw std::logic_error("trivialize: solution check failed");
  return out;
}

// Exhaustive search over all edge cochains; intended for small fixtures.
inline std::optional<Cochain1> trivialize_brute(const O1Gerbe& g) {
  const size_t np = g.nerve.pairs.size();
  if (np > 20) throw std::invalid_argument("trivialize_brute: more than 20 unknowns");
  Cochain1 u(np, 1);
  for (uint64_t mask = 0; mask < (uint64_t(1) << np); ++mask) {
    for (size_t p = 0; p < np; ++p) u[p] = (mask >> p) & 1 ? -1 : 1;
    if (coboundary1(g.nerve, u) == g.sections) return u;
  }
  return std::nullopt;
}

// True when the edge data t carries the sections of g1 to those of g2,
// i.e. s2 = s1 * delta t on every triple.
inline bool is_gerbe_isomorphism(const O1Gerbe& g1, const O1Gerbe& g2, const Cochain1& t) {
  if (g1.nerve.n != g2.nerve.n || g1.nerve.pairs != g2.nerve.pairs ||
      g1.nerve.triples != g2.nerve.triples)
    throw std::invalid_argument("is_gerbe_isomorphism: nerves differ");
  Cochain2 dt = coboundary1(g1.nerve, t);
  for (size_t i = 0; i < dt.size(); ++i)
    if (g2.sections[i] != g1.sections[i] * dt[i]) return false;
  return true;
}

// Six-chart projective plane: the antipodal quotient of the icosahedron.
// Charts are the six antipodal vertex classes; every pair of classes
// overlaps (15 pairs), the ten quotient faces are the triple overlaps, and
// no four charts meet.  Tables are frozen from the icosahedron with
// vertices (0, +-1, +-phi) and cyclic shifts, classes numbered by first
// representative.
inline FiniteNerve rp2_nerve() {
  FiniteNerve g = FiniteNerve::complete(6, 1);
  g.triples = {{0, 1, 2}, {0, 1, 3}, {0, 2, 5}, {0, 3, 4}, {0, 4, 5},
               {1, 2, 4}, {1, 3, 5}, {1, 4, 5}, {2, 3, 4}, {2, 3, 5}};
  g.validate();
  return g;
}

// Edge cochain of the double cover: t_{ab} = +1 when the chosen
// representatives of classes a and b are adjacent in the icosahedron, -1
// when the antipodal representative is the adjacent one.  Pair order is
// lexicographic: (0,1), (0,2), ..., (4,5).
inline Cochain1 rp2_double_cover_cochain() {
  return {1, 1, -1, 1, -1, 1, -1, -1, 1, 1, -1, -1, -1, -1, -1};
}

// The gerbe of the projective plane: cup square of the double cover.
inline O1Gerbe rp2_gerbe() {
  FiniteNerve g = rp2_nerve();
  Cochain2 s = cup_square(g, rp2_double_cover_cochain());
  return O1Gerbe(std::move(g), std::move(s));
}

// Sum of all ten faces: a 2-cycle (the surface is closed, so every pair
// lies in exactly two faces) pairing to -1 with the rp2 gerbe.
inline std::vector<int> rp2_fundamental_cycle() {
  return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
}

}  // namespace spinlab
