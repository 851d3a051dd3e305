#pragma once

// Line bundles over the two-sphere presented in two stereographic charts,
// with the antipodal lift, the SU(2) chart action, a Berry-plaquette Chern
// verifier on centrally symmetric triangulations, and the two-component
// invariant of equivariant nonvanishing functions.
//
// Conventions, fixed once and used by every routine here:
//   spinor (z, w) in C^2  <->  quaternion h = z + j w;
//   base point of a unit spinor:  x1 + i x2 = 2 z conj(w),  x3 = |z|^2 - |w|^2
//   (this is h i conj(h) read through (a, b, c) <-> c i + b j - a k);
//   chart N coordinate  zeta = w/z = (x1 - i x2)/(1 + x3),
//     frame q_N(zeta) = (1, zeta)/sqrt(1 + |zeta|^2), zeta = 0 at the north pole;
//   chart S coordinate  eta = z/w = (x1 + i x2)/(1 - x3),
//     frame q_S(eta) = (eta, 1)/sqrt(1 + |eta|^2), eta = 0 at the south pole;
//   overlap: eta = 1/zeta and q_S(1/zeta) = (|zeta|/zeta) q_N(zeta).
// The circle acts on spinor and fiber together, so [u q, a] = [q, u^{-k} a]
// on the weight-k bundle. weight = 1 is the standard degree-one bundle; the
// antipodal lift is right multiplication by j on spinors with conjugation on
// the fiber, and its square is exactly (-1)^weight.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinlab/core/scalar.hpp"
#include "spinlab/quaternion.hpp"

namespace spinlab {

using Vec3 = std::array<double, 3>;

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }
inline Vec3 neg3(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 normalized3(const Vec3& a) {
  double n = norm3(a);
  if (n == 0) throw std::invalid_argument("normalized3: zero vector");
  return {a[0] / n, a[1] / n, a[2] / n};
}

// ---------------------------------------------------------------------------
// Charts.

enum class Chart : int { north = 0, south = 1 };

struct ChartPoint {
  Chart chart = Chart::north;
  CDbl zeta{};
};

inline Vec3 chart_to_sphere(const ChartPoint& p) {
  double n2 = std::norm(p.zeta);
  double d = 1.0 + n2;
  if (p.chart == Chart::north)
    return {2.0 * p.zeta.real() / d, -2.0 * p.zeta.imag() / d, (1.0 - n2) / d};
  return {2.0 * p.zeta.real() / d, 2.0 * p.zeta.imag() / d, (n2 - 1.0) / d};
}

// Chooses the chart in which the point is closest to the origin (|zeta| <= 1).
inline ChartPoint sphere_to_chart(const Vec3& x) {
  if (x[2] >= 0) return {Chart::north, CDbl(x[0], -x[1]) / (1.0 + x[2])};
  return {Chart::south, CDbl(x[0], x[1]) / (1.0 - x[2])};
}

// Unit spinor representative of a chart point, as (z, w) coordinates.
inline std::array<CDbl, 2> chart_frame(const ChartPoint& p) {
  double s = 1.0 / std::sqrt(1.0 + std::norm(p.zeta));
  if (p.chart == Chart::north) return {CDbl(s, 0), p.zeta * s};
  return {p.zeta * s, CDbl(s, 0)};
}

// Deterministic unit spinor over a base point: rotate i to v = x3 i + x2 j - x1 k
// by h = (1 - v i)/|1 - v i|, falling back to the south form w j near v = -i.
// Any other choice differs by a fiber phase; everything downstream is gauge
// invariant, so the switch locus is harmless.
inline Quat spinor_over(const Vec3& x) {
  Quat v{0.0, x[2], x[1], -x[0]};
  if (x[2] >= -0.5) {
    Quat h = Quat{1, 0, 0, 0} + -1.0 * (v * Quat{0, 1, 0, 0});
    return h.normalized();
  }
  Quat w = Quat{1, 0, 0, 0} + (v * Quat{0, 1, 0, 0});
  return (w.normalized()) * Quat{0, 0, 1, 0};
}

inline std::array<CDbl, 2> spinor_coords(const Quat& h) {
  return {CDbl(h.w, h.x), CDbl(h.y, -h.z)};
}

inline Vec3 spinor_base_point(const std::array<CDbl, 2>& zw) {
  CDbl p = 2.0 * zw[0] * std::conj(zw[1]);
  return {p.real(), p.imag(), std::norm(zw[0]) - std::norm(zw[1])};
}

// Adjoint rotation of the unit quaternion g on R^3 through the identification
// (a, b, c) <-> c i + b j - a k.
inline Vec3 adjoint_rotate(const Quat& g, const Vec3& x) {
  Quat v{0.0, x[2], x[1], -x[0]};
  Quat r = g * v * g.conj();
  return {-r.z, r.y, r.x};
}

// ---------------------------------------------------------------------------
// The standard triple and its antipodal lift.

struct FiberPoint {
  ChartPoint base;
  CDbl alpha{};
};

namespace detail {
inline CDbl unit_power(const CDbl& u, int k) {
  CDbl r(1, 0);
  for (int i = 0; i < k; ++i) r *= u;
  return r;
}
}  // namespace detail

struct StandardTriple {
  int weight = 1;  // first Chern number of the bundle; 1 is the standard model

  explicit StandardTriple(int k = 1) : weight(k) {
    if (k < 0) throw std::invalid_argument("StandardTriple: negative weight");
  }

  // Rewrites a fiber point in the other chart. Undefined at the chart origin
  // (the poles are not in the overlap).
  FiberPoint switch_chart(const FiberPoint& p) const {
    double a = std::abs(p.base.zeta);
    if (a == 0) throw std::invalid_argument("switch_chart: point not in the chart overlap");
    CDbl u = std::conj(p.base.zeta) / a;
    Chart other = p.base.chart == Chart::north ? Chart::south : Chart::north;
    return {{other, 1.0 / p.base.zeta}, detail::unit_power(u, weight) * p.alpha};
  }

  // The antipodal lift: right multiplication by j on spinors, conjugation on
  // the fiber. Chart formulas: (N, z, a) -> (S, -conj z, conj a) and
  // (S, z, a) -> (N, -conj z, (-1)^weight conj a). Anti-linear; squares to
  // exactly (-1)^weight.
  FiberPoint antipodal_lift(const FiberPoint& p) const {
    CDbl nz = -std::conj(p.base.zeta);
    CDbl na = std::conj(p.alpha);
    if (p.base.chart == Chart::north) return {{Chart::south, nz}, na};
    if (weight % 2 != 0) na = -na;
    return {{Chart::north, nz}, na};
  }
};

// Fiberwise scalar of the antipodal lift composed with itself. Exact sign
// arithmetic: the double map returns every sample bitwise and flips the fiber
// by (-1)^weight. Throws if the chart data disagree.
inline int antipodal_lift_square(const StandardTriple& triple) {
  const CDbl samples[] = {{0.3, 0.4}, {-1.1, 0.2}, {2.0, -0.5}, {0.0, 0.01}, {5.0, 3.0}};
  const CDbl fibers[] = {{1.0, 0.0}, {0.7, -0.2}, {-2.0, 1.5}};
  int scalar = 0;
  for (Chart c : {Chart::north, Chart::south})
    for (const CDbl& zc : samples)
      for (const CDbl& al : fibers) {
        FiberPoint p{{c, zc}, al};
        FiberPoint q = triple.antipodal_lift(triple.antipodal_lift(p));
        if (q.base.chart != c || q.base.zeta != zc)
          throw std::runtime_error("antipodal_lift_square: base point not restored");
        int s;
        if (q.alpha == al)
          s = 1;
        else if (q.alpha == -al)
          s = -1;
        else
          throw std::runtime_error("antipodal_lift_square: inconsistent chart data");
        if (scalar == 0)
          scalar = s;
        else if (scalar != s)
          throw std::runtime_error("antipodal_lift_square: scalar differs between charts");
      }
  return scalar;
}

// ---------------------------------------------------------------------------
// SU(2) action.

// Chart-level bundle automorphism [q, a] -> [B q, a] for B in SU(2). Stored
// as the first column (alpha, beta) of B = [[alpha, -conj beta], [beta,
// conj alpha]]. Covers the adjoint rotation of the quaternion alpha + j beta
// on base points; commutes with the antipodal lift.
struct BundleAut {
  CDbl a{1, 0}, b{0, 0};
  int weight = 1;

  ChartPoint apply_base(const ChartPoint& p) const { return apply({p, CDbl(1, 0)}).base; }

  FiberPoint apply(const FiberPoint& p) const {
    // Components of B q in (z, w) coordinates, divided by the frame scale.
    CDbl zc, wc;
    if (p.base.chart == Chart::north) {
      zc = a - std::conj(b) * p.base.zeta;
      wc = b + std::conj(a) * p.base.zeta;
    } else {
      zc = a * p.base.zeta - std::conj(b);
      wc = b * p.base.zeta + std::conj(a);
    }
    double az = std::abs(zc), aw = std::abs(wc);
    // Land in the chart whose frame coefficient dominates; ties go north.
    if (az >= aw) {
      CDbl u = std::conj(zc) / az;
      return {{Chart::north, wc / zc}, detail::unit_power(u, weight) * p.alpha};
    }
    CDbl u = std::conj(wc) / aw;
    return {{Chart::south, zc / wc}, detail::unit_power(u, weight) * p.alpha};
  }

  Quat rotation_quat() const { return Quat{a.real(), a.imag(), b.real(), -b.imag()}; }
};

inline BundleAut su2_action(const Matrix<CDbl>& b, const StandardTriple& triple,
                            double tol = 1e-12) {
  if (b.rows() != 2 || b.cols() != 2) throw std::invalid_argument("su2_action: need 2x2");
  CDbl det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
  double uni = std::abs(std::norm(b(0, 0)) + std::norm(b(1, 0)) - 1.0) +
               std::abs(b(0, 1) + std::conj(b(1, 0))) + std::abs(b(1, 1) - std::conj(b(0, 0)));
  if (std::abs(det - CDbl(1, 0)) > tol || uni > tol)
    throw std::invalid_argument("su2_action: matrix is not special unitary");
  return BundleAut{b(0, 0), b(1, 0), triple.weight};
}

inline BundleAut su2_action(const Quat& g, const StandardTriple& triple) {
  if (std::abs(g.norm2() - 1.0) > 1e-12)
    throw std::invalid_argument("su2_action: quaternion is not unit");
  return BundleAut{CDbl(g.w, g.x), CDbl(g.y, -g.z), triple.weight};
}

// Equality of fiber points as points of the quotient bundle: the spinor
// frames must agree up to a circle factor u and the fibers up to u^{-weight}.
inline bool fiber_points_equal(const FiberPoint& p, const FiberPoint& q, int weight,
                               double tol = 1e-10) {
  auto fp = chart_frame(p.base), fq = chart_frame(q.base);
  CDbl ov = std::conj(fp[0]) * fq[0] + std::conj(fp[1]) * fq[1];
  double a = std::abs(ov);
  if (a < 0.1) return false;  // frames nearly orthogonal: distinct base points
  CDbl u = ov / a;
  double base_err = std::abs(fq[0] - u * fp[0]) + std::abs(fq[1] - u * fp[1]);
  CDbl uk = detail::unit_power(u, weight);
  double fiber_err = std::abs(q.alpha - p.alpha / uk);
  return base_err <= tol && fiber_err <= tol * (1.0 + std::abs(p.alpha));
}

// ---------------------------------------------------------------------------
// Centrally symmetric triangulations of the sphere.

struct TriangulatedSphere {
  std::vector<Vec3> vertices;               // unit vectors
  std::vector<std::array<int, 3>> faces;    // outward-oriented triangles
  std::vector<int> antipode;                // fixed-point-free involution

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  std::vector<std::pair<int, int>> undirected_edges() const {
    std::vector<std::pair<int, int>> e;
    for (const auto& f : faces)
      for (int s = 0; s < 3; ++s) {
        int u = f[s], v = f[(s + 1) % 3];
        if (u < v) e.emplace_back(u, v);
      }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
  }

  std::vector<std::vector<int>> vertex_adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (const auto& [u, v] : undirected_edges()) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& l : adj) std::sort(l.begin(), l.end());
    return adj;
  }

  // Shortest edge path between two vertices (breadth first, deterministic).
  std::vector<int> edge_path(int from, int to) const {
    auto adj = vertex_adjacency();
    std::vector<int> prev(vertices.size(), -1);
    std::queue<int> q;
    q.push(from);
    prev[from] = from;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      if (u == to) break;
      for (int v : adj[u])
        if (prev[v] < 0) {
          prev[v] = u;
          q.push(v);
        }
    }
    if (prev[to] < 0) throw std::runtime_error("edge_path: mesh not connected");
    std::vector<int> path{to};
    while (path.back() != from) path.push_back(prev[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
  }

  void validate(double tol = 1e-9) const {
    const int nv = n_vertices(), nf = n_faces();
    if (nv < 4 || nf < 4) throw std::invalid_argument("TriangulatedSphere: too small");
    for (const auto& v : vertices)
      if (std::abs(norm3(v) - 1.0) > tol)
        throw std::invalid_argument("TriangulatedSphere: vertex off the unit sphere");
    if (static_cast<int>(antipode.size()) != nv)
      throw std::invalid_argument("TriangulatedSphere: antipode table size");
    for (int i = 0; i < nv; ++i) {
      int a = antipode[i];
      if (a < 0 || a >= nv || a == i || antipode[a] != i)
        throw std::invalid_argument("TriangulatedSphere: antipode is not a free involution");
      Vec3 d = {vertices[i][0] + vertices[a][0], vertices[i][1] + vertices[a][1],
                vertices[i][2] + vertices[a][2]};
      if (norm3(d) > tol)
        throw std::invalid_argument("TriangulatedSphere: antipode pairing inexact");
    }
    // Closed oriented surface: every directed edge appears exactly once.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : faces) {
      if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
        throw std::invalid_argument("TriangulatedSphere: degenerate face");
      for (int s = 0; s < 3; ++s) ++directed[{f[s], f[(s + 1) % 3]}];
    }
    for (const auto& [e, c] : directed) {
      auto rev = directed.find({e.second, e.first});
      if (c != 1 || rev == directed.end() || rev->second != 1)
        throw std::invalid_argument("TriangulatedSphere: not a closed oriented surface");
    }
    int ne = static_cast<int>(directed.size()) / 2;
    if (nv - ne + nf != 2) throw std::invalid_argument("TriangulatedSphere: Euler characteristic");
    // Outward orientation.
    for (const auto& f : faces) {
      Vec3 u = {vertices[f[1]][0] - vertices[f[0]][0], vertices[f[1]][1] - vertices[f[0]][1],
                vertices[f[1]][2] - vertices[f[0]][2]};
      Vec3 v = {vertices[f[2]][0] - vertices[f[0]][0], vertices[f[2]][1] - vertices[f[0]][1],
                vertices[f[2]][2] - vertices[f[0]][2]};
      Vec3 c = {vertices[f[0]][0] + vertices[f[1]][0] + vertices[f[2]][0],
                vertices[f[0]][1] + vertices[f[1]][1] + vertices[f[2]][1],
                vertices[f[0]][2] + vertices[f[1]][2] + vertices[f[2]][2]};
      if (dot3(cross3(u, v), c) <= 0)
        throw std::invalid_argument("TriangulatedSphere: face not outward oriented");
    }
    // The antipodal image of every face is a face with reversed orientation.
    std::map<std::array<int, 3>, int> cyclic;  // canonical rotation -> parity seen
    auto canon = [](std::array<int, 3> f) {
      int m = std::min({f[0], f[1], f[2]});
      while (f[0] != m) f = {f[1], f[2], f[0]};
      return f;
    };
    for (const auto& f : faces) cyclic[canon(f)] = 1;
    for (const auto& f : faces) {
      std::array<int, 3> g = {antipode[f[2]], antipode[f[1]], antipode[f[0]]};
      if (cyclic.find(canon(g)) == cyclic.end())
        throw std::invalid_argument("TriangulatedSphere: antipodal face missing or misoriented");
    }
  }

  // Icosahedron subdivided `subdivisions` times: 20 * 4^s faces. Central
  // symmetry is bitwise exact (negation and normalization commute in IEEE
  // arithmetic), so the antipode table is built by exact coordinate lookup.
  static TriangulatedSphere icosphere(int subdivisions) {
    if (subdivisions < 0 || subdivisions > 7)
      throw std::invalid_argument("icosphere: subdivisions out of range");
    TriangulatedSphere m;
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    const double r = std::sqrt(1.0 + p * p);
    for (double s0 : {1.0, -1.0})
      for (double s1 : {p, -p}) {
        m.vertices.push_back({s0 / r, s1 / r, 0.0});
        m.vertices.push_back({0.0, s0 / r, s1 / r});
        m.vertices.push_back({s1 / r, 0.0, s0 / r});
      }
    // Edges join vertices at the minimal pairwise distance.
    double min_d = 10.0;
    for (int i = 0; i < 12; ++i)
      for (int j = i + 1; j < 12; ++j) {
        Vec3 d = {m.vertices[i][0] - m.vertices[j][0], m.vertices[i][1] - m.vertices[j][1],
                  m.vertices[i][2] - m.vertices[j][2]};
        min_d = std::min(min_d, norm3(d));
      }
    auto adjacent = [&](int i, int j) {
      Vec3 d = {m.vertices[i][0] - m.vertices[j][0], m.vertices[i][1] - m.vertices[j][1],
                m.vertices[i][2] - m.vertices[j][2]};
      return norm3(d) < 1.1 * min_d;
    };
    for (int i = 0; i < 12; ++i)
      for (int j = i + 1; j < 12; ++j)
        for (int k = j + 1; k < 12; ++k)
          if (adjacent(i, j) && adjacent(j, k) && adjacent(i, k)) {
            std::array<int, 3> f = {i, j, k};
            Vec3 u = {m.vertices[j][0] - m.vertices[i][0], m.vertices[j][1] - m.vertices[i][1],
                      m.vertices[j][2] - m.vertices[i][2]};
            Vec3 v = {m.vertices[k][0] - m.vertices[i][0], m.vertices[k][1] - m.vertices[i][1],
                      m.vertices[k][2] - m.vertices[i][2]};
            if (dot3(cross3(u, v), m.vertices[i]) < 0) std::swap(f[1], f[2]);
            m.faces.push_back(f);
          }
    for (int s = 0; s < subdivisions; ++s) m.subdivide_once();
    m.build_antipodes();
    m.validate();
    return m;
  }

  static TriangulatedSphere load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_off: cannot open " + path);
    std::string header;
    in >> header;
    if (header != "OFF") throw std::runtime_error("load_off: missing OFF header");
    int nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    if (!in || nv <= 0 || nf <= 0) throw std::runtime_error("load_off: bad counts");
    TriangulatedSphere m;
    m.vertices.resize(nv);
    for (auto& v : m.vertices) {
      in >> v[0] >> v[1] >> v[2];
      v = normalized3(v);
    }
    m.faces.resize(nf);
    for (auto& f : m.faces) {
      int k = 0;
      in >> k >> f[0] >> f[1] >> f[2];
      if (k != 3) throw std::runtime_error("load_off: only triangles supported");
    }
    if (!in) throw std::runtime_error("load_off: truncated file");
    m.build_antipodes(1e-6);
    m.validate(1e-6);
    return m;
  }

  void save_off(const std::string& path) const {
    std::ofstream out(path);
    out.precision(17);
    out << "OFF\n" << n_vertices() << " " << n_faces() << " 0\n";
    for (const auto& v : vertices) out << v[0] << " " << v[1] << " " << v[2] << "\n";
    for (const auto& f : faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    if (!out) throw std::runtime_error("save_off: write failed");
  }

 private:
  void subdivide_once() {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int i, int j) {
      auto key = std::minmax(i, j);
      auto it = mid.find({key.first, key.second});
      if (it != mid.end()) return it->second;
      const Vec3 &a = vertices[key.first], &b = vertices[key.second];
      vertices.push_back(normalized3({a[0] + b[0], a[1] + b[1], a[2] + b[2]}));
      int idx = static_cast<int>(vertices.size()) - 1;
      mid[{key.first, key.second}] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({ab, f[1], bc});
      next.push_back({ca, bc, f[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  void build_antipodes(double tol = 0.0) {
    const int nv = n_vertices();
    antipode.assign(nv, -1);
    if (tol == 0.0) {
      std::map<std::array<double, 3>, int> lookup;
      for (int i = 0; i < nv; ++i) lookup[vertices[i]] = i;
      for (int i = 0; i < nv; ++i) {
        auto it = lookup.find(neg3(vertices[i]));
        if (it == lookup.end())
          throw std::invalid_argument("TriangulatedSphere: mesh not centrally symmetric");
        antipode[i] = it->second;
      }
      return;
    }
    for (int i = 0; i < nv; ++i) {
      for (int j = 0; j < nv; ++j) {
        Vec3 d = {vertices[i][0] + vertices[j][0], vertices[i][1] + vertices[j][1],
                  vertices[i][2] + vertices[j][2]};
        if (norm3(d) < tol) {
          antipode[i] = j;
          break;
        }
      }
      if (antipode[i] < 0)
        throw std::invalid_argument("TriangulatedSphere: mesh not centrally symmetric");
    }
  }
};

// ---------------------------------------------------------------------------
// Chern number by Berry plaquettes.

struct ChernReport {
  int chern = 0;
  double residue = 0;        // |phase sum / 2 pi - chern| before rounding
  double max_plaquette = 0;  // largest single-face phase magnitude
};

// Gauge-invariant plaquette sum: each vertex carries the unit section
// s = conj(spinor) of the weight-one bundle inside the trivial C^2 bundle
// (conjugation makes the embedding linear in the fiber and lands the standard
// model on +1); links are <s_u, s_v>^weight and each face contributes the
// phase of its oriented link product. The sum over a closed mesh is an exact
// multiple of 2 pi up to rounding noise.
inline ChernReport chern_report(const StandardTriple& triple, const TriangulatedSphere& mesh) {
  if (mesh.n_faces() < 80)
    throw std::invalid_argument("chern_report: mesh resolution below 80 faces");
  const int k = triple.weight;
  std::vector<std::array<CDbl, 2>> sec(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    auto zw = spinor_coords(spinor_over(mesh.vertices[i]));
    sec[i] = {std::conj(zw[0]), std::conj(zw[1])};
  }
  auto link = [&](int u, int v) {
    CDbl t = std::conj(sec[u][0]) * sec[v][0] + std::conj(sec[u][1]) * sec[v][1];
    return detail::unit_power(t, k);
  };
  ChernReport rep;
  double sum = 0;
  for (const auto& f : mesh.faces) {
    CDbl pl = link(f[0], f[1]) * link(f[1], f[2]) * link(f[2], f[0]);
    if (std::abs(pl) < 1e-12) throw std::runtime_error("chern_report: degenerate plaquette");
    double phase = std::arg(pl);
    rep.max_plaquette = std::max(rep.max_plaquette, std::abs(phase));
    if (std::abs(phase) > 0.75 * M_PI)
      throw std::runtime_error("chern_report: plaquette phase near pi, refine the mesh");
    sum += phase;
  }
  double n = sum / (2.0 * M_PI);
  rep.chern = static_cast<int>(std::llround(n));
  rep.residue = std::abs(n - rep.chern);
  if (rep.residue > 1e-6)
    throw std::runtime_error("chern_report: field strength residue too large, refine the mesh");
  return rep;
}

inline int chern_number(const StandardTriple& triple, const TriangulatedSphere& mesh) {
  return chern_report(triple, mesh).chern;
}

// ---------------------------------------------------------------------------
// The two-component invariant.

// Samples of a nonvanishing function with phi(x) = conj(phi(-x)). The mesh
// must outlive the function.
struct EquivariantFunction {
  const TriangulatedSphere* mesh = nullptr;
  std::vector<CDbl> values;

  EquivariantFunction(const TriangulatedSphere& m, std::vector<CDbl> vals, double tol = 1e-9)
      : mesh(&m), values(std::move(vals)) {
    if (static_cast<int>(values.size()) != m.n_vertices())
      throw std::invalid_argument("EquivariantFunction: sample count mismatch");
    double scale = 0;
    for (const CDbl& v : values) scale = std::max(scale, std::abs(v));
    for (const CDbl& v : values)
      if (std::abs(v) <= 1e-12 * scale)
        throw std::invalid_argument("EquivariantFunction: vanishing sample");
    for (int i = 0; i < m.n_vertices(); ++i)
      if (std::abs(values[i] - std::conj(values[m.antipode[i]])) > tol * scale)
        throw std::invalid_argument("EquivariantFunction: antipodal relation violated");
  }
};

namespace detail {
// Continuous phase along a vertex path; every step must be a short arc.
inline double lift_along(const std::vector<CDbl>& vals, const std::vector<int>& path,
                         double start) {
  double theta = start;
  for (size_t s = 0; s + 1 < path.size(); ++s) {
    double step = std::arg(vals[path[s + 1]] / vals[path[s]]);
    if (std::abs(step) >= 0.5 * M_PI)
      throw std::runtime_error("component_invariant: phase step >= pi/2, refine the mesh");
    theta += step;
  }
  return theta;
}
}  // namespace detail

// Which of the two components of the equivariant function space the samples
// lie in: lift the phase along an edge path from x to -x; then theta(x) +
// theta(-x) = 2 pi n and the component is (-1)^n. Checked over several base
// points; n is also checked to be an integer to rounding accuracy.
inline int component_invariant(const EquivariantFunction& f) {
  const TriangulatedSphere& m = *f.mesh;
  int result = 0;
  const int nv = m.n_vertices();
  for (int base : {0, nv / 5, 2 * nv / 5, 3 * nv / 5, 4 * nv / 5}) {
    auto path = m.edge_path(base, m.antipode[base]);
    double t0 = std::arg(f.values[base]);
    double t1 = detail::lift_along(f.values, path, t0);
    double n = (t0 + t1) / (2.0 * M_PI);
    long long ni = std::llround(n);
    if (std::abs(n - ni) > 1e-6)
      throw std::runtime_error("component_invariant: winding not integral, refine the mesh");
    int s = (ni % 2 == 0) ? 1 : -1;
    if (result == 0)
      result = s;
    else if (result != s)
      throw std::runtime_error("component_invariant: base point dependence, refine the mesh");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Square root correction.

struct SquareRootCorrection {
  std::vector<CDbl> chi;  // chi^2 = psi
  std::vector<CDbl> phi;  // phi = chi / |chi|^2
  double max_square_residual = 0;
  double max_compatibility_residual = 0;  // |conj(phi(x)) / phi(-x) * psi(x) - 1|
};

// Global continuous square root of psi with psi(x) conj(psi(-x)) = 1, via a
// spanning-tree phase lift (the sphere is simply connected; a non-tree edge
// with an inconsistent lift is reported as failure). The correction
// phi = chi / |chi|^2 satisfies conj(phi(x)) / phi(-x) * psi(x) = 1: the
// scalar chi(x) conj(chi(-x)) is constant, equal to +1 or -1, and the
// antisymmetry of the lifted phase difference rules out -1.
inline SquareRootCorrection local_square_root_correction(const TriangulatedSphere& mesh,
                                                         const std::vector<CDbl>& psi,
                                                         double pre_tol = 1e-8) {
  const int nv = mesh.n_vertices();
  if (static_cast<int>(psi.size()) != nv)
    throw std::invalid_argument("local_square_root_correction: sample count mismatch");
  double scale = 0;
  for (const CDbl& v : psi) scale = std::max(scale, std::abs(v));
  for (const CDbl& v : psi)
    if (std::abs(v) <= 1e-12 * scale)
      throw std::invalid_argument("local_square_root_correction: vanishing sample");
  for (int i = 0; i < nv; ++i)
    if (std::abs(psi[i] * std::conj(psi[mesh.antipode[i]]) - 1.0) > pre_tol)
      throw std::invalid_argument("local_square_root_correction: pairing condition violated");

  auto adj = mesh.vertex_adjacency();
  std::vector<double> theta(nv, 0);
  std::vector<char> seen(nv, 0);
  std::queue<int> q;
  theta[0] = std::arg(psi[0]);
  seen[0] = 1;
  q.push(0);
  std::vector<std::pair<int, int>> cross;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (seen[v]) {
        if (u < v) cross.emplace_back(u, v);
        continue;
      }
      double step = std::arg(psi[v] / psi[u]);
      if (std::abs(step) >= 0.5 * M_PI)
        throw std::runtime_error("local_square_root_correction: phase step >= pi/2");
      theta[v] = theta[u] + step;
      seen[v] = 1;
      q.push(v);
    }
  }
  for (int i = 0; i < nv; ++i)
    if (!seen[i]) throw std::runtime_error("local_square_root_correction: mesh not connected");
  for (const auto& [u, v] : cross) {
    double r = theta[v] - theta[u] - std::arg(psi[v] / psi[u]);
    if (std::abs(r) > 1e-6)
      throw std::runtime_error("local_square_root_correction: phase lift fails on a loop");
  }

  SquareRootCorrection out;
  out.chi.resize(nv);
  out.phi.resize(nv);
  for (int i = 0; i < nv; ++i) {
    double r = std::sqrt(std::abs(psi[i]));
    out.chi[i] = std::polar(r, theta[i] / 2.0);
    out.phi[i] = out.chi[i] / std::norm(out.chi[i]);
    out.max_square_residual =
        std::max(out.max_square_residual, std::abs(out.chi[i] * out.chi[i] - psi[i]));
  }
  for (int i = 0; i < nv; ++i) {
    CDbl c = std::conj(out.phi[i]) / out.phi[mesh.antipode[i]] * psi[i];
    out.max_compatibility_residual =
        std::max(out.max_compatibility_residual, std::abs(c - 1.0));
  }
  return out;
}

}  // namespace spinlab
