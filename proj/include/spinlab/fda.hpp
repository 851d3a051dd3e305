#pragma once

// Finite-dimensional approximation (fda) models over a point base.
//
// A model packages the linear data of a compactly-supported monopole-type
// map: an oriented inner-product space E, a symmetry-split source
// V = V_H (+) V_R and target W = W_H (+) W_R, a linear part D = D_H (+) D_R,
// an isometric embedding i: E -> W_R, and a fiberwise map
// F: S(E) x B'(V) -> W.  The circle-with-flip group Pin(2) = U(1) u U(1)j
// acts on the quaternionic summands by right multiplication and on the
// real summands and on E through the sign character (U(1) -> +1, j -> -1).
//
// check_axioms runs the nine structural axioms numerically: the group
// relations and metric invariance, quaternion-linearity of D_H, isometry of
// i and of i + D_R, equivariance of F on a sampled group grid, and
// nonvanishing of F on the boundary and on the v_H = 0 slice (with a flag
// when the slice margin is carried by the real component alone).
//
// The characteristic-class side works in the truncated ring
// Q[omega, x]/(omega^2, x^{2n}): the index-form integrand is expanded
// there, the Thom pullback enters through its fiber moments (the only data
// a point-base model retains is the fiberwise mapping degree), and the
// degree-2 extraction collapses to that degree.  mapping_degree computes
// the degree of a sphere self-map by counting signed preimages of a
// sampled regular value; hk3_conditions chains the two.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/dense.hpp"
#include "core/scalar.hpp"
#include "quaternion.hpp"

namespace spinlab {

namespace detail {

inline double vnorm(const std::vector<double>& v) {
  double s = 0;
  for (double t : v) s += t * t;
  return std::sqrt(s);
}

inline Quat quat_block(const std::vector<double>& v, int l) {
  return {v[4 * l], v[4 * l + 1], v[4 * l + 2], v[4 * l + 3]};
}

inline void set_quat_block(std::vector<double>& v, int l, const Quat& q) {
  v[4 * l] = q.w;
  v[4 * l + 1] = q.x;
  v[4 * l + 2] = q.y;
  v[4 * l + 3] = q.z;
}

// Right multiplication by q on each quaternion block.
inline std::vector<double> right_mult_blocks(const std::vector<double>& v, const Quat& q) {
  std::vector<double> out(v.size());
  for (int l = 0; l < static_cast<int>(v.size()) / 4; ++l)
    set_quat_block(out, l, quat_block(v, l) * q);
  return out;
}

inline std::vector<double> scaled(const std::vector<double>& v, double s) {
  std::vector<double> out(v);
  for (double& t : out) t *= s;
  return out;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(dim);
  double n = 0;
  do {
    for (double& t : v) t = g(rng);
    n = vnorm(v);
  } while (n < 1e-6);
  for (double& t : v) t /= n;
  return v;
}

inline std::vector<double> random_ball(std::mt19937_64& rng, int dim) {
  if (dim == 0) return {};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = std::pow(u(rng), 1.0 / dim);
  return scaled(random_unit(rng, dim), r);
}

}  // namespace detail

// Element of Pin(2) inside the unit quaternions: e^{i theta} or e^{i theta} j.
struct Pin2 {
  double theta = 0.0;
  bool flip = false;

  Quat quat() const {
    Quat u{std::cos(theta), std::sin(theta), 0.0, 0.0};
    if (!flip) return u;
    return u * Quat{0.0, 0.0, 1.0, 0.0};
  }
  int sign() const { return flip ? -1 : 1; }
};

// Point-base fda model.  The fiberwise map is a fixed polynomial family
//
//   F_H = d_h v_H + c_cliff (v_H i) a + c_cubic_h |v_H|^2 d_h v_H
//         + c_skew (v_H i) a^2
//   F_R = d_r v_R + c_moment i(x(v_H i conj(v_H))) + c_cubic_r |v_R|^2 i(e)
//         - c_taut i(e)
//
// with a the first real coordinate and x( ) the imaginary-part vector in
// the (a, b, c) <-> ci + bj - ak convention.  Every term except the a^2
// Clifford one is Pin(2)-equivariant; that term violates the flip half of
// the group and exists so the axiom checker has a genuine failure to
// catch.  Trailing `stab` real coordinates are carried by the identity
// (source to target), the direct-sum stabilization of the model.
struct FdaModel {
  std::string label = "custom";
  int dim_e = 3;
  int orientation = 1;  // +1: standard orientation of R^dim_e, -1: reversed
  int n_vh = 0, n_vr = 0, n_wh = 0, n_wr = 0;
  int stab = 0;
  Matrix<double> i_map;  // n_wr x dim_e
  Matrix<double> d_r;    // n_wr x n_vr
  Matrix<double> d_h;    // 4 n_wh x 4 n_vh
  double c_cliff = 0, c_moment = 0, c_cubic_h = 0, c_cubic_r = 0, c_skew = 0, c_taut = 1;

  int vh_dim() const { return 4 * n_vh; }
  int wh_dim() const { return 4 * n_wh; }
  int vr_dim() const { return n_vr + stab; }
  int wr_dim() const { return n_wr + stab; }

  void validate() const {
    if (dim_e < 1) throw std::invalid_argument("FdaModel: dim_e must be positive");
    if (orientation != 1 && orientation != -1)
      throw std::invalid_argument("FdaModel: orientation must be +-1");
    if (n_vh < 0 || n_vr < 0 || n_wh < 0 || n_wr < 0 || stab < 0)
      throw std::invalid_argument("FdaModel: negative rank");
    if (i_map.rows() != n_wr || i_map.cols() != dim_e)
      throw std::invalid_argument("FdaModel: i_map shape");
    if (d_r.rows() != n_wr || d_r.cols() != n_vr) throw std::invalid_argument("FdaModel: d_r shape");
    if (d_h.rows() != wh_dim() || d_h.cols() != vh_dim())
      throw std::invalid_argument("FdaModel: d_h shape");
    if ((c_cliff != 0 || c_skew != 0) && n_wh != n_vh)
      throw std::invalid_argument("FdaModel: Clifford terms need matching quaternionic ranks");
    if (c_moment != 0 && dim_e != 3)
      throw std::invalid_argument("FdaModel: moment term needs dim_e = 3");
  }

  // F(e, v_H, v_R) for e on S(E), |v_H| <= 1, |v_R| <= 1 (not enforced).
  std::vector<double> operator()(const std::vector<double>& e, const std::vector<double>& vh,
                                 const std::vector<double>& vr) const {
    if (static_cast<int>(e.size()) != dim_e || static_cast<int>(vh.size()) != vh_dim() ||
        static_cast<int>(vr.size()) != vr_dim())
      throw std::invalid_argument("FdaModel: argument size");
    const double a = n_vr > 0 ? vr[0] : 0.0;
    const double nh2 = [&] {
      double s = 0;
      for (double t : vh) s += t * t;
      return s;
    }();

    std::vector<double> wh = d_h.apply(vh);
    if (c_cubic_h != 0)
      for (size_t t = 0; t < wh.size(); ++t) wh[t] *= 1.0 + c_cubic_h * nh2;
    if (c_cliff != 0 || c_skew != 0) {
      const double coef = c_cliff * a + c_skew * a * a;
      for (int l = 0; l < n_vh; ++l) {
        Quat qi = detail::quat_block(vh, l) * Quat{0, 1, 0, 0};
        wh[4 * l] += coef * qi.w;
        wh[4 * l + 1] += coef * qi.x;
        wh[4 * l + 2] += coef * qi.y;
        wh[4 * l + 3] += coef * qi.z;
      }
    }

    std::vector<double> vr_base(vr.begin(), vr.begin() + n_vr);
    std::vector<double> wr = d_r.apply(vr_base);
    if (c_moment != 0) {
      Quat m{0, 0, 0, 0};
      for (int l = 0; l < n_vh; ++l) {
        Quat q = detail::quat_block(vh, l);
        m = m + q * Quat{0, 1, 0, 0} * q.conj();
      }
      // (a, b, c) components of m = ci + bj - ak.
      std::array<double, 3> x3 = {-m.z, m.y, m.x};
      for (int r = 0; r < n_wr; ++r)
        for (int c = 0; c < 3; ++c) wr[r] += c_moment * i_map(r, c) * x3[c];
    }
    double nr2 = 0;
    for (double t : vr) nr2 += t * t;
    const double taut = -c_taut + c_cubic_r * nr2;
    for (int r = 0; r < n_wr; ++r) {
      double ie = 0;
      for (int c = 0; c < dim_e; ++c) ie += i_map(r, c) * e[c];
      wr[r] += taut * ie;
    }

    std::vector<double> out;
    out.reserve(wh.size() + wr.size() + stab);
    out.insert(out.end(), wh.begin(), wh.end());
    out.insert(out.end(), wr.begin(), wr.end());
    out.insert(out.end(), vr.begin() + n_vr, vr.end());
    return out;
  }

  // Pin(2) action on the source and target coordinate vectors.
  std::vector<double> act_v_h(const Pin2& g, const std::vector<double>& vh) const {
    return detail::right_mult_blocks(vh, g.quat());
  }
  std::vector<double> act_v_r(const Pin2& g, const std::vector<double>& vr) const {
    return detail::scaled(vr, g.sign());
  }
  std::vector<double> act_w(const Pin2& g, const std::vector<double>& w) const {
    std::vector<double> wh(w.begin(), w.begin() + wh_dim());
    wh = detail::right_mult_blocks(wh, g.quat());
    std::vector<double> out(wh);
    for (size_t t = wh.size(); t < w.size(); ++t) out.push_back(g.sign() * w[t]);
    return out;
  }

  // The monopole-shaped toy at ranks (V_H, V_R, W_H, W_R) = (1, 1, 1, 4)
  // with W_R = E (+) V_R: D_H the identity, Clifford and moment terms on,
  // tautological term subtracted.
  static FdaModel sw_toy() {
    FdaModel m;
    m.label = "sw-quadratic";
    m.n_vh = m.n_wh = 1;
    m.n_vr = 1;
    m.n_wr = 4;
    m.i_map = Matrix<double>(4, 3);
    for (int c = 0; c < 3; ++c) m.i_map(c, c) = 1.0;
    m.d_r = Matrix<double>(4, 1);
    m.d_r(3, 0) = 1.0;
    m.d_h = Matrix<double>::identity(4);
    m.c_cliff = 1.0;
    m.c_moment = 1.0;
    m.validate();
    return m;
  }

  // Linear model with a degenerate quaternionic part: F = D - Delta, D_H = 0.
  static FdaModel linear_toy() {
    FdaModel m = sw_toy();
    m.label = "linear";
    m.d_h = Matrix<double>(4, 4);
    m.c_cliff = 0;
    m.c_moment = 0;
    m.validate();
    return m;
  }

  // sw_toy with the flip-violating a^2 Clifford term switched on.
  static FdaModel broken_toy() {
    FdaModel m = sw_toy();
    m.label = "broken";
    m.c_skew = 0.7;
    m.validate();
    return m;
  }
};

// Direct sum with the identity on extra real coordinates.  The linear part
// gains an identity block, the embedding i gains zero rows, and F carries
// the new coordinates through unchanged.
inline FdaModel stabilize(const FdaModel& m, int extra) {
  if (extra < 0) throw std::invalid_argument("stabilize: negative rank");
  FdaModel out = m;
  out.stab += extra;
  return out;
}

struct AxiomCheck {
  int index = 0;
  bool pass = false;
  double residual = 0.0;  // residual for identities, margin for nonvanishing
  std::string note;
};

struct AxiomReport {
  std::array<AxiomCheck, 9> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Numerical run of the nine model axioms.  Identity-type axioms must hold
// to 1e-10; the nonvanishing margin must clear 1e-9.
inline AxiomReport check_axioms(const FdaModel& m, int samples = 40, std::uint64_t seed = 7) {
  m.validate();
  AxiomReport rep;
  for (int i = 0; i < 9; ++i) rep.checks[i].index = i + 1;
  std::mt19937_64 rng(seed);
  const double tol = 1e-10;

  // (1) base space: a point.  (2) E with metric and orientation flag.
  rep.checks[0] = {1, true, 0.0, "base is a point"};
  rep.checks[1] = {2, true, 0.0, "E carries the standard metric; orientation " +
                                     std::string(m.orientation > 0 ? "+1" : "-1")};

  // (3) quaternionic structure on the H summands: right-multiplication
  // block action satisfies the algebra relations.
  double r3 = 0;
  for (int s = 0; s < 8; ++s) {
    std::vector<double> v = detail::random_unit(rng, std::max(4, m.vh_dim()));
    auto ij = detail::right_mult_blocks(detail::right_mult_blocks(v, Quat{0, 1, 0, 0}),
                                        Quat{0, 0, 1, 0});
    auto k = detail::right_mult_blocks(v, Quat{0, 0, 0, 1});
    for (size_t t = 0; t < v.size(); ++t) r3 = std::max(r3, std::abs(ij[t] - k[t]));
  }
  rep.checks[2] = {3, r3 <= tol, r3, "right multiplication realizes the quaternion relations"};

  // (4) metric invariance of the group action.
  double r4 = 0;
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  for (int s = 0; s < samples; ++s) {
    Pin2 g{ang(rng), (s % 2) == 1};
    if (m.vh_dim() > 0) {
      auto v = detail::random_unit(rng, m.vh_dim());
      r4 = std::max(r4, std::abs(detail::vnorm(m.act_v_h(g, v)) - 1.0));
    }
    if (m.vr_dim() > 0) {
      auto v = detail::random_unit(rng, m.vr_dim());
      r4 = std::max(r4, std::abs(detail::vnorm(m.act_v_r(g, v)) - 1.0));
    }
  }
  rep.checks[3] = {4, r4 <= tol, r4, "group acts by isometries on all summands"};

  // (5) i injective, isometric, equivariant (sign actions make
  // equivariance automatic for a linear map).
  double r5 = 0;
  for (int a = 0; a < m.dim_e; ++a)
    for (int b = 0; b < m.dim_e; ++b) {
      double g = 0;
      for (int r = 0; r < m.i_map.rows(); ++r) g += m.i_map(r, a) * m.i_map(r, b);
      r5 = std::max(r5, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  rep.checks[4] = {5, r5 <= tol, r5, "i is an isometric embedding; sign equivariance is automatic"};

  // (6) D respects the splitting and the symmetry: D_H commutes with the
  // quaternionic structure (D_R is sign-equivariant automatically).
  double r6 = 0;
  if (m.vh_dim() > 0 && m.wh_dim() > 0)
    for (const Quat q : {Quat{0, 1, 0, 0}, Quat{0, 0, 1, 0}, Quat{0, 0, 0, 1}})
      for (int s = 0; s < 8; ++s) {
        auto v = detail::random_unit(rng, m.vh_dim());
        auto lhs = m.d_h.apply(detail::right_mult_blocks(v, q));
        auto rhs = detail::right_mult_blocks(m.d_h.apply(v), q);
        for (size_t t = 0; t < lhs.size(); ++t) r6 = std::max(r6, std::abs(lhs[t] - rhs[t]));
      }
  rep.checks[5] = {6, r6 <= tol, r6, "D_H is quaternion-linear"};

  // (7) i + D_R: E (+) V_R -> W_R is a metric-preserving isomorphism
  // (stabilization block included).
  const int rows = m.wr_dim(), cols = m.dim_e + m.vr_dim();
  if (rows != cols) {
    rep.checks[6] = {7, false, static_cast<double>(std::abs(rows - cols)),
                     "i + D_R is not square: W_R rank differs from E + V_R"};
  } else {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
    for (int r = 0; r < m.n_wr; ++r) {
      for (int c = 0; c < m.dim_e; ++c) M(r, c) = m.i_map(r, c);
      for (int c = 0; c < m.n_vr; ++c) M(r, m.dim_e + c) = m.d_r(r, c);
    }
    for (int s = 0; s < m.stab; ++s) M(m.n_wr + s, m.dim_e + m.n_vr + s) = 1.0;
    double r7 = (M.transpose() * M - Eigen::MatrixXd::Identity(cols, cols))
                    .cwiseAbs()
                    .maxCoeff();
    rep.checks[6] = {7, r7 <= tol, r7, "i + D_R is a metric-preserving isomorphism"};
  }

  // (8) equivariance of F over a sampled group grid.
  double r8h = 0, r8r = 0, r8h_flip = 0, r8r_flip = 0;
  for (int s = 0; s < samples; ++s) {
    auto e = detail::random_unit(rng, m.dim_e);
    auto vh = detail::random_ball(rng, m.vh_dim());
    auto vr = detail::random_ball(rng, m.vr_dim());
    auto w = m(e, vh, vr);
    for (int gi = 0; gi < 16; ++gi)
      for (bool flip : {false, true}) {
        Pin2 g{2 * M_PI * gi / 16.0, flip};
        auto lhs = m(detail::scaled(e, g.sign()), m.act_v_h(g, vh), m.act_v_r(g, vr));
        auto rhs = m.act_w(g, w);
        for (size_t t = 0; t < lhs.size(); ++t) {
          double d = std::abs(lhs[t] - rhs[t]);
          bool hpart = t < static_cast<size_t>(m.wh_dim());
          double& slot = flip ? (hpart ? r8h_flip : r8r_flip) : (hpart ? r8h : r8r);
          slot = std::max(slot, d);
        }
      }
  }
  {
    double worst = std::max({r8h, r8r, r8h_flip, r8r_flip});
    std::string note = "F is Pin(2)-equivariant on the sampled grid";
    if (worst > tol) {
      note = "equivariance fails under ";
      note += (std::max(r8h_flip, r8r_flip) > std::max(r8h, r8r))
                  ? "the orientation-reversing component"
                  : "the circle component";
      note += (std::max(r8h, r8h_flip) > std::max(r8r, r8r_flip))
                  ? " on the quaternionic factor"
                  : " on the real factor";
    }
    rep.checks[7] = {8, worst <= tol, worst, note};
  }

  // (9) F nonvanishing on the boundary of B'(V) and on the v_H = 0 slice.
  double margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    auto e = detail::random_unit(rng, m.dim_e);
    if (m.vh_dim() > 0) {
      auto vh = detail::random_unit(rng, m.vh_dim());
      margin = std::min(margin, detail::vnorm(m(e, vh, detail::random_ball(rng, m.vr_dim()))));
    }
    if (m.vr_dim() > 0) {
      auto vr = detail::random_unit(rng, m.vr_dim());
      margin = std::min(margin, detail::vnorm(m(e, detail::random_ball(rng, m.vh_dim()), vr)));
    }
    std::vector<double> zero_h(m.vh_dim(), 0.0);
    margin = std::min(margin, detail::vnorm(m(e, zero_h, detail::random_ball(rng, m.vr_dim()))));
  }
  {
    std::string note = "F clears the boundary and the v_H = 0 slice";
    if (m.vh_dim() > 0 && m.wh_dim() > 0) {
      Eigen::MatrixXd dh(m.wh_dim(), m.vh_dim());
      for (int r = 0; r < m.wh_dim(); ++r)
        for (int c = 0; c < m.vh_dim(); ++c) dh(r, c) = m.d_h(r, c);
      double smin = dh.jacobiSvd().singularValues().minCoeff();
      if (smin < 1e-12)
        note = "slice nonvanishing rests on the real component alone (D_H degenerate)";
    }
    rep.checks[8] = {9, margin > 1e-9, margin, note};
  }
  return rep;
}

// Compactifying reparametrization of the fiberwise map: the real ball
// direction is traded for an interval coordinate,
//
//   F'(e, v_H, t, v_R) = F(e, v_H, ((t + 1)/2) v_R),   t in [-1, 1],
//
// and the rho-normalized extension accepts the noncompact (t, v_R) in
// [0, inf) x V_R by pulling both through rho.
struct ReparamF {
  const FdaModel* model = nullptr;

  // Smooth [0, inf) -> [0, 1]: identity below 1/2, constant 1 from 1 on.
  static double rho(double s) {
    if (s <= 0.5) return s;
    if (s >= 1.0) return 1.0;
    auto g = [](double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
    double u = 2.0 * (s - 0.5);
    double sig = g(u) / (g(u) + g(1.0 - u));
    return s + (1.0 - s) * sig;
  }

  std::vector<double> eval(const std::vector<double>& e, const std::vector<double>& vh, double t,
                           const std::vector<double>& vr) const {
    if (std::abs(t) > 1.0 + 1e-12) throw std::invalid_argument("ReparamF: t outside [-1, 1]");
    return (*model)(e, vh, detail::scaled(vr, (t + 1.0) / 2.0));
  }

  std::vector<double> eval_extended(const std::vector<double>& e, const std::vector<double>& vh,
                                    double t_ray, const std::vector<double>& vr) const {
    if (t_ray < 0) throw std::invalid_argument("ReparamF: ray coordinate must be nonnegative");
    double n = detail::vnorm(vr);
    std::vector<double> vrb = n > 0 ? detail::scaled(vr, rho(n) / n) : vr;
    return eval(e, vh, 2.0 * rho(t_ray) - 1.0, vrb);
  }
};

inline ReparamF reparametrize_F(const FdaModel& m) {
  m.validate();
  return ReparamF{&m};
}

// ---------------------------------------------------------------------------
// Truncated characteristic-class ring Q[omega, x]/(omega^2, x^{m+1}).

class CohomologyRing {
 public:
  // m = 2 n_vh - 1: x is the hyperplane class of the projectivized
  // quaternionic source sphere.
  explicit CohomologyRing(int n_vh) : m_(2 * n_vh - 1) {
    if (n_vh < 1) throw std::invalid_argument("CohomologyRing: ring truncation needs n_vh >= 1");
    if (n_vh > 6) throw std::invalid_argument("CohomologyRing: truncation order limit exceeded");
  }

  struct Element {
    std::vector<Rational> c0, c1;  // c0[j] x^j + c1[j] omega x^j
  };

  int top() const { return m_; }

  Element zero() const { return {std::vector<Rational>(m_ + 1, Rational(0)),
                                 std::vector<Rational>(m_ + 1, Rational(0))}; }
  Element constant(const Rational& r) const {
    Element e = zero();
    e.c0[0] = r;
    return e;
  }

  Element add(const Element& a, const Element& b) const {
    Element e = zero();
    for (int j = 0; j <= m_; ++j) {
      e.c0[j] = a.c0[j] + b.c0[j];
      e.c1[j] = a.c1[j] + b.c1[j];
    }
    return e;
  }

  Element mul(const Element& a, const Element& b) const {
    Element e = zero();
    for (int p = 0; p <= m_; ++p)
      for (int q = 0; p + q <= m_; ++q) {
        e.c0[p + q] += a.c0[p] * b.c0[q];
        e.c1[p + q] += a.c0[p] * b.c1[q] + a.c1[p] * b.c0[q];  // omega^2 = 0
      }
    return e;
  }

  // (1 - e^{2 omega})/(2 omega): with omega^2 = 0 the numerator is exactly
  // -2 omega, and the quotient is the constant -1.  (The omega-linear
  // ambiguity of dividing by a nilpotent is immaterial downstream: the
  // x-factor it multiplies has no constant term.)
  Element omega_factor() const { return constant(Rational(-1)); }

  // ((1 - e^x)/x)^{dim_C W_H} (x/(e^{x/2} - e^{-x/2}))^{dim_C V_H} (1 - e^x).
  Element x_factor(int dim_c_wh, int dim_c_vh) const {
    if (dim_c_wh < 0 || dim_c_vh < 0) throw std::invalid_argument("x_factor: negative rank");
    std::vector<Rational> s1(m_ + 1), s2(m_ + 1), s3(m_ + 1);
    for (int j = 0; j <= m_; ++j) {
      s1[j] = -Rational(1, factorial(j + 1));       // (1 - e^x)/x
      s3[j] = j == 0 ? Rational(0) : -Rational(1, factorial(j));  // 1 - e^x
      s2[j] = (j % 2 == 0) ? Rational(1, (1LL << j) * factorial(j + 1)) : Rational(0);
    }
    std::vector<Rational> p = pow_series(s1, dim_c_wh);
    p = mul_series(p, pow_series(invert_series(s2), dim_c_vh));
    p = mul_series(p, s3);
    Element e = zero();
    e.c0 = p;
    return e;
  }

 private:
  static long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }
  std::vector<Rational> mul_series(const std::vector<Rational>& a,
                                   const std::vector<Rational>& b) const {
    std::vector<Rational> c(m_ + 1, Rational(0));
    for (int p = 0; p <= m_; ++p)
      for (int q = 0; p + q <= m_; ++q) c[p + q] += a[p] * b[q];
    return c;
  }
  std::vector<Rational> pow_series(const std::vector<Rational>& a, int n) const {
    std::vector<Rational> c(m_ + 1, Rational(0));
    c[0] = Rational(1);
    for (int i = 0; i < n; ++i) c = mul_series(c, a);
    return c;
  }
  // Multiplicative inverse of a series with unit constant term.
  std::vector<Rational> invert_series(const std::vector<Rational>& a) const {
    if (a[0] != Rational(1)) throw std::logic_error("invert_series: constant term must be 1");
    std::vector<Rational> c(m_ + 1, Rational(0));
    c[0] = Rational(1);
    for (int j = 1; j <= m_; ++j) {
      Rational s(0);
      for (int p = 1; p <= j; ++p) s += a[p] * c[j - p];
      c[j] = -s;
    }
    return c;
  }
  int m_;
};

// Degree-2 part of the index-form fiber integral.  The Thom pullback of a
// point-base model enters only through its fiber moments: the fiberwise
// mapping degree `degree` gives
//
//   int x^j . F*tau_W  =  degree        (j = 0, degree-0 class)
//                      =  degree omega  (j = 1, degree-2 class)
//                      =  0             (j >= 2),
//
// which is the reduction used to identify the degree-2 term with
// int x . F*tau_W.  The integrand's x-linear coefficient is -1 for every
// rank pair, so the extraction returns `degree` independently of
// (n_vh, n_wh): the stability of the degree-2 term.
inline long long index_integrand_degree2(int n_vh, int n_wh, long long degree) {
  CohomologyRing ring(n_vh);
  auto p = ring.mul(ring.omega_factor(), ring.x_factor(2 * n_wh, 2 * n_vh));
  // Moments: the x^1 coefficient pairs with degree.omega, the omega x^0
  // coefficient with degree; everything else integrates to zero.
  Rational deg2 = p.c0[1] + p.c1[0];
  Rational out = Rational(degree) * deg2;
  if (out.denominator() != 1) throw std::logic_error("index_integrand_degree2: non-integer class");
  return out.numerator();
}

// ---------------------------------------------------------------------------
// Mapping degree of sphere self-maps, k <= 3.

using SphereMap = std::function<std::vector<double>(const std::vector<double>&)>;

namespace detail {

struct DegreeAttempt {
  bool regular = true;
  int degree = 0;
};

inline Eigen::VectorXd sphere_eval(const SphereMap& f, const Eigen::VectorXd& x, int d) {
  std::vector<double> in(x.data(), x.data() + d);
  double n = vnorm(in);
  if (n < 1e-12) throw std::invalid_argument("mapping_degree: evaluation at the origin");
  for (double& t : in) t /= n;
  std::vector<double> out = f(in);
  if (static_cast<int>(out.size()) != d)
    throw std::invalid_argument("mapping_degree: map changes ambient dimension");
  double m = vnorm(out);
  if (m < 1e-9) throw std::invalid_argument("mapping_degree: map vanishes on the sphere");
  Eigen::VectorXd y(d);
  for (int i = 0; i < d; ++i) y[i] = out[i] / m;
  return y;
}

inline Eigen::MatrixXd fd_jacobian(const SphereMap& f, const Eigen::VectorXd& x, int d) {
  const double h = 1e-6;
  Eigen::MatrixXd J(d, d);
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    J.col(c) = (sphere_eval(f, xp, d) - sphere_eval(f, xm, d)) / (2 * h);
  }
  return J;
}

// Oriented tangent frame: columns t_1..t_k with det[x | t] > 0.
inline Eigen::MatrixXd oriented_frame(const Eigen::VectorXd& x, int d) {
  Eigen::MatrixXd full(d, d);
  full.col(0) = x.normalized();
  // Deterministic completion: coordinate vectors, Gram-Schmidt.
  int used = 1;
  for (int c = 0; c < d && used < d; ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(d, c);
    for (int p = 0; p < used; ++p) v -= full.col(p).dot(v) * full.col(p);
    if (v.norm() > 1e-3) full.col(used++) = v.normalized();
  }
  if (used < d) throw std::logic_error("oriented_frame: completion failed");
  if (full.determinant() < 0) full.col(d - 1) *= -1.0;
  return full.rightCols(d - 1);
}

inline DegreeAttempt degree_at_value(const SphereMap& f, int k, const Eigen::VectorXd& y,
                                     const std::vector<Eigen::VectorXd>& starts) {
  const int d = k + 1;
  Eigen::MatrixXd U = oriented_frame(y, d);  // tangent coordinates at y
  std::vector<Eigen::VectorXd> roots;
  for (const Eigen::VectorXd& s0 : starts) {
    Eigen::VectorXd x = s0;
    bool ok = false;
    for (int it = 0; it < 30; ++it) {
      Eigen::VectorXd g = sphere_eval(f, x, d);
      Eigen::VectorXd G(d);
      G.head(k) = U.transpose() * g;
      G[k] = 0.5 * (x.squaredNorm() - 1.0);
      if (G.lpNorm<Eigen::Infinity>() < 1e-12) {
        ok = g.dot(y) > 0.5;
        break;
      }
      Eigen::MatrixXd Jf = fd_jacobian(f, x, d);
      Eigen::MatrixXd JG(d, d);
      JG.topRows(k) = U.transpose() * Jf;
      JG.row(k) = x.transpose();
      Eigen::VectorXd step = JG.fullPivLu().solve(-G);
      if (!step.allFinite()) break;
      double sn = step.norm();
      if (sn > 0.5) step *= 0.5 / sn;
      x += step;
      if (x.norm() < 0.2) break;
    }
    if (!ok) continue;
    x.normalize();
    bool dup = false;
    for (const auto& r : roots) dup = dup || (r - x).norm() < 1e-5;
    if (!dup) roots.push_back(x);
  }

  DegreeAttempt out;
  for (const Eigen::VectorXd& x : roots) {
    Eigen::MatrixXd T = oriented_frame(x, d);
    Eigen::MatrixXd A = U.transpose() * (fd_jacobian(f, x, d) * T);
    double det = A.determinant();
    if (std::abs(det) < 1e-7) {
      out.regular = false;
      return out;
    }
    out.degree += det > 0 ? 1 : -1;
  }
  return out;
}

}  // namespace detail

// Signed count of preimages of a sampled regular value.  Three independent
// regular values must agree; disagreement (a missed preimage sheet) and
// persistent irregularity are both reported as errors.
inline int mapping_degree(const SphereMap& f, int k, std::uint64_t seed = 1) {
  if (k < 1 || k > 3) throw std::invalid_argument("mapping_degree: supported spheres are S^1..S^3");
  const int d = k + 1;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto rand_unit = [&] {
    Eigen::VectorXd v(d);
    do {
      for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    } while (v.norm() < 1e-6);
    return Eigen::VectorXd(v.normalized());
  };

  const int n_starts = k == 1 ? 128 : (k == 2 ? 800 : 6000);
  std::vector<Eigen::VectorXd> starts(n_starts);
  for (auto& s : starts) s = rand_unit();

  std::vector<int> degrees;
  for (int attempt = 0; attempt < 30 && degrees.size() < 3; ++attempt) {
    auto a = detail::degree_at_value(f, k, rand_unit(), starts);
    if (a.regular) degrees.push_back(a.degree);
  }
  if (degrees.size() < 3) throw std::runtime_error("mapping_degree: no regular value found");
  if (degrees[0] != degrees[1] || degrees[1] != degrees[2])
    throw std::runtime_error("mapping_degree: degree computation inconclusive");
  return degrees[0];
}

// ---------------------------------------------------------------------------
// hK3-type conditions.

// Fiberwise sphere map of the quaternionic part: v_H -> F_H(e_0, v_H, 0)
// normalized, on the unit sphere of V_H.
inline SphereMap fiber_sphere_map(const FdaModel& m) {
  m.validate();
  if (m.n_vh != m.n_wh)
    throw std::invalid_argument("fiber_sphere_map: quaternionic ranks differ");
  return [m](const std::vector<double>& vh) {
    std::vector<double> e(m.dim_e, 0.0);
    e[0] = 1.0;
    std::vector<double> w = m(e, vh, std::vector<double>(m.vr_dim(), 0.0));
    std::vector<double> wh(w.begin(), w.begin() + m.wh_dim());
    double n = detail::vnorm(wh);
    if (n < 1e-9) throw std::runtime_error("fiber_sphere_map: degree computation inconclusive");
    for (double& t : wh) t /= n;
    return wh;
  };
}

struct Hk3Report {
  bool rank_ok = false;         // rank E = 3
  bool orientation_ok = false;  // orientation present
  int fiber_degree = 0;         // mapping degree of the quaternionic fiber map
  int real_sign = 0;            // orientation of W_R = E (+) V_R via det(i + D_R)
  long long c_class = 0;        // degree-2 extraction of the index form
  long long c_direct = 0;       // the direct int x . F*tau_W reduction
  bool parity_flags_consistent = false;  // odd class forces odd virtual ranks
  bool pass = false;
  std::string witness;
};

// Checks the three conditions: rank E = 3, orientation present, and the
// class c(F) equal to the positive generator.  The class is computed twice,
// through the full index-form extraction and through its reduction, and the
// two must agree.
inline Hk3Report hk3_conditions(const FdaModel& m, std::uint64_t seed = 1) {
  m.validate();
  if (m.n_vh != 1)
    throw std::invalid_argument("hk3_conditions: degree engine needs quaternionic rank 1");
  Hk3Report r;
  r.rank_ok = m.dim_e == 3;
  r.orientation_ok = m.orientation == 1 || m.orientation == -1;

  // Orientation of the real identification W_R = E (+) V_R.
  const int rows = m.wr_dim(), cols = m.dim_e + m.vr_dim();
  if (rows != cols) {
    r.witness = "i + D_R is not square";
    return r;
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
  for (int rr = 0; rr < m.n_wr; ++rr) {
    for (int c = 0; c < m.dim_e; ++c) M(rr, c) = m.i_map(rr, c);
    for (int c = 0; c < m.n_vr; ++c) M(rr, m.dim_e + c) = m.d_r(rr, c);
  }
  for (int s = 0; s < m.stab; ++s) M(m.n_wr + s, m.dim_e + m.n_vr + s) = 1.0;
  double det = M.determinant();
  r.real_sign = det > 0 ? 1 : -1;

  r.fiber_degree = mapping_degree(fiber_sphere_map(m), 4 * m.n_vh - 1, seed);
  long long geom = static_cast<long long>(m.orientation) * r.real_sign * r.fiber_degree;
  r.c_direct = geom;
  r.c_class = index_integrand_degree2(m.n_vh, m.n_wh, geom);
  if (r.c_class != r.c_direct) {
    r.witness = "index-form extraction disagrees with the direct reduction";
    return r;
  }
  r.parity_flags_consistent = std::abs(r.c_class) % 2 == 1;
  r.pass = r.rank_ok && r.orientation_ok && r.c_class == 1;
  if (!r.pass) {
    if (!r.rank_ok)
      r.witness = "rank E is not 3";
    else if (r.c_class != 1)
      r.witness = "c is not the positive generator (value " + std::to_string(r.c_class) + ")";
  }
  return r;
}

// Certificate that W_R splits metrically as i(E) (+) D_R(V_R): the stacked
// matrix [i | D_R] with its Gram defect.  Degenerate E (zero columns) is
// allowed.
struct SplitCheck {
  bool pass = false;
  double gram_residual = 0.0;
  int rows = 0, cols = 0;
  std::string note;
};

inline SplitCheck split_VW(const Matrix<double>& i_map, const Matrix<double>& d_r) {
  SplitCheck out;
  if (i_map.rows() != d_r.rows()) {
    out.note = "i and D_R target different spaces";
    return out;
  }
  out.rows = i_map.rows();
  out.cols = i_map.cols() + d_r.cols();
  if (out.rows != out.cols) {
    out.note = "not square: W_R rank differs from E + V_R";
    return out;
  }
  Eigen::MatrixXd M(out.rows, out.cols);
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < i_map.cols(); ++c) M(r, c) = i_map(r, c);
    for (int c = 0; c < d_r.cols(); ++c) M(r, i_map.cols() + c) = d_r(r, c);
  }
  if (out.cols == 0) {
    out.pass = true;
    out.note = "empty splitting";
    return out;
  }
  out.gram_residual =
      (M.transpose() * M - Eigen::MatrixXd::Identity(out.cols, out.cols)).cwiseAbs().maxCoeff();
  out.pass = out.gram_residual <= 1e-10;
  out.note = out.pass ? "Gram matrix is the identity" : "Gram defect exceeds tolerance";
  return out;
}

}  // namespace spinlab
