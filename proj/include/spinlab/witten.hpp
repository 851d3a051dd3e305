#pragma once

// Desk-scale laboratory for the Witten deformation D + t h of a Dirac-type
// operator on an interval, at the level of a tame tuple (M, S, c, D, h, F):
// checking the tameness conditions on a grid, the L^2 localization bounds
//   A(t)^2 = (lambda_bar + 2 t |hD+Dh|) |h^{-1}|^2_{M \ F} / t^2,
//   B(t)   = max(0, 1 - A(t)),
// the comparison map Phi(phi) = Pi_{<=lambda} (rho phi) between eigenspace
// packets of two models glued along a neighborhood of F, and the conversion
// of eigenvalue perturbations into Grassmannian distance certificates.
//
// Discretization: rank-2 bundle over [-box, box] in the real picture, with
// the two spinor components staggered on cell nodes and cell midpoints.
// Trapezoidal quadrature weights make the assembled Dirac block exactly
// self-adjoint for the discrete L^2 pairing; all matrices here act on the
// weight-symmetrized coordinates, so plain Euclidean norms of dof vectors
// are the quadrature L^2 norms.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinlab/core/numeric.hpp"
#include "spinlab/grassmann.hpp"
#include "spinlab/oscillator.hpp"

namespace spinlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// C^1 plateau cutoff: 1 on [-one_until, one_until], 0 outside
// (-zero_from, zero_from).
struct CutoffProfile {
  double one_until = 0.0;
  double zero_from = 1.0;
  double operator()(double x) const {
    double u = std::abs(x);
    if (u <= one_until) return 1.0;
    if (u >= zero_from) return 0.0;
    return rho_bar(0.5 + 0.5 * (u - one_until) / (zero_from - one_until));
  }
};

// Tame tuple data on a uniform staggered grid. Potential samples live on the
// node component (first block) and the midpoint component (second block);
// h acts as +w on nodes and -w on midpoints (the sigma_3 picture of w sigma).
struct TameTupleModel {
  static constexpr int rank = 2;

  Grid1D grid;
  std::vector<double> w_nodes;  // potential on nodes
  std::vector<double> w_mids;   // potential on midpoints
  std::vector<Interval> f_set;  // F as a union of closed intervals
  double lambda_bar = 1.0;
  double big_t = 1.0;  // T: conditions (4)-(5) are asserted for t >= T

  // assembled operators in symmetrized coordinates
  Eigen::SparseMatrix<double> dirac;          // D, symmetric
  Eigen::SparseMatrix<double> h_mult;         // h, diagonal
  Eigen::SparseMatrix<double> clifford;       // c(dx), antisymmetric
  Eigen::SparseMatrix<double> anticommutator; // Dh + hD, symmetric

  // cached tuple norms (grid estimates)
  double c_norm = 0.0;
  double anticommutator_norm = 0.0;
  double h_inverse_norm_outside = 0.0;  // 0 when no dof lies outside F

  int n_nodes() const { return static_cast<int>(grid.nodes.size()); }
  int n_mids() const { return static_cast<int>(grid.mids.size()); }
  int dofs() const { return n_nodes() + n_mids(); }

  // coordinate of dof i (nodes first, then midpoints)
  double dof_coord(int i) const {
    return i < n_nodes() ? grid.nodes[static_cast<std::size_t>(i)]
                         : grid.mids[static_cast<std::size_t>(i - n_nodes())];
  }
  double dof_potential(int i) const {
    return i < n_nodes() ? w_nodes[static_cast<std::size_t>(i)]
                         : w_mids[static_cast<std::size_t>(i - n_nodes())];
  }
  bool in_f(double x) const {
    for (const Interval& iv : f_set)
      if (iv.contains(x)) return true;
    return false;
  }
};

namespace detail {

// max absolute row sum; bounds the spectral norm of a symmetric matrix
inline double abs_row_sum_max(const Eigen::SparseMatrix<double>& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

inline Eigen::VectorXd abs_row_sums(const Eigen::SparseMatrix<double>& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      rows(it.row()) += std::abs(it.value());
  return rows;
}

}  // namespace detail

// Threshold from requiring A(t) <= 1/2; same quadratic as the oscillator
// threshold, with a = |Dh + hD| and b = |h^{-1}| off F.
inline double localization_t_threshold(double lambda_bar, double a, double b) {
  return 4.0 * a * b * b + 2.0 * std::sqrt(4.0 * a * a * b * b * b * b + lambda_bar * b * b);
}

inline TameTupleModel make_interval_model(int n_cells, double box,
                                          const std::function<double(double)>& potential,
                                          std::vector<Interval> f_set,
                                          double lambda_bar,
                                          double big_t_override = 0.0) {
  if (n_cells < 8) throw std::invalid_argument("make_interval_model: need at least 8 cells");
  if (!(lambda_bar > 0.0)) throw std::invalid_argument("make_interval_model: lambda_bar must be positive");
  TameTupleModel m;
  m.grid = full_line_grid(n_cells, box);
  m.f_set = std::move(f_set);
  m.lambda_bar = lambda_bar;
  const int nn = m.n_nodes(), nm = m.n_mids();
  m.w_nodes.resize(static_cast<std::size_t>(nn));
  m.w_mids.resize(static_cast<std::size_t>(nm));
  for (int i = 0; i < nn; ++i) m.w_nodes[static_cast<std::size_t>(i)] = potential(m.grid.nodes[static_cast<std::size_t>(i)]);
  for (int i = 0; i < nm; ++i) m.w_mids[static_cast<std::size_t>(i)] = potential(m.grid.mids[static_cast<std::size_t>(i)]);

  const double h = m.grid.h;
  // trapezoid node weights: h/2 at the two ends, h inside; midpoint weights h.
  // Symmetrized difference block gains sqrt(2) on the end columns.
  auto col_scale = [&](int j) { return (j == 0 || j == nn - 1) ? std::sqrt(2.0) : 1.0; };

  std::vector<Eigen::Triplet<double>> td, tc, th;
  td.reserve(static_cast<std::size_t>(4 * nm));
  tc.reserve(static_cast<std::size_t>(4 * nm));
  for (int i = 0; i < nm; ++i) {
    const int row = nn + i;
    const double sl = col_scale(i), sr = col_scale(i + 1);
    // difference block B: row i couples nodes i, i+1
    td.emplace_back(row, i, -sl / h);
    td.emplace_back(row, i + 1, sr / h);
    td.emplace_back(i, row, -sl / h);
    td.emplace_back(i + 1, row, sr / h);
    // averaging block of the Clifford action, antisymmetric as a whole
    tc.emplace_back(row, i, 0.5 * sl);
    tc.emplace_back(row, i + 1, 0.5 * sr);
    tc.emplace_back(i, row, -0.5 * sl);
    tc.emplace_back(i + 1, row, -0.5 * sr);
  }
  th.reserve(static_cast<std::size_t>(nn + nm));
  for (int i = 0; i < nn; ++i) th.emplace_back(i, i, m.w_nodes[static_cast<std::size_t>(i)]);
  for (int i = 0; i < nm; ++i) th.emplace_back(nn + i, nn + i, -m.w_mids[static_cast<std::size_t>(i)]);

  const int n = m.dofs();
  m.dirac.resize(n, n);
  m.dirac.setFromTriplets(td.begin(), td.end());
  m.clifford.resize(n, n);
  m.clifford.setFromTriplets(tc.begin(), tc.end());
  m.h_mult.resize(n, n);
  m.h_mult.setFromTriplets(th.begin(), th.end());
  m.anticommutator = Eigen::SparseMatrix<double>((m.dirac * m.h_mult + m.h_mult * m.dirac).pruned());

  m.c_norm = detail::abs_row_sum_max(m.clifford);
  m.anticommutator_norm = detail::abs_row_sum_max(m.anticommutator);

  double min_outside = std::numeric_limits<double>::infinity();
  bool any_outside = false;
  for (int i = 0; i < n; ++i) {
    if (m.in_f(m.dof_coord(i))) continue;
    any_outside = true;
    min_outside = std::min(min_outside, std::abs(m.dof_potential(i)));
  }
  m.h_inverse_norm_outside =
      (!any_outside || min_outside == 0.0) ? 0.0 : 1.0 / min_outside;
  if (any_outside && min_outside == 0.0)
    m.h_inverse_norm_outside = std::numeric_limits<double>::infinity();

  if (big_t_override > 0.0) {
    m.big_t = big_t_override;
  } else {
    // smallest t with the pointwise condition (5) holding for all larger t,
    // together with the A(t) <= 1/2 threshold
    double t5 = 0.0;
    Eigen::VectorXd rb = detail::abs_row_sums(m.anticommutator);
    for (int i = 0; i < n; ++i) {
      double x = m.dof_coord(i);
      if (m.in_f(x)) continue;
      double w2 = m.dof_potential(i) * m.dof_potential(i);
      double r = rb(i);
      if (w2 <= 0.0) {
        t5 = std::numeric_limits<double>::infinity();
        break;
      }
      t5 = std::max(t5, (r + std::sqrt(r * r + 4.0 * w2 * m.lambda_bar)) / (2.0 * w2));
    }
    double ta = std::isfinite(m.h_inverse_norm_outside)
                    ? localization_t_threshold(m.lambda_bar, m.anticommutator_norm,
                                               m.h_inverse_norm_outside)
                    : std::numeric_limits<double>::infinity();
    m.big_t = std::max({1.0, t5, ta});
    if (!std::isfinite(m.big_t)) m.big_t = 1.0;  // degenerate tuples keep a usable T
  }
  return m;
}

inline Eigen::SparseMatrix<double> deformed_op(const TameTupleModel& m, double t) {
  return Eigen::SparseMatrix<double>((m.dirac + t * m.h_mult).pruned());
}

inline Eigen::SparseMatrix<double> deformed_square(const TameTupleModel& m, double t) {
  Eigen::SparseMatrix<double> d = deformed_op(m, t);
  return Eigen::SparseMatrix<double>((d * d).pruned());
}

// ---------------------------------------------------------------------------
// eigenspace packets

struct EigenspacePacket {
  double threshold = 0.0;  // lambda used to cut
  double t = 0.0;
  Eigen::VectorXd eigenvalues;  // ascending, <= threshold
  Eigen::MatrixXd vectors;      // orthonormal columns, symmetrized coordinates
  double max_residual = 0.0;    // max |(D+th)^2 v - mu v| over columns
  double nearest_excluded = std::numeric_limits<double>::infinity();
  // distance from threshold to the nearest eigenvalue (spectral margin)
  double threshold_margin = std::numeric_limits<double>::infinity();
  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

inline EigenspacePacket eigenspace_packet(const TameTupleModel& m, double t, double lambda) {
  if (!(t > 0.0)) throw std::invalid_argument("eigenspace_packet: t must be positive");
  Eigen::SparseMatrix<double> sq = deformed_square(m, t);
  if (m.dofs() > 4000)
    throw std::invalid_argument("eigenspace_packet: grid too large for dense eigensolve");
  EigenPairs pairs = sym_eigs(Eigen::MatrixXd(sq));
  EigenspacePacket p;
  p.threshold = lambda;
  p.t = t;
  const int n_all = static_cast<int>(pairs.values.size());
  int r = 0;
  while (r < n_all && pairs.values(r) <= lambda) ++r;
  p.eigenvalues = pairs.values.head(r);
  p.vectors = pairs.vectors.leftCols(r);
  if (r < n_all) p.nearest_excluded = pairs.values(r);
  for (int i = 0; i < n_all; ++i)
    p.threshold_margin = std::min(p.threshold_margin, std::abs(pairs.values(i) - lambda));
  if (r > 0) {
    Eigen::MatrixXd resid = sq * p.vectors - p.vectors * p.eigenvalues.asDiagonal();
    p.max_residual = resid.colwise().norm().maxCoeff();
  }
  return p;
}

// ---------------------------------------------------------------------------
// tameness report

struct TameCondition {
  bool pass = false;
  std::string witness;  // value on pass, violating datum on fail
};

struct TameReport {
  std::array<TameCondition, 6> conditions;
  bool all_pass() const {
    for (const TameCondition& c : conditions)
      if (!c.pass) return false;
    return true;
  }
};

inline TameReport check_tame(const TameTupleModel& m) {
  TameReport rep;
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  // (1) bounded Clifford action
  rep.conditions[0].pass = std::isfinite(m.c_norm);
  rep.conditions[0].witness = "|c| <= " + fmt(m.c_norm);

  // (2) bounded anticommutator Dh + hD
  rep.conditions[1].pass = std::isfinite(m.anticommutator_norm);
  rep.conditions[1].witness = "|Dh + hD| <= " + fmt(m.anticommutator_norm);

  // (3) h invertible off F with bounded inverse
  {
    double scale = 1.0;
    for (double w : m.w_nodes) scale = std::max(scale, std::abs(w));
    bool ok = true;
    std::string wit;
    for (int i = 0; i < m.dofs(); ++i) {
      double x = m.dof_coord(i);
      if (m.in_f(x)) continue;
      if (std::abs(m.dof_potential(i)) <= 1e-12 * scale) {
        ok = false;
        wit = "h vanishes outside F at x = " + fmt(x);
        break;
      }
    }
    rep.conditions[2].pass = ok;
    rep.conditions[2].witness =
        ok ? "|h^{-1}| <= " + fmt(m.h_inverse_norm_outside) + " off F" : wit;
  }

  // (4) finite packet below lambda_bar and gap above it, sampled at T, 2T, 4T
  {
    bool ok = true;
    std::string wit;
    for (double t : {m.big_t, 2.0 * m.big_t, 4.0 * m.big_t}) {
      EigenspacePacket p = eigenspace_packet(m, t, m.lambda_bar);
      bool gap_ok = p.dim() == m.dofs() || p.nearest_excluded >= m.lambda_bar;
      bool res_ok = p.max_residual <= 1e-7 * (1.0 + std::abs(p.eigenvalues.size() ? p.eigenvalues(p.dim() - 1) : 0.0) + t * t);
      if (!gap_ok || !res_ok) {
        ok = false;
        wit = "t = " + fmt(t) + ": next eigenvalue " + fmt(p.nearest_excluded) +
              ", residual " + fmt(p.max_residual);
        break;
      }
      if (wit.empty())
        wit = "dim E_{<=lambda} = " + std::to_string(p.dim()) + " at t = T, gap to " +
              fmt(p.nearest_excluded);
    }
    rep.conditions[3].pass = ok;
    rep.conditions[3].witness = wit;
  }

  // (5) pointwise t (hD + Dh) + t^2 h^2 >= lambda_bar off F for all t >= T:
  // Gershgorin row bound for the anticommutator, plus monotonicity in t
  {
    bool ok = true;
    std::string wit;
    Eigen::VectorXd rb = detail::abs_row_sums(m.anticommutator);
    for (int i = 0; i < m.dofs(); ++i) {
      double x = m.dof_coord(i);
      if (m.in_f(x)) continue;
      double w2 = m.dof_potential(i) * m.dof_potential(i);
      double q = m.big_t * m.big_t * w2 - m.big_t * rb(i);
      bool monotone = 2.0 * m.big_t * w2 >= rb(i);
      if (q < m.lambda_bar || !monotone) {
        ok = false;
        wit = "x = " + fmt(x) + ": t^2 h^2 - t |Dh+hD| = " + fmt(q) + " < lambda_bar = " +
              fmt(m.lambda_bar);
        break;
      }
    }
    rep.conditions[4].pass = ok;
    if (ok) wit = "pointwise bound holds at T = " + fmt(m.big_t) + ", monotone beyond";
    rep.conditions[4].witness = wit;
  }

  // (6) min-max counting, one direction: a trial subspace with Rayleigh
  // quotients <= lambda certifies at least dim-many eigenvalues <= lambda
  {
    Eigen::SparseMatrix<double> sq = deformed_square(m, m.big_t);
    EigenPairs pairs = sym_eigs(Eigen::MatrixXd(sq));
    std::mt19937_64 rng(20240817);
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool ok = true;
    std::string wit;
    const int n_all = static_cast<int>(pairs.values.size());
    const int span_cols = std::min(6, n_all);
    const int trial_dim = std::min(3, span_cols);
    for (int trial = 0; trial < 5 && ok; ++trial) {
      Eigen::MatrixXd mix(span_cols, trial_dim);
      for (Eigen::Index i = 0; i < mix.size(); ++i) mix(i) = gauss(rng);
      Eigen::MatrixXd e = orthonormal_basis(pairs.vectors.leftCols(span_cols) * mix);
      Eigen::MatrixXd form = e.transpose() * sq * e;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form);
      double lam = es.eigenvalues().maxCoeff();
      int count = 0;
      while (count < n_all && pairs.values(count) <= lam + 1e-9 * (1.0 + lam)) ++count;
      if (count < trial_dim) {
        ok = false;
        wit = "trial dim " + std::to_string(trial_dim) + " but only " + std::to_string(count) +
              " eigenvalues below " + fmt(lam);
      }
      // the other direction: the trial_dim-th smallest eigenvalue is at most
      // the largest Rayleigh quotient of any trial_dim-dimensional subspace
      if (ok && pairs.values(trial_dim - 1) > lam + 1e-9 * (1.0 + lam)) {
        ok = false;
        wit = "eigenvalue " + fmt(pairs.values(trial_dim - 1)) +
              " exceeds the trial Rayleigh bound " + fmt(lam);
      }
    }
    rep.conditions[5].pass = ok;
    rep.conditions[5].witness = ok ? "min-max counting verified on 5 random trial subspaces" : wit;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// localization bounds

struct LocalizationBounds {
  double a = 0.0;  // A(t)
  double b = 0.0;  // B(t) = max(0, 1 - A(t))
};

inline LocalizationBounds localization_bound_formula(double lambda_bar, double anticomm_norm,
                                                     double h_inverse_norm, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("localization bound: t must be positive");
  LocalizationBounds lb;
  double a2 = (lambda_bar + 2.0 * t * anticomm_norm) * h_inverse_norm * h_inverse_norm / (t * t);
  lb.a = std::sqrt(a2);
  lb.b = std::max(0.0, 1.0 - lb.a);
  return lb;
}

inline LocalizationBounds localization_bounds(const TameTupleModel& m, double t) {
  if (t < m.big_t)
    throw std::invalid_argument("localization_bounds: t below the tuple threshold T");
  return localization_bound_formula(m.lambda_bar, m.anticommutator_norm,
                                    m.h_inverse_norm_outside, t);
}

struct LocalizationRow {
  double eigenvalue = 0.0;
  double outside_mass = 0.0;  // L^2 norm of the eigenvector outside F
  double a_bound = 0.0;
  double rho_norm = 0.0;  // |rho phi|
  double b_bound = 0.0;
  bool pass = false;
  double slack() const { return std::min(a_bound - outside_mass, rho_norm - b_bound); }
};

struct LocalizationReport {
  double t = 0.0;
  LocalizationBounds bounds;
  std::vector<LocalizationRow> rows;
  bool all_pass() const {
    for (const LocalizationRow& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

// Checks |phi|_{M \ F} <= A(t) and B(t) <= |rho phi| <= |phi| for every
// eigenvector with eigenvalue <= lambda. rho must be 1 near F.
inline LocalizationReport verify_localization(const TameTupleModel& m, double t, double lambda,
                                              const CutoffProfile& rho) {
  LocalizationReport rep;
  rep.t = t;
  rep.bounds = localization_bounds(m, t);
  EigenspacePacket p = eigenspace_packet(m, t, lambda);
  for (int c = 0; c < p.dim(); ++c) {
    LocalizationRow row;
    row.eigenvalue = p.eigenvalues(c);
    double outside2 = 0.0, rho2 = 0.0;
    for (int i = 0; i < m.dofs(); ++i) {
      double v = p.vectors(i, c);
      double x = m.dof_coord(i);
      if (!m.in_f(x)) outside2 += v * v;
      double rv = rho(x) * v;
      rho2 += rv * rv;
    }
    row.outside_mass = std::sqrt(outside2);
    row.a_bound = rep.bounds.a;
    row.rho_norm = std::sqrt(rho2);
    row.b_bound = rep.bounds.b;
    row.pass = row.outside_mass <= row.a_bound + 1e-12 && row.rho_norm >= row.b_bound - 1e-12 &&
               row.rho_norm <= 1.0 + 1e-12;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// comparison map Phi between two glued models

// Desk-scale glue: the two models share the same mesh and agree (potential
// and hence D, h, c) on the open interval U containing F.
inline void check_glue(const TameTupleModel& m1, const TameTupleModel& m2, const Interval& u) {
  if (m1.n_nodes() != m2.n_nodes() || std::abs(m1.grid.h - m2.grid.h) > 1e-15 ||
      std::abs(m1.grid.box - m2.grid.box) > 1e-15)
    throw std::invalid_argument("check_glue: models must share the mesh");
  for (const TameTupleModel* m : {&m1, &m2})
    for (const Interval& iv : m->f_set)
      if (!(u.lo < iv.lo && iv.hi < u.hi))
        throw std::invalid_argument("check_glue: U must contain both F sets");
  for (int i = 0; i < m1.dofs(); ++i) {
    double x = m1.dof_coord(i);
    if (!u.contains(x)) continue;
    if (std::abs(m1.dof_potential(i) - m2.dof_potential(i)) > 1e-12)
      throw std::invalid_argument("check_glue: glue does not intertwine h on U");
  }
}

struct PhiReport {
  double t = 0.0;
  double lambda = 0.0;
  int dim1 = 0;
  int dim2 = 0;
  bool dims_match = false;
  Eigen::MatrixXd phi;  // dim2 x dim1, matrix of Phi in the packet bases
  Eigen::VectorXd singular_values;
  double min_singular = 0.0;
  double max_singular = 0.0;
  std::string note;
};

// Phi(phi) = Pi_{<=lambda,t}(rho phi), expressed in the eigenpacket bases.
// Rejects lambda closer to either spectrum than 1e-6 lambda_bar.
inline PhiReport phi_map(const TameTupleModel& m1, const TameTupleModel& m2, const Interval& u,
                         const CutoffProfile& rho, double lambda, double t) {
  check_glue(m1, m2, u);
  EigenspacePacket p1 = eigenspace_packet(m1, t, lambda);
  EigenspacePacket p2 = eigenspace_packet(m2, t, lambda);
  double margin = 1e-6 * std::min(m1.lambda_bar, m2.lambda_bar);
  if (p1.threshold_margin < margin || p2.threshold_margin < margin)
    throw std::runtime_error("phi_map: spectral collision at lambda");
  PhiReport rep;
  rep.t = t;
  rep.lambda = lambda;
  rep.dim1 = p1.dim();
  rep.dim2 = p2.dim();
  rep.dims_match = rep.dim1 == rep.dim2;
  Eigen::VectorXd rho_diag(m1.dofs());
  for (int i = 0; i < m1.dofs(); ++i) rho_diag(i) = rho(m1.dof_coord(i));
  rep.phi = p2.vectors.transpose() * (rho_diag.asDiagonal() * p1.vectors);
  if (rep.dim1 > 0 && rep.dim2 > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.phi);
    rep.singular_values = svd.singularValues();
    rep.min_singular = rep.singular_values.minCoeff();
    rep.max_singular = rep.singular_values.maxCoeff();
  }
  if (!rep.dims_match)
    rep.note = "Phi not injective at this t: packet dimensions " + std::to_string(rep.dim1) +
               " vs " + std::to_string(rep.dim2);
  return rep;
}

struct T0Search {
  bool found = false;
  double t0 = 0.0;
  std::vector<PhiReport> sweep;
};

// Doubling search for T0 such that Phi is a delta-near-isometry; starts at
// max(T, T') and gives up past 2^10 of it rather than looping.
inline T0Search phi_t0_search(const TameTupleModel& m1, const TameTupleModel& m2,
                              const Interval& u, const CutoffProfile& rho, double lambda,
                              double delta) {
  T0Search out;
  double t = std::max(m1.big_t, m2.big_t);
  const double cap = std::ldexp(t, 10);
  for (; t <= cap; t *= 2.0) {
    PhiReport rep = phi_map(m1, m2, u, rho, lambda, t);
    bool near_isometry = rep.dims_match && rep.dim1 > 0 &&
                         rep.min_singular >= 1.0 - delta && rep.max_singular <= 1.0 + delta;
    out.sweep.push_back(std::move(rep));
    if (near_isometry) {
      out.found = true;
      out.t0 = t;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// eigenvalue perturbation -> subspace distance certificate

struct DistanceCertificate {
  double delta = 0.0;     // max |perturbed_k - reference_k|
  double per_step = 0.0;  // graph-norm bound 2 delta / (lambda - max reference)
  double d_bound = 0.0;   // sqrt(r * per_step)
};

// If a subspace E has Rayleigh data within delta of the reference packet
// eigenvalues (all < lambda, with spectrum gap above lambda), the graph map
// f over the packet satisfies |f(v_r)|^2 <= 2 delta / (lambda - max ref) at
// each peeling step; aggregated over the r steps this certifies
// d_H(E, packet) <= sqrt(2 r delta / (lambda - max ref)).
inline DistanceCertificate eigenvalue_to_distance(double lambda,
                                                  const std::vector<double>& reference,
                                                  const std::vector<double>& perturbed) {
  if (reference.size() != perturbed.size() || reference.empty())
    throw std::invalid_argument("eigenvalue_to_distance: packet size mismatch");
  DistanceCertificate cert;
  double max_ref = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    cert.delta = std::max(cert.delta, std::abs(perturbed[i] - reference[i]));
    max_ref = std::max(max_ref, reference[i]);
  }
  if (!(lambda - max_ref > 2.0 * cert.delta))
    throw std::invalid_argument("eigenvalue_to_distance: gap lambda - max reference must exceed 2 delta");
  cert.per_step = 2.0 * cert.delta / (lambda - max_ref);
  cert.d_bound = std::sqrt(static_cast<double>(reference.size()) * cert.per_step);
  return cert;
}

}  // namespace spinlab
