#pragma once

// Supersymmetric harmonic oscillator D + t h on Lambda* V (x) C, exact
// (ladder spectrum) and discretized, plus the pseudo-supersymmetric variant
// on the cylindrical-end metric
//   g-bar = rho(r) g_flat + (1 - rho(r)) g_cyl
// reduced to its radial sector, and the two-parameter stabilization
// homotopy H(s, (v, v')) between joint-radius and split-radius cutoffs.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinlab/core/numeric.hpp"

namespace spinlab {

// ---------------------------------------------------------------------------
// Cutoff functions. Two distinct shapes are used by the paper's machinery:
//  - rho_bar: metric bump, 1 on [0,1/2], smoothstep down to 0 at 1.
//  - rho_sat: radius saturation, identity near 0, constant 1 from 1 on,
//    C^1 and monotone. rho_sat(r)/r -> 1 as r -> 0.

inline double rho_bar(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  double u = 2.0 * r - 1.0;
  double s5 = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  return 1.0 - s5;
}

inline double rho_bar_prime(double r) {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  double u = 2.0 * r - 1.0;
  double ds5 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
  return -2.0 * ds5;
}

inline double rho_sat(double t) {
  if (t <= 0.5) return t;
  if (t >= 1.0) return 1.0;
  double s = t - 0.5;
  return 0.5 + s + 2.0 * s * s - 4.0 * s * s * s;
}

inline double rho_sat_prime(double t) {
  if (t < 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  double s = t - 0.5;
  return 1.0 + 4.0 * s - 12.0 * s * s;
}

// rho_sat(r)/r with the removable singularity filled in (rho_sat(r) = r
// near 0, so the ratio extends by 1).
inline double rho_sat_over_r(double r) {
  if (r < 1e-300) return 1.0;
  return rho_sat(r) / r;
}

// ---------------------------------------------------------------------------
// Problem and result types.

enum class MetricMode { flat, cylindrical_end };

struct OscillatorProblem {
  int m = 1;                // real dimension of the base space
  double t = 1.0;           // deformation parameter
  MetricMode mode = MetricMode::flat;
  double cylinder_radius = 1.0;      // sphere radius of the end metric
  int n_radial = 800;                // grid cells
  double box_radius = 6.0;           // truncation radius
  double lambda_bar = 0.1;           // spectral window for the threshold
  double localization_radius = 1.2;  // F = { r <= this } in the threshold
};

struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending, with multiplicity
  Eigen::MatrixXd kernel;           // L^2-normalized kernel columns (nodes)
  int kernel_dim = 0;
  double gap = 0.0;                 // smallest nonzero eigenvalue
  int grid_n = 0;                   // cells
  double grid_h = 0.0;
  double box = 0.0;
  double threshold_t_min = 0.0;     // populated by the pseudo solver
  std::vector<std::string> diagnostics;
  bool certified() const { return diagnostics.empty(); }
};

// ---------------------------------------------------------------------------
// Exact flat spectrum. (D + t h)^2 block-diagonalizes over form monomials:
// the monomial mu contributes sum_i [ t(2 q_i + 1) + t (bit_i(mu) ? +1 : -1) ],
// so the eigenvalues are 2 t (q + k), q = total Hermite level, k = deg mu,
// with multiplicity C(q + m - 1, m - 1) * C(m, k). Kernel: q = k = 0, the
// Gaussian e^{-t|v|^2/2} in degree 0, one-dimensional; gap = 2t.

inline unsigned long long binom_ull(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned long long>(n - k + i) / i;
  return r;
}

inline double flat_ground_state(double t, double r2) { return std::exp(-0.5 * t * r2); }

inline SpectralResult flat_susy_spectrum(int m, double t, int level_cap) {
  if (m < 1 || m > 4) throw std::invalid_argument("flat_susy_spectrum: m must be in [1,4]");
  if (!(t > 0)) throw std::invalid_argument("flat_susy_spectrum: t must be positive");
  if (level_cap < 0)
    throw std::logic_error("flat_susy_spectrum: level cap excludes the kernel");
  SpectralResult out;
  for (int level = 0; level <= level_cap; ++level) {
    // level = q + k; eigenvalue 2 t level.
    unsigned long long mult = 0;
    for (int k = 0; k <= std::min(m, level); ++k)
      mult += binom_ull(level - k + m - 1, m - 1) * binom_ull(m, k);
    for (unsigned long long c = 0; c < mult; ++c)
      out.eigenvalues.push_back(2.0 * t * level);
  }
  out.kernel_dim = 1;
  out.gap = 2.0 * t;
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference assembly on a staggered pair of grids: degree-0 forms
// on cell nodes, degree-1 (dr-coefficient) forms on cell midpoints. The
// lowering operator is the centered two-point difference plus the
// midpoint-averaged potential,
//   (L u)(m_i) = (u_{i+1} - u_i)/h + w(m_i) (u_{i+1} + u_i)/2,
// second-order at the midpoint. With one more node than midpoints the
// matrix index is 1, matching dim Ker L = 1 (a two-term recurrence, so no
// doubler mode) against Ker L^T = 0; [[0, L^T], [L, 0]] is symmetric and
// its square diag(L^T L, L L^T) has exactly paired nonzero spectra.

struct Grid1D {
  std::vector<double> nodes;  // degree-0 sample points
  std::vector<double> mids;   // degree-1 sample points (cell midpoints)
  double h = 0.0;
  double box = 0.0;
  bool full_line = false;
};

// Uniform cells on [-R, R]; no boundary condition is imposed (the confining
// potential decays the kernel exponentially before the ends).
inline Grid1D full_line_grid(int n_cells, double box) {
  if (n_cells < 8) throw std::invalid_argument("full_line_grid: too few cells");
  Grid1D g;
  g.box = box;
  g.full_line = true;
  g.h = 2.0 * box / n_cells;
  g.nodes.resize(n_cells + 1);
  g.mids.resize(n_cells);
  for (int i = 0; i <= n_cells; ++i) g.nodes[i] = -box + i * g.h;
  for (int i = 0; i < n_cells; ++i) g.mids[i] = -box + (i + 0.5) * g.h;
  return g;
}

// Radial grid on (0, R]: nodes i h for i = 1..n, midpoints between them.
// The coordinate singularity at r = 0 is never sampled; the metric enters
// through the radial volume density, not through singular coefficients.
inline Grid1D radial_grid(int n_cells, double box) {
  if (n_cells < 8) throw std::invalid_argument("radial_grid: too few cells");
  Grid1D g;
  g.box = box;
  g.full_line = false;
  g.h = box / n_cells;
  g.nodes.resize(n_cells);
  g.mids.resize(n_cells - 1);
  for (int i = 0; i < n_cells; ++i) g.nodes[i] = (i + 1) * g.h;
  for (int i = 0; i + 1 < n_cells; ++i) g.mids[i] = (i + 1.5) * g.h;
  return g;
}

// Cylindrical-end warp factor f(r)^2 = rho_bar(r) r^2 + (1 - rho_bar(r)) r0^2
// and the radial volume density A = f^{m-1} of g-bar = dr^2 + f(r)^2 g_S.
inline double warp_f(double r, double r0 = 1.0) {
  return std::sqrt(rho_bar(r) * r * r + (1.0 - rho_bar(r)) * r0 * r0);
}

inline double radial_density(const OscillatorProblem& p, double r) {
  if (p.m <= 1) return 1.0;
  double f = (p.mode == MetricMode::cylindrical_end) ? warp_f(std::abs(r), p.cylinder_radius)
                                                     : std::abs(r);
  return std::pow(f, p.m - 1);
}

// Staggered lowering matrix, optionally conjugated by the square roots of
// the radial volume density (the exact similarity taking L^2(A dr) to
// L^2(dr); the conjugated kernel picks up the factor A^{1/2}).
inline Eigen::SparseMatrix<double> staggered_lowering(const Grid1D& g,
                                                      const std::vector<double>& w_mid,
                                                      const std::vector<double>& dens_node = {},
                                                      const std::vector<double>& dens_mid = {}) {
  const int nm = static_cast<int>(g.mids.size());
  const int nn = static_cast<int>(g.nodes.size());
  if (static_cast<int>(w_mid.size()) != nm)
    throw std::invalid_argument("staggered_lowering: weight size mismatch");
  const bool weighted = !dens_node.empty();
  if (weighted && (static_cast<int>(dens_node.size()) != nn ||
                   static_cast<int>(dens_mid.size()) != nm))
    throw std::invalid_argument("staggered_lowering: density size mismatch");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * static_cast<std::size_t>(nm));
  const double c = 1.0 / g.h;
  for (int i = 0; i < nm; ++i) {
    double slo = weighted ? std::sqrt(dens_mid[i] / dens_node[i]) : 1.0;
    double shi = weighted ? std::sqrt(dens_mid[i] / dens_node[i + 1]) : 1.0;
    trips.emplace_back(i, i, (-c + 0.5 * w_mid[i]) * slo);
    trips.emplace_back(i, i + 1, (c + 0.5 * w_mid[i]) * shi);
  }
  Eigen::SparseMatrix<double> l(nm, nn);
  l.setFromTriplets(trips.begin(), trips.end());
  return l;
}

// Flat 1-D model weights t r on the midpoints.
inline std::vector<double> flat_weights(double t, const Grid1D& g) {
  std::vector<double> w(g.mids.size());
  for (std::size_t i = 0; i < g.mids.size(); ++i) w[i] = t * g.mids[i];
  return w;
}

inline Eigen::SparseMatrix<double> susy_lowering_matrix(const Grid1D& g,
                                                        const std::vector<double>& w_mid) {
  return staggered_lowering(g, w_mid);
}

// Deformed lowering operator of the pseudo model at deformation t_val
// (h = r^2/2, so the potential is t r; the metric contributes only the
// density conjugation).
inline Eigen::SparseMatrix<double> pseudo_lowering_matrix(const OscillatorProblem& p,
                                                          const Grid1D& g, double t_val) {
  std::vector<double> w = flat_weights(t_val, g);
  if (p.m <= 1) return staggered_lowering(g, w);
  std::vector<double> dn(g.nodes.size()), dm(g.mids.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) dn[i] = radial_density(p, g.nodes[i]);
  for (std::size_t i = 0; i < g.mids.size(); ++i) dm[i] = radial_density(p, g.mids[i]);
  return staggered_lowering(g, w, dn, dm);
}

// Clifford action of the deformation gradient |dh| = r as a node-to-midpoint
// block (midpoint value times node average), conjugated consistently.
inline Eigen::SparseMatrix<double> deformation_block(const OscillatorProblem& p,
                                                     const Grid1D& g) {
  const int nm = static_cast<int>(g.mids.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * static_cast<std::size_t>(nm));
  for (int i = 0; i < nm; ++i) {
    double s = 0.5 * g.mids[i];
    double slo = 1.0, shi = 1.0;
    if (p.m > 1) {
      double dm = radial_density(p, g.mids[i]);
      slo = std::sqrt(dm / radial_density(p, g.nodes[i]));
      shi = std::sqrt(dm / radial_density(p, g.nodes[i + 1]));
    }
    trips.emplace_back(i, i, s * slo);
    trips.emplace_back(i, i + 1, s * shi);
  }
  Eigen::SparseMatrix<double> h(nm, static_cast<int>(g.nodes.size()));
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

struct SusyPairSpectra {
  EigenPairs even;  // L^T L (degree-0 sector, nodes)
  EigenPairs odd;   // L L^T (degree-1 sector, midpoints)
};

inline SusyPairSpectra susy_pair_spectra(const Eigen::SparseMatrix<double>& l, int k,
                                         unsigned seed = 12345) {
  SusyPairSpectra out;
  Eigen::SparseMatrix<double> lt = Eigen::SparseMatrix<double>(l.transpose());
  Eigen::SparseMatrix<double> even = (lt * l).pruned();
  Eigen::SparseMatrix<double> odd = (l * lt).pruned();
  out.even = smallest_eigs_sparse(even, k, seed);
  out.odd = smallest_eigs_sparse(odd, k, seed + 1);
  return out;
}

namespace detail {

// Shared spectral post-processing: merge sector eigenvalues, pull the
// kernel out of the even block, L^2-normalize against the uniform measure.
inline void finish_spectral(SpectralResult& out, const Grid1D& g, const SusyPairSpectra& pair,
                            double cutoff) {
  for (int i = 0; i < pair.even.values.size(); ++i) out.eigenvalues.push_back(pair.even.values(i));
  for (int i = 0; i < pair.odd.values.size(); ++i) out.eigenvalues.push_back(pair.odd.values(i));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  int kd = 0;
  while (kd < pair.even.values.size() && pair.even.values(kd) < cutoff) ++kd;
  out.kernel_dim = kd;
  out.kernel.resize(g.nodes.size(), kd);
  for (int c = 0; c < kd; ++c)
    out.kernel.col(c) = pair.even.vectors.col(c).normalized() / std::sqrt(g.h);
  fix_vector_signs(out.kernel);
  for (double ev : out.eigenvalues)
    if (ev >= cutoff) {
      out.gap = ev;
      break;
    }
}

}  // namespace detail

// Finite-difference oracle for the flat model, full line.
inline SpectralResult flat_susy_fd(double t, int n_cells, double box, int k_each,
                                   double kernel_tol_rel = 1e-6) {
  if (!(t > 0)) throw std::invalid_argument("flat_susy_fd: t must be positive");
  Grid1D g = full_line_grid(n_cells, box);
  auto l = susy_lowering_matrix(g, flat_weights(t, g));
  auto pair = susy_pair_spectra(l, k_each);
  SpectralResult out;
  out.grid_n = n_cells;
  out.grid_h = g.h;
  out.box = box;
  detail::finish_spectral(out, g, pair, kernel_tol_rel * std::max(1.0, 2.0 * t));
  return out;
}

// Runtime localization threshold (Lemma-6 shape): with
//   a = ||{D, h}|| (grid estimate),  b = ||h^{-1}|| outside F,
// A(t)^2 = (lambda_bar + 2 t a) b^2 / t^2, and A(t) <= 1/2 gives
//   t_min = 4 a b^2 + 2 sqrt(4 a^2 b^4 + lambda_bar b^2).
struct ThresholdEstimate {
  double anticommutator_norm = 0.0;
  double h_inverse_norm_outside = 0.0;
  double t_min = 0.0;
};

// Max absolute row sum; bounds the spectral norm for symmetric or
// antisymmetric arguments.
inline double inf_norm(const Eigen::SparseMatrix<double>& a) {
  std::vector<double> row(a.rows(), 0.0);
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      row[it.row()] += std::abs(it.value());
  double m = 0.0;
  for (double v : row) m = std::max(m, v);
  return m;
}

namespace detail {

// Diagonal blocks of {D, H} on the even (nodes) and odd (midpoints) sectors:
// D = [[0, Ld^T], [Ld, 0]] with Ld the undeformed lowering operator,
// H = [[0, Hb^T], [Hb, 0]] the deformation block.
inline std::pair<Eigen::SparseMatrix<double>, Eigen::SparseMatrix<double>>
anticommutator_blocks(const OscillatorProblem& p, const Grid1D& g) {
  Eigen::SparseMatrix<double> ld = pseudo_lowering_matrix(p, g, 0.0);
  Eigen::SparseMatrix<double> hb = deformation_block(p, g);
  Eigen::SparseMatrix<double> ldt = Eigen::SparseMatrix<double>(ld.transpose());
  Eigen::SparseMatrix<double> hbt = Eigen::SparseMatrix<double>(hb.transpose());
  Eigen::SparseMatrix<double> even = (ldt * hb + hbt * ld).pruned();
  Eigen::SparseMatrix<double> odd = (ld * hbt + hb * ldt).pruned();
  return {even, odd};
}

}  // namespace detail

inline ThresholdEstimate localization_threshold(const OscillatorProblem& p, const Grid1D& g) {
  ThresholdEstimate est;
  auto [even, odd] = detail::anticommutator_blocks(p, g);
  // Bulk rows only: the extreme dof rows carry the free-end truncation
  // artifact of size r_max/h, which approximates nothing in the continuum
  // (every relevant mode is exponentially small there).
  auto bulk_inf_norm = [](const Eigen::SparseMatrix<double>& a) {
    std::vector<double> row(a.rows(), 0.0);
    for (int k = 0; k < a.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
        row[it.row()] += std::abs(it.value());
    double m = 0.0;
    for (Eigen::Index i = 1; i + 1 < a.rows(); ++i) m = std::max(m, row[i]);
    return m;
  };
  est.anticommutator_norm = std::max(bulk_inf_norm(even), bulk_inf_norm(odd));

  double min_h_outside = std::numeric_limits<double>::infinity();
  for (double r : g.nodes)
    if (std::abs(r) > p.localization_radius) min_h_outside = std::min(min_h_outside, std::abs(r));
  for (double r : g.mids)
    if (std::abs(r) > p.localization_radius) min_h_outside = std::min(min_h_outside, std::abs(r));
  if (!std::isfinite(min_h_outside))
    throw std::invalid_argument("localization_threshold: grid does not reach outside F");
  est.h_inverse_norm_outside = 1.0 / min_h_outside;

  const double a = est.anticommutator_norm;
  const double b = est.h_inverse_norm_outside;
  est.t_min = 4.0 * a * b * b + 2.0 * std::sqrt(4.0 * a * a * b * b * b * b + p.lambda_bar * b * b);
  return est;
}

// Order-0 property of {D, h}: its commutator with a smooth cutoff
// multiplication operator; the norm decays O(h) under refinement.
inline double anticommutator_order0_commutator(const OscillatorProblem& p, const Grid1D& g) {
  auto [even, odd] = detail::anticommutator_blocks(p, g);
  auto chi_diag = [&](const std::vector<double>& pts) {
    Eigen::SparseMatrix<double> x(pts.size(), pts.size());
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t i = 0; i < pts.size(); ++i)
      trips.emplace_back(static_cast<int>(i), static_cast<int>(i),
                         rho_bar(std::abs(pts[i]) / g.box));
    x.setFromTriplets(trips.begin(), trips.end());
    return x;
  };
  Eigen::SparseMatrix<double> xn = chi_diag(g.nodes);
  Eigen::SparseMatrix<double> xm = chi_diag(g.mids);
  double ce = inf_norm(Eigen::SparseMatrix<double>((even * xn - xn * even).pruned()));
  double co = inf_norm(Eigen::SparseMatrix<double>((odd * xm - xm * odd).pruned()));
  return std::max(ce, co);
}

// Pseudo-supersymmetric spectrum on the cylindrical end (radial sector;
// full line for m = 1, weighted half line for m >= 2).
inline SpectralResult pseudo_susy_spectrum(const OscillatorProblem& p, int k_each = 6,
                                           double kernel_tol_rel = 1e-6) {
  if (p.mode != MetricMode::cylindrical_end)
    throw std::invalid_argument("pseudo_susy_spectrum: cylindrical mode required");
  if (!(p.t > 0)) throw std::invalid_argument("pseudo_susy_spectrum: t must be positive");
  Grid1D g = (p.m == 1) ? full_line_grid(p.n_radial, p.box_radius)
                        : radial_grid(p.n_radial, p.box_radius);
  SpectralResult out;
  out.grid_n = p.n_radial;
  out.grid_h = g.h;
  out.box = g.box;

  ThresholdEstimate th = localization_threshold(p, g);
  out.threshold_t_min = th.t_min;
  if (p.t < th.t_min)
    out.diagnostics.push_back("kernel not localized: t = " + std::to_string(p.t) +
                              " below threshold t_min = " + std::to_string(th.t_min));
  if (p.t * g.h * g.h > 1.0 / 16.0)
    out.diagnostics.push_back("convergence failure: grid too coarse for the Gaussian scale"
                              " (t h^2 = " +
                              std::to_string(p.t * g.h * g.h) + " > 1/16)");

  auto l = pseudo_lowering_matrix(p, g, p.t);
  auto pair = susy_pair_spectra(l, k_each);
  const double cutoff = kernel_tol_rel * std::max(1.0, 2.0 * p.t);
  if (out.diagnostics.empty()) {
    detail::finish_spectral(out, g, pair, cutoff);
    if (out.kernel_dim == 0)
      out.diagnostics.push_back("convergence failure: no kernel eigenvalue below tolerance");
  } else {
    for (int i = 0; i < pair.even.values.size(); ++i)
      out.eigenvalues.push_back(pair.even.values(i));
    for (int i = 0; i < pair.odd.values.size(); ++i) out.eigenvalues.push_back(pair.odd.values(i));
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  }
  return out;
}

// Predicted continuum kernel on the nodes: A^{1/2} e^{-t r^2/2} (the density
// factor is the similarity applied to the metric-independent Gaussian),
// L^2-normalized.
inline Eigen::VectorXd predicted_pseudo_kernel(const OscillatorProblem& p, const Grid1D& g) {
  Eigen::VectorXd v(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    double r = g.nodes[i];
    v(static_cast<Eigen::Index>(i)) =
        std::sqrt(radial_density(p, r)) * flat_ground_state(p.t, r * r);
  }
  v /= v.norm() * std::sqrt(g.h);
  return v;
}

// Overlap of two node vectors restricted to |r| <= radius.
inline double restricted_overlap(const Grid1D& g, const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b, double radius) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (std::abs(g.nodes[i]) > radius) continue;
    Eigen::Index e = static_cast<Eigen::Index>(i);
    dot += a(e) * b(e);
    na += a(e) * a(e);
    nb += b(e) * b(e);
  }
  if (na <= 0 || nb <= 0) throw std::invalid_argument("restricted_overlap: empty restriction");
  return std::abs(dot) / std::sqrt(na * nb);
}

// Discretized tau on the full-line degree-0 sector: (tau psi)(x) = psi(-x)
// (real grid vectors; conjugation is trivial). The node set is symmetric.
inline Eigen::VectorXd tau_reflect(const Grid1D& g, const Eigen::VectorXd& psi) {
  if (!g.full_line) throw std::invalid_argument("tau_reflect: full-line grid required");
  return psi.reverse();
}

// Positive-scalar correspondence between two one-dimensional kernels.
struct KernelCorrespondence {
  double coefficient = 0.0;  // <flat, pseudo> / <pseudo, pseudo>
  double tau_invariance_residual = 0.0;
};

inline KernelCorrespondence kernel_correspondence(const Grid1D& g,
                                                  const Eigen::VectorXd& flat_kernel,
                                                  const Eigen::VectorXd& pseudo_kernel) {
  if (flat_kernel.size() != pseudo_kernel.size())
    throw std::invalid_argument("kernel_correspondence: size mismatch");
  KernelCorrespondence out;
  out.coefficient = flat_kernel.dot(pseudo_kernel) / pseudo_kernel.squaredNorm();
  if (!(out.coefficient > 0))
    throw std::runtime_error("kernel_correspondence: pairing is not positive");
  if (g.full_line)
    out.tau_invariance_residual = (tau_reflect(g, pseudo_kernel) - pseudo_kernel).norm();
  return out;
}

// Translation invariance on the end: rows of the undeformed part whose
// stencil lies entirely in r >= 1 equal the reference row (-1/h, +1/h)
// exactly (the warp is constant there, so the density ratios are 1).
inline bool end_blocks_repeat(const OscillatorProblem& p, const Grid1D& g) {
  Eigen::SparseMatrix<double> ld = pseudo_lowering_matrix(p, g, 0.0);
  Eigen::MatrixXd dd = Eigen::MatrixXd(ld);
  const double c = 1.0 / g.h;
  bool saw_end_row = false;
  for (int i = 0; i < dd.rows(); ++i) {
    double lo = std::min(std::abs(g.nodes[i]), std::abs(g.nodes[i + 1]));
    if (std::min(lo, std::abs(g.mids[i])) < 1.0) continue;
    saw_end_row = true;
    for (int j = 0; j < dd.cols(); ++j) {
      double expect = (j == i) ? -c : (j == i + 1) ? c : 0.0;
      if (std::abs(dd(i, j) - expect) > 1e-13 * c) return false;
    }
  }
  return saw_end_row;
}

// ---------------------------------------------------------------------------
// Stabilization homotopy between the joint-radius cutoff (s = 0) and the
// split cutoff (s = 1):
//   H(s, (v, v')) = h_V(gamma_a v) (x) 1 + eps_V (x) h_V'(gamma_b v'),
//   gamma_a = rho_sat(a_s)/a_s, a_s = (1 - s)|(v, v')| + s |v|,
//   gamma_b = rho_sat(b_s)/b_s, b_s = (1 - s)|(v, v')| + s |v'|.
// The fiberwise anti-linear symmetry tau' = (eps (x) eps) . conj covers the
// base flip (v, v') -> -(v, v'); equivariance is exact because h is odd.

struct StabilizationHomotopy {
  int dim_v = 1;
  int dim_vp = 1;

  // Hermitian generator h(e_k) = e_k wedge + e_k contract on Lambda* R^d,
  // assembled densely over the 2^d monomial basis.
  static Eigen::MatrixXd h_generator(int d, int k) {
    const int dim = 1 << d;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int mask = 0; mask < dim; ++mask) {
      int below = 0;
      for (int b = 0; b < k; ++b)
        if (mask >> b & 1) ++below;
      double sign = (below % 2) ? -1.0 : 1.0;
      if (!(mask >> k & 1))
        h(mask | (1 << k), mask) += sign;  // wedge
      else
        h(mask & ~(1 << k), mask) += sign;  // contract
    }
    return h;
  }

  static Eigen::MatrixXd h_of(int d, const Eigen::VectorXd& v) {
    const int dim = 1 << d;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < d; ++k)
      if (v(k) != 0.0) h += v(k) * h_generator(d, k);
    return h;
  }

  static Eigen::MatrixXd eps_of(int d) {
    const int dim = 1 << d;
    Eigen::VectorXd diag(dim);
    for (int mask = 0; mask < dim; ++mask)
      diag(mask) = (std::popcount(static_cast<unsigned>(mask)) % 2) ? -1.0 : 1.0;
    return diag.asDiagonal();
  }

  Eigen::MatrixXd operator()(double s, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& vp) const {
    if (v.size() != dim_v || vp.size() != dim_vp)
      throw std::invalid_argument("StabilizationHomotopy: dimension mismatch");
    const double joint = std::sqrt(v.squaredNorm() + vp.squaredNorm());
    const double a = (1.0 - s) * joint + s * v.norm();
    const double b = (1.0 - s) * joint + s * vp.norm();
    const double ga = rho_sat_over_r(a);
    const double gb = rho_sat_over_r(b);
    const int da = 1 << dim_v, db = 1 << dim_vp;
    Eigen::MatrixXd first = h_of(dim_v, ga * v);
    Eigen::MatrixXd second = h_of(dim_vp, gb * vp);
    Eigen::MatrixXd eps = eps_of(dim_v);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(da * db, da * db);
    out += dense_kron(first, Eigen::MatrixXd::Identity(db, db));
    out += dense_kron(eps, second);
    return out;
  }

  Eigen::MatrixXd tau_fiber() const {
    return dense_kron(eps_of(dim_v), eps_of(dim_vp));
  }

  // || tau H(s, w) - H(s, -w) tau ||_max; exact zero in exact arithmetic.
  double equivariance_residual(double s, const Eigen::VectorXd& v,
                               const Eigen::VectorXd& vp) const {
    Eigen::MatrixXd t = tau_fiber();
    Eigen::MatrixXd lhs = t * (*this)(s, v, vp);
    Eigen::MatrixXd rhs = (*this)(s, -v, -vp) * t;
    return (lhs - rhs).cwiseAbs().maxCoeff();
  }
};

}  // namespace spinlab
