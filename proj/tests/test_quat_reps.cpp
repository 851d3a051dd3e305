// Quaternionic S0/S1 modules and the canonical intertwiner, exact rational
// checks plus the numeric basis-independence property.

#include <catch2/catch_amalgamated.hpp>

#include "spinlab/quat_reps.hpp"

using namespace spinlab;

namespace {

template <typename S>
bool module_identities(const CliffordModule<S>& m) {
  Matrix<S> id = Matrix<S>::identity(m.dim);
  Matrix<S> eps = m.epsilon();
  for (int a = 0; a < m.vdim; ++a) {
    for (int b = 0; b < m.vdim; ++b) {
      Matrix<S> cc = m.c_gen[a] * m.c_gen[b] + m.c_gen[b] * m.c_gen[a];
      Matrix<S> hh = m.h_gen[a] * m.h_gen[b] + m.h_gen[b] * m.h_gen[a];
      Matrix<S> ch = m.c_gen[a] * m.h_gen[b] + m.h_gen[b] * m.c_gen[a];
      S g = (a == b) ? S(2) : S(0);
      if (!(cc + g * id).is_zero_matrix()) return false;
      if (!(hh - g * id).is_zero_matrix()) return false;
      if (!ch.is_zero_matrix()) return false;
    }
    if (!(eps * m.c_gen[a] + m.c_gen[a] * eps).is_zero_matrix()) return false;
    if (!(eps * m.h_gen[a] + m.h_gen[a] * eps).is_zero_matrix()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("right multiplication blocks compose contravariantly") {
  auto ri = right_i_matrix<Rational>(2);
  auto rj = right_j_matrix<Rational>(2);
  auto rk = right_k_matrix<Rational>(2);
  // apply i first, then j: R_j R_i = R_{ij} with ij = k
  CHECK(rj * ri == rk);
  CHECK(ri * rj == Rational(-1) * rk);
  Matrix<Rational> id = Matrix<Rational>::identity(8);
  CHECK(ri * ri == Rational(-1) * id);
  CHECK(rj * rj == Rational(-1) * id);
  CHECK(rk * rk == Rational(-1) * id);
}

TEST_CASE("S0 and S1 modules at n = 1 satisfy the relations exactly") {
  auto s0 = build_s0_module<CRat>(1);
  auto s1 = build_s1_module<CRat>(1);
  CHECK(module_identities(s0));
  CHECK(module_identities(s1));

  // tau is anti-linear; its square is m conj(m), equal to the grading.
  Matrix<CRat> t0 = s0.tau.m;
  CHECK(t0 * t0.conjugate() == s0.epsilon());
  Matrix<CRat> t1 = s1.tau.m;
  CHECK(t1 * t1.conjugate() == s1.epsilon());

  // tau c(v) = c(v j) tau: generator e -> ej (index 0 -> 2), ei -> ek
  // (1 -> 3); on the way back ej -> -e.
  CHECK(t0 * s0.c_gen[0].conjugate() == s0.c_gen[2] * t0);
  CHECK(t1 * s1.c_gen[0].conjugate() == s1.c_gen[2] * t1);
  CHECK(t0 * s0.h_gen[1].conjugate() == s0.h_gen[3] * t0);
  CHECK(t1 * s1.h_gen[1].conjugate() == s1.h_gen[3] * t1);
  CHECK(t0 * s0.h_gen[0].conjugate() == s0.h_gen[2] * t0);
  CHECK(t0 * s0.h_gen[2].conjugate() == CRat(-1) * s0.h_gen[0] * t0);
}

TEST_CASE("canonical intertwiner: generator rules, grading, gram scale") {
  auto rep1 = verify_intertwiner<CRat>(1);
  CHECK(rep1.c_ok);
  CHECK(rep1.h_ok);
  CHECK(rep1.tau_ok);
  CHECK(rep1.grading_ok);
  CHECK(rep1.gram_scaled_identity);
  CHECK(rep1.gram_scale_num == 4);  // F^dagger F = 4^n id
  CHECK(rep1.gram_scale_den == 1);

  auto rep2 = verify_intertwiner<CRat>(2);
  CHECK(rep2.ok());
  CHECK(rep2.gram_scale_num == 16);
}

TEST_CASE("vacuum expansion at n = 1: (e + i ei) wedge (ej - i ek)") {
  auto vac = intertwiner_vacuum<CRat>(1, standard_frame<CRat>(1));
  REQUIRE(vac.size() == 4);
  CRat i = CRat::i();
  CHECK(vac.at(0b0101) == CRat(1));       // e ^ ej
  CHECK(vac.at(0b1001) == CRat(-1) * i);  // e ^ ek
  CHECK(vac.at(0b0110) == i);             // ei ^ ej
  CHECK(vac.at(0b1010) == CRat(1));       // ei ^ ek
}

TEST_CASE("direct sums: F on V (+) W equals F^V tensor F^W") {
  auto rep = direct_sum_compatibility<CRat>(1, 1);
  CHECK(rep.c_ok);
  CHECK(rep.h_ok);
  CHECK(rep.tau_ok);
  CHECK(rep.f_ok);
}

TEST_CASE("basis independence of the rebuilt intertwiner") {
  double dev = basis_independence_max_dev(1, 5, 42u);
  CHECK(dev < 1e-12);
}
