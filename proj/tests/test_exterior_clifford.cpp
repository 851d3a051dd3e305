// Exact identities of the exterior-algebra Clifford modules.

#include <catch2/catch_amalgamated.hpp>

#include "spinlab/clifford.hpp"
#include "spinlab/exterior.hpp"

using namespace spinlab;

namespace {

// c(e_a)c(e_b) + c(e_b)c(e_a) = -2 <a,b>, h analogue = +2 <a,b>, {c,h} = 0,
// and both anticommute with the parity involution. All equalities exact.
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

TEST_CASE("exterior modules satisfy the Clifford relations exactly, dims 1..6") {
  for (int d = 1; d <= 6; ++d) {
    auto sp = InnerProductSpace<CRat>::orthonormal(d);
    auto m = exterior_module<CRat>(sp);
    INFO("dim " << d);
    CHECK(module_identities(m));
    CHECK(m.dim == (1 << d));
  }
}

TEST_CASE("clifford action on general rational vectors") {
  auto sp = InnerProductSpace<CRat>::orthonormal(3);
  auto m = exterior_module<CRat>(sp);
  std::vector<CRat> v{CRat(Rational(1, 2)), CRat(Rational(-2, 3)), CRat(3)};
  std::vector<CRat> w{CRat(1), CRat(Rational(1, 5)), CRat(0)};
  CRat vw = v[0] * w[0] + v[1] * w[1] + v[2] * w[2];  // <v, w>
  Matrix<CRat> id = Matrix<CRat>::identity(m.dim);
  CHECK((m.c(v) * m.c(w) + m.c(w) * m.c(v) + CRat(2) * vw * id).is_zero_matrix());
  CHECK((m.h(v) * m.h(w) + m.h(w) * m.h(v) - CRat(2) * vw * id).is_zero_matrix());
  CHECK((m.c(v) * m.h(w) + m.h(w) * m.c(v)).is_zero_matrix());
}

TEST_CASE("graded tensor preserves the relations") {
  auto m2 = exterior_module<CRat>(InnerProductSpace<CRat>::orthonormal(2));
  auto m = graded_tensor(m2, m2);
  CHECK(m.vdim == 4);
  CHECK(m.dim == 16);
  CHECK(module_identities(m));

  auto m3 = graded_tensor_many<CRat>({m2, m2, m2});
  CHECK(m3.vdim == 6);
  CHECK(module_identities(m3));
}

TEST_CASE("wedge-minus-contraction matches the module generators") {
  auto sp = InnerProductSpace<CRat>::orthonormal(3);
  auto m = exterior_module<CRat>(sp);
  for (int k = 0; k < 3; ++k) {
    std::vector<CRat> e(3, CRat(0));
    e[k] = CRat(1);
    Matrix<CRat> c_mat = materialize<CRat>(
        3, [&](const GradedElement<CRat>& a) { return clifford_action(e, a, sp); });
    Matrix<CRat> h_mat = materialize<CRat>(
        3, [&](const GradedElement<CRat>& a) { return hermitian_action(e, a, sp); });
    CHECK(c_mat == m.c_gen[k]);
    CHECK(h_mat == m.h_gen[k]);
  }
}

TEST_CASE("tensor reordering is implemented by the exchange operator") {
  auto a = exterior_module<CRat>(InnerProductSpace<CRat>::orthonormal(1));
  auto b = exterior_module<CRat>(InnerProductSpace<CRat>::orthonormal(2));
  std::vector<CliffordModule<CRat>> parts{a, b};
  auto fwd = graded_tensor_ordered(parts, {0, 1});
  auto rev = graded_tensor_ordered(parts, {1, 0});
  CHECK(module_identities(fwd));
  CHECK(module_identities(rev));
  CHECK(fwd.dim == rev.dim);
}
