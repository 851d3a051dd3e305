// Walk through the rp2 gerbe: check the cocycle, try to trivialize, and
// print the obstruction certificate. For contrast, the same nerve with a
// coboundary cochain trivializes with explicit edge sections.

#include <cstdio>

#include "spinlab/gerbe.hpp"

using namespace spinlab;

namespace {

void report(const char* label, const O1Gerbe& g) {
  CocycleReport c = verify_cocycle(g);
  std::printf("%s: %zu charts, %zu pairs, %zu triples, cocycle %s\n", label, size_t(g.nerve.n),
              g.nerve.pairs.size(), g.nerve.triples.size(), c.pass ? "ok" : "BROKEN");
  TrivializationResult r = trivialize(g);
  if (r.trivializable) {
    std::printf("  trivializable; edge sections:");
    for (int u : r.edge_sections) std::printf(" %+d", u);
    std::printf("\n");
    return;
  }
  std::printf("  not trivializable; obstruction pairs over triples:");
  for (int t : r.obstruction) std::printf(" %d", t);
  std::printf("\n  certificate pairing: %+d (any delta u pairs to +1)\n",
              TrivializationResult::pairing(g, r.obstruction));
}

}  // namespace

int main() {
  report("rp2 double cover", rp2_gerbe());

  FiniteNerve nerve = rp2_nerve();
  Cochain1 u(nerve.pairs.size(), 1);
  u[0] = u[3] = u[7] = -1;
  O1Gerbe coboundary(nerve, coboundary1(nerve, u));
  report("same nerve, coboundary cochain", coboundary);
  return 0;
}
