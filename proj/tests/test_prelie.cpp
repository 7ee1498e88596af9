#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "magnus/expansion.hpp"
#include "magnus/prelie.hpp"
#include "magnus/trees.hpp"

using namespace magnus;

namespace {

Tree T(const char* s) { return parse_tree(s); }
PlanarTree P(const char* s) { return parse_planar(s); }

Tree random_tree(std::mt19937& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  int n = deg(rng);
  const auto& pool = enumerate_planar(n);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return canonicalize(pool[pick(rng)]);
}

// Independent count of the total grafting mass of Psi_bar(tau): each branch
// list F[t1] > (F[t2] > (... > x)) multiplies the masses and one factor per
// grafting target (1 + degree of everything to its right).
long long psi_mass(const PlanarTree& t) {
  long long m = 1;
  int suffix = 1;  // degree of x
  const auto& cs = t.children();
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
    m *= psi_mass(*it) * suffix;
    suffix += it->degree();
  }
  return m;
}

}  // namespace

TEST_CASE("graft examples") {
  PreLieElement a = graft(T("o"), T("o"));
  CHECK(a == PreLieElement(T("o(o)")));

  PreLieElement b = graft(T("o"), T("o(o)"));
  PreLieElement expected_b;
  expected_b.add(T("o(o(o))"), 1);
  expected_b.add(T("o(o,o)"), 1);
  CHECK(b == expected_b);

  // vertex onto the cherry: root attachment gives the 3-leaf star, each leaf
  // attachment gives the same canonical tree, so multiplicity 2
  PreLieElement c = graft(T("o"), T("o(o,o)"));
  PreLieElement expected_c;
  expected_c.add(T("o(o,o,o)"), 1);
  expected_c.add(T("o(o,o(o))"), 2);
  CHECK(c == expected_c);
}

TEST_CASE("graft_linear is bilinear") {
  PreLieElement x(T("o"), Rational(2));
  CHECK(graft_linear(x, PreLieElement(T("o"))) == PreLieElement(T("o(o)"), Rational(2)));
  CHECK(graft_linear(PreLieElement{}, x).is_zero());

  PreLieElement sum;
  sum.add(T("o"), 1);
  sum.add(T("o(o)"), 1);
  PreLieElement r = graft_linear(sum, PreLieElement(T("o")));
  PreLieElement expected;
  expected.add(T("o(o)"), 1);
  expected.add(T("o(o(o))"), 1);
  CHECK(r == expected);
}

TEST_CASE("psi_bar on ladders and the cherry") {
  CHECK(psi_bar(P("o")) == PreLieElement(T("o")));
  PlanarTree lad = P("o");
  for (int k = 2; k <= 4; ++k) {
    lad = b_plus({lad});
    CHECK(psi_bar(lad) == PreLieElement(canonicalize(lad)));
  }
  PreLieElement cherry = psi_bar(P("o(o,o)"));
  PreLieElement expected;
  expected.add(T("o(o(o))"), 1);
  expected.add(T("o(o,o)"), 1);
  CHECK(cherry == expected);
}

TEST_CASE("psi_bar multiplicativity over the left Butcher product") {
  for (int d1 = 1; d1 <= 3; ++d1)
    for (int d2 = 1; d2 + d1 <= 7; ++d2)
      for (const auto& t1 : enumerate_planar(d1))
        for (const auto& t2 : enumerate_planar(d2))
          CHECK(psi_bar(left_butcher(t1, t2)) == graft_linear(psi_bar(t1), psi_bar(t2)));
}

TEST_CASE("psi_bar degree homogeneity and total mass") {
  for (int n = 1; n <= 6; ++n)
    for (const auto& t : enumerate_planar(n)) {
      PreLieElement e = psi_bar(t);
      Rational mass(0);
      for (const auto& [s, c] : e.terms()) {
        CHECK(s.degree() == n);
        CHECK(c > Rational(0));
        mass += c;
      }
      CHECK(mass == Rational(psi_mass(t)));
    }
}

TEST_CASE("alpha coefficients") {
  CHECK(alpha(T("o(o(o))"), P("o(o,o)")) == Rational(1));
  CHECK(alpha(T("o(o,o)"), P("o(o,o)")) == Rational(1));
  CHECK(alpha(T("o(o,o)"), P("o(o(o))")) == Rational(0));
  CHECK(alpha(T("o"), P("o(o,o)")) == Rational(0));  // degree mismatch
}

TEST_CASE("pre-Lie identity for grafting") {
  PreLieElement dot(T("o"));
  CHECK(prelie_associator_check(dot, dot, dot).is_zero());
  CHECK(prelie_associator_check(dot, PreLieElement(T("o(o)")), PreLieElement(T("o(o,o)"))).is_zero());

  std::mt19937 rng(7);
  for (int i = 0; i < 60; ++i) {
    PreLieElement x(random_tree(rng, 2)), y(random_tree(rng, 2)), z(random_tree(rng, 1));
    CHECK(prelie_associator_check(x, y, z).is_zero());
  }
}

TEST_CASE("decorated compatibility: decorating commutes with psi_bar") {
  // G_a(Psi_bar(tau)) with a = sum of decorated vertices equals the
  // decoration sum of Psi_bar applied to decorated copies of tau.
  PreLieElement a;
  a.add(Tree(1), 1);
  a.add(Tree(2), 1);
  for (int n = 1; n <= 4; ++n)
    for (const auto& tau : enumerate_planar(n)) {
      PreLieElement lhs = tree_functional(tau, a);
      PreLieElement rhs;
      for (const auto& sigma : decorate_all(tau, 2, 2 * n)) rhs.add(psi_bar(sigma));
      CHECK(lhs == rhs);
    }
}
