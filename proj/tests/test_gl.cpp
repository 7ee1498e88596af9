#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "magnus/expansion.hpp"
#include "magnus/gl.hpp"

using namespace magnus;

namespace {

Tree T(const char* s) { return parse_tree(s); }
Rational Q(const char* s) { return Rational::parse(s); }

Tree random_tree(std::mt19937& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  const auto& pool = enumerate_planar(deg(rng));
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return canonicalize(pool[pick(rng)]);
}

Forest random_forest(std::mt19937& rng, int max_total_degree) {
  std::uniform_int_distribution<int> count(0, 2);
  std::vector<Tree> ts;
  int budget = max_total_degree;
  int k = count(rng);
  for (int i = 0; i < k && budget > 0; ++i) {
    Tree t = random_tree(rng, std::min(3, budget));
    budget -= t.degree();
    ts.push_back(t);
  }
  return Forest(std::move(ts));
}

PreLieElement act_linear(const Forest& f, const PreLieElement& x) {
  PreLieElement out;
  for (const auto& [t, c] : x.terms()) out.add(gl_action(f, t), c);
  return out;
}

}  // namespace

TEST_CASE("forest basics") {
  CHECK(Forest{}.key() == "1");
  CHECK(Forest{}.weight() == 0);
  Forest f({T("o(o)"), T("o")});
  CHECK(f.key() == "o|o(o)");  // canonical order
  CHECK(f.weight() == 2);
  CHECK(f.degree() == 3);
}

TEST_CASE("gl_product of two single vertices") {
  GLElement x(Forest(T("o")));
  GLElement prod = gl_product(x, x);
  GLElement expected;
  expected.add(Forest::dots(2), 1);
  expected.add(Forest(T("o(o)")), 1);
  CHECK(prod == expected);
}

TEST_CASE("empty forest is the unit") {
  GLElement unit(Forest{});
  std::mt19937 rng(11);
  for (int i = 0; i < 20; ++i) {
    GLElement x(random_forest(rng, 5), Q("3/7"));
    CHECK(gl_product(unit, x) == x);
    CHECK(gl_product(x, unit) == x);
  }
}

TEST_CASE("gl product is noncommutative") {
  GLElement one_dot(Forest(T("o")));
  GLElement two_dots(Forest::dots(2));
  CHECK(gl_product(two_dots, one_dot) != gl_product(one_dot, two_dots));
}

TEST_CASE("gl action on trees") {
  CHECK(gl_action(Forest{}, T("o(o)")) == PreLieElement(T("o(o)")));
  CHECK(gl_action(Forest(T("o")), T("o")) == PreLieElement(T("o(o)")));
  // ({., .}, .) -> the cherry, coefficient 1
  CHECK(gl_action(Forest::dots(2), T("o")) == PreLieElement(T("o(o,o)")));
}

TEST_CASE("two-tree action identity") {
  std::mt19937 rng(23);
  for (int i = 0; i < 40; ++i) {
    Tree t1 = random_tree(rng, 2), t2 = random_tree(rng, 2), t = random_tree(rng, 2);
    PreLieElement lhs = gl_action(Forest({t1, t2}), t);
    PreLieElement rhs = graft_linear(PreLieElement(t2), graft(t1, t)) -
                        graft_linear(graft(t2, t1), PreLieElement(t));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("gl product associativity") {
  std::mt19937 rng(37);
  for (int i = 0; i < 25; ++i) {
    GLElement x(random_forest(rng, 2), Q("2/3"));
    GLElement y(random_forest(rng, 2), Q("-1/2"));
    GLElement z(random_forest(rng, 1));
    CHECK(gl_product(gl_product(x, y), z) == gl_product(x, gl_product(y, z)));
  }
}

TEST_CASE("module axiom: (F * F') -> t = F' -> (F -> t)") {
  std::mt19937 rng(41);
  for (int i = 0; i < 30; ++i) {
    Forest f = random_forest(rng, 2), g = random_forest(rng, 2);
    Tree t = random_tree(rng, 2);
    GLElement prod = gl_product(GLElement(f), GLElement(g));
    PreLieElement lhs;
    for (const auto& [forest, c] : prod.terms()) lhs.add(gl_action(forest, t), c);
    PreLieElement rhs = act_linear(g, gl_action(f, t));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("peeling action is well-defined and matches the closed form") {
  std::mt19937 rng(53);
  for (int i = 0; i < 30; ++i) {
    Forest f = random_forest(rng, 4);
    Tree t = random_tree(rng, 2);
    if (f.degree() + t.degree() > 6) continue;
    PreLieElement closed = gl_action(f, t);
    for (std::size_t peel = 0; peel < std::max<std::size_t>(f.weight(), 1); ++peel) {
      if (f.empty()) break;
      CHECK(gl_action_peeling(f, t, peel) == closed);
    }
    if (f.empty()) CHECK(gl_action_peeling(f, t) == closed);
  }
}

TEST_CASE("log* components at low orders") {
  CHECK(log_star_component(1) == PreLieElement(T("o")));
  CHECK(log_star_component(2) == PreLieElement(T("o(o)"), Q("-1/2")));

  PreLieElement n3;
  n3.add(T("o(o(o))"), Q("1/3"));
  n3.add(T("o(o,o)"), Q("1/12"));
  CHECK(log_star_component(3) == n3);

  PreLieElement n4;
  n4.add(T("o(o(o(o)))"), Q("-1/4"));
  n4.add(T("o(o,o(o))"), Q("-1/12"));
  n4.add(T("o(o(o,o))"), Q("-1/12"));
  CHECK(log_star_component(4) == n4);
}

TEST_CASE("log* component agrees with the pre-Lie recursion") {
  for (int n = 1; n <= 5; ++n) CHECK(log_star_component(n) == magnus_recursion(n));
}
