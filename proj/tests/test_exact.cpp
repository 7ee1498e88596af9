#include <catch2/catch_amalgamated.hpp>

#include "magnus/exact.hpp"

using magnus::BigInt;
using magnus::bernoulli;
using magnus::binomial;
using magnus::factorial;
using magnus::Rational;

TEST_CASE("rational normalization and serialization") {
  CHECK(Rational(BigInt(2), BigInt(-4)).str() == "-1/2");
  CHECK(Rational(BigInt(0), BigInt(7)).str() == "0");
  CHECK(Rational(BigInt(-3), BigInt(1)).str() == "-3");
  CHECK(Rational(BigInt(6), BigInt(4)).str() == "3/2");
  CHECK(Rational(BigInt(2), BigInt(-4)).den() == 2);
  CHECK(Rational(BigInt(2), BigInt(-4)).num() == -1);
  CHECK_THROWS_AS(Rational(BigInt(1), BigInt(0)), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("rational parse round-trip") {
  for (const char* s : {"-1/12", "0", "7", "-3", "355/113", "1/30240"}) {
    Rational r = Rational::parse(s);
    CHECK(r.str() == s);
    CHECK(Rational::parse(r.str()) == r);
  }
  CHECK(Rational::parse("2/4") == Rational(BigInt(1), BigInt(2)));
}

TEST_CASE("rational arithmetic stays normalized") {
  Rational a(BigInt(1), BigInt(6)), b(BigInt(1), BigInt(10));
  CHECK((a + b).str() == "4/15");
  CHECK((a - b).str() == "1/15");
  CHECK((a * b).str() == "1/60");
  CHECK((a / b).str() == "5/3");
  CHECK((-a).str() == "-1/6");
}

TEST_CASE("bernoulli numbers, B1 = -1/2 convention") {
  CHECK(bernoulli(0) == Rational(1));
  CHECK(bernoulli(1) == Rational(BigInt(-1), BigInt(2)));
  CHECK(bernoulli(2) == Rational(BigInt(1), BigInt(6)));
  CHECK(bernoulli(3) == Rational(0));
  CHECK(bernoulli(4) == Rational(BigInt(-1), BigInt(30)));
  CHECK(bernoulli(6) == Rational(BigInt(1), BigInt(42)));
  CHECK(bernoulli(8) == Rational(BigInt(-1), BigInt(30)));
}

TEST_CASE("odd bernoulli numbers vanish") {
  for (unsigned m = 3; m <= 19; m += 2) CHECK(bernoulli(m) == Rational(0));
}

TEST_CASE("generating series oracle: inversion of (e^z - 1)/z") {
  // (e^z - 1)/z = sum z^k/(k+1)!; invert the truncated series independently
  // of the recurrence and compare with B_n / n!.
  constexpr unsigned N = 14;
  std::vector<Rational> inv(N + 1);
  inv[0] = Rational(1);
  for (unsigned n = 1; n <= N; ++n) {
    Rational acc(0);
    for (unsigned k = 1; k <= n; ++k)
      acc += Rational(BigInt(1), factorial(k + 1)) * inv[n - k];
    inv[n] = -acc;
  }
  for (unsigned n = 0; n <= N; ++n)
    CHECK(inv[n] == bernoulli(n) / Rational(factorial(n)));
}

TEST_CASE("binomial and factorial helpers") {
  CHECK(binomial(7, 3) == 35);
  CHECK(binomial(3, 7) == 0);
  CHECK(factorial(6) == 720);
}
