#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace magnus {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational number. Invariants: denominator > 0, gcd(|num|, den) = 1,
// zero is 0/1. Normalization is eager (every operation returns reduced form).
class Rational {
 public:
  Rational() = default;
  Rational(int n) : v_(n) {}                    // NOLINT: implicit by design
  Rational(long long n) : v_(n) {}              // NOLINT
  explicit Rational(BigInt n) : v_(std::move(n)) {}
  Rational(BigInt num, BigInt den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = Backend(std::move(num));
    v_ /= Backend(std::move(den));
  }

  // Accepts "p/q" or "p" with optional sign, e.g. "-1/12".
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  }

  BigInt num() const { return numerator(v_); }
  BigInt den() const { return denominator(v_); }
  bool is_zero() const { return v_.is_zero(); }

  // Serializes as "p/q", or "p" when the denominator is 1.
  std::string str() const { return v_.str(); }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(Backend(a.v_ + b.v_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(Backend(a.v_ - b.v_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(Backend(a.v_ * b.v_)); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(Backend(a.v_ / b.v_));
  }
  Rational operator-() const { return Rational(Backend(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  double to_double() const { return v_.convert_to<double>(); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  using Backend = boost::multiprecision::cpp_rational;
  explicit Rational(Backend v) : v_(std::move(v)) {}
  Backend v_;
};

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

// Bernoulli numbers in the convention B_1 = -1/2, i.e. the coefficients of
// z/(e^z - 1) = sum B_m z^m / m!.  (The B_1 = +1/2 convention also appears
// in the literature; everything here is pinned to B_1 = -1/2.)
// Computed by the recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0, B_0 = 1,
// with results cached; the cache is guarded for concurrent use.
inline Rational bernoulli(unsigned m) {
  static std::vector<Rational> cache{Rational(1)};
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  while (cache.size() <= m) {
    unsigned n = static_cast<unsigned>(cache.size());
    Rational acc(0);
    for (unsigned j = 0; j < n; ++j) acc += Rational(binomial(n + 1, j)) * cache[j];
    cache.push_back(-acc / Rational(BigInt(n + 1)));
  }
  return cache[m];
}

}  // namespace magnus
