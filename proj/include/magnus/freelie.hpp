#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magnus/exact.hpp"
#include "magnus/expansion.hpp"
#include "magnus/prelie.hpp"
#include "magnus/trees.hpp"

namespace magnus {

// Free Lie algebra over the graded alphabet E = {a_i : i >= 1}, |a_i| = i,
// in the Lyndon basis: elements are rational combinations of Lyndon words,
// each word standing for its standard (Chen-Fox-Lyndon) bracketing.
//
// Brackets are computed by expanding into the free associative algebra and
// projecting back; the projection is triangular on Lyndon words and doubles
// as a Lie-membership check.

using Word = std::vector<int>;  // letter i = generator a_i, weight i

inline int word_weight(const Word& w) {
  int s = 0;
  for (int x : w) s += x;
  return s;
}

inline std::string word_str(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += 'a' + std::to_string(w[i]);
  }
  return s;
}

inline bool is_lyndon(const Word& w) {
  if (w.empty()) return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (!std::lexicographical_compare(w.begin(), w.end(), w.begin() + static_cast<std::ptrdiff_t>(i), w.end()))
      return false;
  return true;
}

// Standard factorization w = uv, v the lexicographically least proper suffix.
inline std::pair<Word, Word> lyndon_factorization(const Word& w) {
  if (w.size() < 2) throw std::invalid_argument("lyndon_factorization: word too short");
  std::size_t best = 1;
  for (std::size_t i = 2; i < w.size(); ++i)
    if (std::lexicographical_compare(w.begin() + static_cast<std::ptrdiff_t>(i), w.end(),
                                     w.begin() + static_cast<std::ptrdiff_t>(best), w.end()))
      best = i;
  return {Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(best)),
          Word(w.begin() + static_cast<std::ptrdiff_t>(best), w.end())};
}

using AssocPoly = std::map<Word, Rational>;  // free associative algebra, word basis

namespace detail {

inline void ap_add(AssocPoly& a, const Word& w, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = a.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) a.erase(it);
  }
}

inline AssocPoly ap_mul(const AssocPoly& a, const AssocPoly& b) {
  AssocPoly out;
  for (const auto& [u, cu] : a)
    for (const auto& [v, cv] : b) {
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      ap_add(out, w, cu * cv);
    }
  return out;
}

// Word-basis expansion of the standard bracketing of a Lyndon word.  The
// expansion of b(w) is w plus lexicographically larger rearrangements of w.
inline const AssocPoly& expand_lyndon(const Word& w) {
  static std::map<Word, AssocPoly> cache;
  static std::recursive_mutex mtx;
  std::lock_guard<std::recursive_mutex> lock(mtx);
  auto it = cache.find(w);
  if (it != cache.end()) return it->second;
  AssocPoly result;
  if (w.size() == 1) {
    result.emplace(w, Rational(1));
  } else {
    auto [u, v] = lyndon_factorization(w);
    const AssocPoly eu = expand_lyndon(u);
    const AssocPoly ev = expand_lyndon(v);
    result = ap_mul(eu, ev);
    for (const auto& [word, c] : ap_mul(ev, eu)) ap_add(result, word, -c);
  }
  return cache.emplace(w, std::move(result)).first->second;
}

}  // namespace detail

using LieElement = LinComb<Word>;  // supported on Lyndon words

inline LieElement lie_generator(int i) {
  if (i < 1) throw std::invalid_argument("lie_generator: index must be >= 1");
  return LieElement(Word{i});
}

inline AssocPoly expand(const LieElement& x) {
  AssocPoly out;
  for (const auto& [w, c] : x.terms())
    for (const auto& [word, d] : detail::expand_lyndon(w)) detail::ap_add(out, word, c * d);
  return out;
}

// Rewrites a Lie polynomial (given in the word basis) into the Lyndon basis.
// Triangularity: the standard bracketing of a Lyndon word w expands as w
// plus lexicographically larger rearrangements, so repeatedly stripping the
// least surviving word terminates; a nonzero non-Lyndon leading word means
// the input was not a Lie element.
inline LieElement lyndon_project(AssocPoly p) {
  LieElement out;
  while (!p.empty()) {
    const Word w = p.begin()->first;
    const Rational c = p.begin()->second;
    if (!is_lyndon(w))
      throw std::invalid_argument("lyndon_project: not a Lie element (leading word " + word_str(w) + ")");
    out.add(w, c);
    for (const auto& [word, d] : detail::expand_lyndon(w)) detail::ap_add(p, word, -(c * d));
  }
  return out;
}

// Lie bracket, bilinear, result reduced to the Lyndon basis.
inline LieElement bracket(const LieElement& x, const LieElement& y) {
  if (x.is_zero() || y.is_zero()) return LieElement{};
  AssocPoly ex = expand(x), ey = expand(y);
  AssocPoly out = detail::ap_mul(ex, ey);
  for (const auto& [w, c] : detail::ap_mul(ey, ex)) detail::ap_add(out, w, -c);
  return lyndon_project(std::move(out));
}

// Weight of a homogeneous element; throws on mixed grading.
inline int element_weight(const LieElement& x) {
  if (x.is_zero()) throw std::invalid_argument("element_weight: zero element has no weight");
  int w = word_weight(x.terms().begin()->first);
  for (const auto& [word, c] : x.terms())
    if (word_weight(word) != w) throw std::invalid_argument("element_weight: mixed grading");
  return w;
}

// x > y := (1/|x|) [x, y] for homogeneous x.
inline LieElement prelie_on_lie(const LieElement& x, const LieElement& y) {
  int w = element_weight(x);  // throws the grading error for non-homogeneous x
  return Rational(BigInt(1), BigInt(w)) * bracket(x, y);
}

// All Lyndon words of the given weighted degree (letter i has weight i).
inline std::vector<Word> lyndon_words_of_weight(int d) {
  if (d < 1) throw std::invalid_argument("lyndon_words_of_weight: degree must be >= 1");
  std::vector<Word> out;
  Word cur;
  std::function<void(int)> rec = [&](int left) {
    if (left == 0) {
      if (is_lyndon(cur)) out.push_back(cur);
      return;
    }
    for (int letter = 1; letter <= left; ++letter) {
      cur.push_back(letter);
      rec(left - letter);
      cur.pop_back();
    }
  };
  rec(d);
  std::sort(out.begin(), out.end());
  return out;
}

struct GradedDimension {
  std::map<int, std::size_t> by_degree;
  std::map<int, std::size_t> cumulative;
};

inline GradedDimension graded_dimension(int max_degree) {
  if (max_degree < 1) throw std::invalid_argument("graded_dimension: degree must be >= 1");
  GradedDimension g;
  std::size_t running = 0;
  for (int d = 1; d <= max_degree; ++d) {
    std::size_t n = lyndon_words_of_weight(d).size();
    running += n;
    g.by_degree[d] = n;
    g.cumulative[d] = running;
  }
  return g;
}

namespace detail {

// Phi on a single fully decorated tree, by peeling the first canonical
// child c off t = B_+(c, rest):  graft(c, rest) = t + (attachments below the
// root), all of which have one root branch fewer, so
//   Phi(t) = Phi(c) > Phi(rest) - sum of Phi over the deeper attachments.
inline LieElement phi_tree(const Tree& t, std::size_t peel, bool use_cache) {
  static std::map<std::string, LieElement> cache;
  static std::mutex mtx;
  if (t.decoration() < 1)
    throw std::invalid_argument("phi: undecorated vertex in " + t.key());
  if (t.children().empty()) return lie_generator(t.decoration());
  if (use_cache) {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(t.key());
    if (it != cache.end()) return it->second;
  }
  const Tree c = t.children().at(peel);
  std::vector<Tree> rest_children;
  for (std::size_t i = 0; i < t.children().size(); ++i)
    if (i != peel) rest_children.push_back(t.children()[i]);
  const Tree rest(t.decoration(), std::move(rest_children));

  LieElement result = prelie_on_lie(phi_tree(c, 0, use_cache), phi_tree(rest, 0, use_cache));
  for (const auto& [u, m] : graft(c, rest).terms()) {
    if (u == t) continue;  // root attachment, multiplicity 1
    result.add(phi_tree(u, 0, use_cache), -m);
  }
  if (use_cache) {
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(t.key(), result);
  }
  return result;
}

}  // namespace detail

// The pre-Lie homomorphism Phi: decorated trees under grafting -> (L(E), >),
// Phi(vertex a_i) = a_i, Phi(s -> t) = Phi(s) > Phi(t); extended linearly.
inline LieElement phi(const Tree& t) { return detail::phi_tree(t, 0, true); }

inline LieElement phi(const PreLieElement& x) {
  LieElement out;
  for (const auto& [t, c] : x.terms()) out.add(phi(t), c);
  return out;
}

// Peeling a different child must give the same value; exposed for the
// decomposition-independence property test.
inline LieElement phi_peel_at(const Tree& t, std::size_t peel) {
  return detail::phi_tree(t, peel, false);
}

// Degree-n component of the pre-Lie Magnus element in L(E) for
// x = sum lambda_i a_i: enumerate decorated e1-trees of decorated degree n,
// weight each by gamma (decoration-blind) and lambda(sigma), push through
// Psi_bar and Phi.
inline LieElement magnus_lie(int n, const std::map<int, Rational>& lambdas = {}) {
  check_order(n);
  auto lambda_of = [&](int i) {
    auto it = lambdas.find(i);
    return it == lambdas.end() ? Rational(1) : it->second;
  };
  LieElement out;
  for (int v = 1; v <= n; ++v) {
    for (const auto& shape : enumerate_e1(v)) {
      Rational g = gamma(shape);
      if (g.is_zero()) continue;
      for (const auto& sigma : decorate_all(shape, n - v + 1, n)) {
        if (sigma.weight() != n) continue;
        Rational lam(1);
        std::function<void(const PlanarTree&)> walk = [&](const PlanarTree& node) {
          lam *= lambda_of(node.decoration());
          for (const auto& ch : node.children()) walk(ch);
        };
        walk(sigma);
        out.add(phi(psi_bar(sigma)), g * lam);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classical Magnus expansion in midpoint-Taylor form.
//
// With A(t) = sum_i a_i (t - t_half)^i and q_i = a_{i-1} h^i, time is scaled
// so the step is [0, 1] and mu = sigma - 1/2 in [-1/2, 1/2].  Intermediate
// integrands live in the free associative algebra over the q-letters with
// exact polynomial coefficients in mu; the S_n^(j) recursion with Bernoulli
// weights is applied verbatim, words above the weight cap are pruned, and
// the end value mu = 1/2 is projected to the Lyndon basis.

namespace detail {

struct Poly {  // exact polynomial in one variable
  std::vector<Rational> c;  // c[i] * mu^i

  void trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  void add(const Poly& o, const Rational& scale = Rational(1)) {
    if (c.size() < o.c.size()) c.resize(o.c.size());
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i] * scale;
    trim();
  }
  Poly mul(const Poly& o) const {
    Poly r;
    if (is_zero() || o.is_zero()) return r;
    r.c.assign(c.size() + o.c.size() - 1, Rational(0));
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
  }
  Rational eval(const Rational& x) const {
    Rational r(0);
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
  }
  // integral from `lower` to mu
  Poly integrate_from(const Rational& lower) const {
    Poly q;
    q.c.assign(c.size() + 1, Rational(0));
    for (std::size_t i = 0; i < c.size(); ++i)
      q.c[i + 1] = c[i] / Rational(BigInt(i + 1));
    Rational at_lower = q.eval(lower);
    q.c[0] -= at_lower;
    q.trim();
    return q;
  }
  static Poly monomial(std::size_t deg, Rational coeff = Rational(1)) {
    Poly p;
    p.c.assign(deg + 1, Rational(0));
    p.c[deg] = std::move(coeff);
    p.trim();
    return p;
  }
};

using WordPoly = std::map<Word, Poly>;

inline void wp_add(WordPoly& a, const WordPoly& b, const Rational& scale = Rational(1)) {
  for (const auto& [w, p] : b) {
    Poly& slot = a[w];
    slot.add(p, scale);
    if (slot.is_zero()) a.erase(w);
  }
}

inline WordPoly wp_mul(const WordPoly& a, const WordPoly& b, int weight_cap) {
  WordPoly out;
  for (const auto& [u, pu] : a)
    for (const auto& [v, pv] : b) {
      if (word_weight(u) + word_weight(v) > weight_cap) continue;
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      Poly& slot = out[w];
      slot.add(pu.mul(pv));
      if (slot.is_zero()) out.erase(w);
    }
  return out;
}

inline WordPoly wp_comm(const WordPoly& a, const WordPoly& b, int weight_cap) {
  WordPoly out = wp_mul(a, b, weight_cap);
  wp_add(out, wp_mul(b, a, weight_cap), Rational(-1));
  return out;
}

inline WordPoly wp_integrate(const WordPoly& a, const Rational& lower) {
  WordPoly out;
  for (const auto& [w, p] : a) {
    Poly q = p.integrate_from(lower);
    if (!q.is_zero()) out.emplace(w, std::move(q));
  }
  return out;
}

// Components Omega_1..Omega_kmax of the classical Magnus recursion
//   Omega_n = sum_j (B_j / j!) integral S_n^(j),
//   S_n^(1) = [Omega_{n-1}, A],  S_n^(j) = sum_m [Omega_m, S_{n-m}^(j-1)],
// for A(time) = sum_i q_i time^{i-1} (in step-scaled units), integrating
// from `lower` and evaluating at `upper`, reduced to the Lyndon basis.
inline std::vector<LieElement> classical_magnus_components(int kmax, int weight_cap,
                                                           const Rational& lower,
                                                           const Rational& upper) {
  WordPoly abar;
  for (int i = 1; i <= weight_cap; ++i)
    abar.emplace(Word{i}, Poly::monomial(static_cast<std::size_t>(i - 1)));

  std::vector<WordPoly> omega(static_cast<std::size_t>(kmax) + 1);
  omega[1] = wp_integrate(abar, lower);
  // s[n][j], 1 <= j < n
  std::vector<std::vector<WordPoly>> s(static_cast<std::size_t>(kmax) + 1);
  for (int n = 2; n <= kmax; ++n) {
    auto& sn = s[static_cast<std::size_t>(n)];
    sn.assign(static_cast<std::size_t>(n), WordPoly{});
    sn[1] = wp_comm(omega[static_cast<std::size_t>(n - 1)], abar, weight_cap);
    for (int j = 2; j <= n - 1; ++j) {
      WordPoly acc;
      for (int m = 1; m <= n - j; ++m)
        wp_add(acc, wp_comm(omega[static_cast<std::size_t>(m)],
                            s[static_cast<std::size_t>(n - m)][static_cast<std::size_t>(j - 1)],
                            weight_cap));
      sn[static_cast<std::size_t>(j)] = std::move(acc);
    }
    WordPoly on;
    for (int j = 1; j <= n - 1; ++j) {
      Rational w = bernoulli(static_cast<unsigned>(j)) / Rational(factorial(static_cast<unsigned>(j)));
      if (w.is_zero()) continue;
      wp_add(on, wp_integrate(sn[static_cast<std::size_t>(j)], lower), w);
    }
    omega[static_cast<std::size_t>(n)] = std::move(on);
  }

  std::vector<LieElement> out(static_cast<std::size_t>(kmax) + 1);
  for (int n = 1; n <= kmax; ++n) {
    AssocPoly value;
    for (const auto& [w, p] : omega[static_cast<std::size_t>(n)]) ap_add(value, w, p.eval(upper));
    out[static_cast<std::size_t>(n)] = lyndon_project(std::move(value));
  }
  return out;
}

}  // namespace detail

// Omega_k of the classical Magnus expansion in the midpoint-Taylor form,
// truncated at weighted degree `degree_cap`, in the Lyndon basis over the
// q-letters (letter i = q_i = a_{i-1} h^i, weight i).
inline LieElement classical_magnus_midpoint(int k, int degree_cap) {
  if (k < 1) throw std::invalid_argument("classical_magnus_midpoint: k must be >= 1");
  if (degree_cap < 1 || degree_cap > 12)
    throw std::invalid_argument("classical_magnus_midpoint: bad degree cap");
  static std::map<int, std::vector<LieElement>> cache;  // keyed by cap
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(degree_cap);
  if (it == cache.end()) {
    auto comps = detail::classical_magnus_components(degree_cap, degree_cap, Rational(-1, 2),
                                                     Rational(1, 2));
    it = cache.emplace(degree_cap, std::move(comps)).first;
  }
  if (k > degree_cap) return LieElement{};  // every word of length k exceeds the cap
  return it->second[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// Formal h-power series with Lie-element coefficients, carrying the pre-Lie
// product (f > g)(h) = [ integral_0^h f(s)/s ds, g(h) ].

class HSeries {
 public:
  HSeries() = default;
  HSeries(int power, const LieElement& coeff) { add(power, coeff); }

  void add(int power, const LieElement& coeff, const Rational& scale = Rational(1)) {
    if (power < 1) throw std::invalid_argument("HSeries: powers must be >= 1");
    if (coeff.is_zero()) return;
    LieElement& slot = terms_[power];
    slot.add(coeff, scale);
    if (slot.is_zero()) terms_.erase(power);
  }
  void add(const HSeries& o, const Rational& scale = Rational(1)) {
    for (const auto& [p, x] : o.terms_) add(p, x, scale);
  }

  const std::map<int, LieElement>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend bool operator==(const HSeries& a, const HSeries& b) { return a.terms_ == b.terms_; }

 private:
  std::map<int, LieElement> terms_;
};

// q_i as the monomial series a_i h^i.
inline HSeries hseries_monomial(int i) { return HSeries(i, lie_generator(i)); }

// (f > g)(h) = [ integral f/s, g ]: the h^k coefficient of f integrates to
// h^k / k, so the product is sum (1/k) [f_k, g_l] h^{k+l}, truncated.
inline HSeries hseries_prelie(const HSeries& f, const HSeries& g, int max_power) {
  HSeries out;
  for (const auto& [k, x] : f.terms())
    for (const auto& [l, y] : g.terms()) {
      if (k + l > max_power) continue;
      out.add(k + l, bracket(x, y), Rational(BigInt(1), BigInt(k)));
    }
  return out;
}

// Pre-Lie associator combination; identically zero up to the truncation.
inline HSeries hseries_prelie_check(const HSeries& f, const HSeries& g, const HSeries& h,
                                    int max_power) {
  HSeries out;
  out.add(hseries_prelie(hseries_prelie(f, g, max_power), h, max_power));
  out.add(hseries_prelie(f, hseries_prelie(g, h, max_power), max_power), Rational(-1));
  out.add(hseries_prelie(hseries_prelie(g, f, max_power), h, max_power), Rational(-1));
  out.add(hseries_prelie(g, hseries_prelie(f, h, max_power), max_power));
  return out;
}

}  // namespace magnus
