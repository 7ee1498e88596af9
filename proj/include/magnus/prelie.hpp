#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "magnus/exact.hpp"
#include "magnus/trees.hpp"

namespace magnus {

// Finite rational linear combination over an ordered key type.  Zero
// coefficients are never stored, so equality is map equality.
template <class Key>
class LinComb {
 public:
  using Terms = std::map<Key, Rational>;

  LinComb() = default;
  explicit LinComb(const Key& k, Rational c = Rational(1)) { add(k, c); }

  void add(const Key& k, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  void add(const LinComb& o, const Rational& scale = Rational(1)) {
    for (const auto& [k, c] : o.terms_) add(k, c * scale);
  }

  Rational coeff(const Key& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Terms& terms() const { return terms_; }

  friend LinComb operator+(LinComb a, const LinComb& b) { a.add(b); return a; }
  friend LinComb operator-(LinComb a, const LinComb& b) { a.add(b, Rational(-1)); return a; }
  friend LinComb operator*(const Rational& c, const LinComb& x) {
    LinComb r;
    r.add(x, c);
    return r;
  }
  LinComb operator-() const { return Rational(-1) * *this; }

  friend bool operator==(const LinComb& a, const LinComb& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const LinComb& a, const LinComb& b) { return !(a == b); }

 private:
  Terms terms_;
};

// Element of the free pre-Lie algebra on (possibly decorated) non-planar
// rooted trees.
using PreLieElement = LinComb<Tree>;

// Pre-Lie grafting: sum over the vertices of t of attaching s there by a new
// edge.  Coefficients are attachment multiplicities (vertices are counted,
// not isomorphism classes).
inline PreLieElement graft(const Tree& s, const Tree& t) {
  PreLieElement out;
  out.add(t.with_extra_child(s), Rational(1));
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    PreLieElement sub = graft(s, t.children()[i]);
    for (const auto& [u, c] : sub.terms()) out.add(t.with_child_replaced(i, u), c);
  }
  return out;
}

// Bilinear extension of graft.
inline PreLieElement graft_linear(const PreLieElement& x, const PreLieElement& y) {
  PreLieElement out;
  for (const auto& [s, cs] : x.terms())
    for (const auto& [t, ct] : y.terms()) out.add(graft(s, t), cs * ct);
  return out;
}

// Psi-bar: the planar tree's monomial expression in the left Butcher product
// with that product replaced by grafting.  Psi_bar(t1 (lb) t2) =
// graft_linear(Psi_bar(t1), Psi_bar(t2)), Psi_bar(vertex) = vertex.
inline PreLieElement psi_bar(const PlanarTree& t) {
  static std::map<std::string, PreLieElement> cache;
  static std::mutex mtx;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(t.key());
    if (it != cache.end()) return it->second;
  }
  PreLieElement result;
  if (t.children().empty()) {
    result = PreLieElement(Tree(t.decoration()));
  } else {
    // t = c1 (lb) B_+(c2..ck) with the same root decoration.
    const auto& cs = t.children();
    PlanarTree rest(t.decoration(), std::vector<PlanarTree>(cs.begin() + 1, cs.end()));
    result = graft_linear(psi_bar(cs.front()), psi_bar(rest));
  }
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(t.key(), result);
  return result;
}

// alpha(s, t): the coefficient of the non-planar tree s in Psi_bar(t).
inline Rational alpha(const Tree& s, const PlanarTree& t) {
  if (s.degree() != t.degree()) return Rational(0);
  return psi_bar(t).coeff(s);
}

// (x>y)>z - x>(y>z) - (y>x)>z + y>(x>z); identically zero because grafting
// is pre-Lie.
inline PreLieElement prelie_associator_check(const PreLieElement& x, const PreLieElement& y,
                                             const PreLieElement& z) {
  return graft_linear(graft_linear(x, y), z) - graft_linear(x, graft_linear(y, z)) -
         graft_linear(graft_linear(y, x), z) + graft_linear(y, graft_linear(x, z));
}

}  // namespace magnus
