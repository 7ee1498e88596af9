#pragma once

#include <algorithm>
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

// A (non-planar) forest: commutative product of trees, kept in canonical
// order.  The empty forest is the unit of the Grossman-Larson product.
class Forest {
 public:
  Forest() { init(); }
  explicit Forest(std::vector<Tree> trees) : trees_(std::move(trees)) {
    std::sort(trees_.begin(), trees_.end());
    init();
  }
  explicit Forest(const Tree& t) : trees_{t} { init(); }

  static Forest dots(int n) {
    return Forest(std::vector<Tree>(static_cast<std::size_t>(n), Tree{}));
  }

  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t weight() const { return trees_.size(); }  // number of trees
  int degree() const { return degree_; }                // total vertex count
  bool empty() const { return trees_.empty(); }
  const std::string& key() const { return key_; }

  Forest with_tree(const Tree& t) const {
    auto ts = trees_;
    ts.push_back(t);
    return Forest(std::move(ts));
  }
  Forest without(std::size_t i) const {
    auto ts = trees_;
    ts.erase(ts.begin() + static_cast<std::ptrdiff_t>(i));
    return Forest(std::move(ts));
  }

  friend bool operator==(const Forest& a, const Forest& b) { return a.key_ == b.key_; }
  friend bool operator!=(const Forest& a, const Forest& b) { return a.key_ != b.key_; }
  friend bool operator<(const Forest& a, const Forest& b) { return a.key_ < b.key_; }

 private:
  void init() {
    degree_ = 0;
    for (const auto& t : trees_) degree_ += t.degree();
    if (trees_.empty()) {
      key_ = "1";
    } else {
      key_.clear();
      for (std::size_t i = 0; i < trees_.size(); ++i) {
        if (i) key_ += '|';
        key_ += trees_[i].key();
      }
    }
  }

  std::vector<Tree> trees_;
  int degree_ = 0;
  std::string key_;
};

using GLElement = LinComb<Forest>;

namespace detail {

// Attaches bundles of extra children at preorder-indexed vertices.
inline Tree attach_bundles(const Tree& t, const std::vector<std::vector<Tree>>& by_vertex,
                           std::size_t& pos) {
  const auto& extras = by_vertex[pos++];
  std::vector<Tree> cs;
  cs.reserve(t.children().size() + extras.size());
  for (const auto& c : t.children()) cs.push_back(attach_bundles(c, by_vertex, pos));
  for (const auto& e : extras) cs.push_back(e);
  return Tree(t.decoration(), std::move(cs));
}

}  // namespace detail

// Action of a forest {s_1..s_p} on a tree: the sum over all ways of
// attaching every s_i to a vertex of t simultaneously (the s_i never attach
// to one another).  This is the unique extension of grafting that makes
// (F * F') -> t  =  F' -> (F -> t); the two-tree case reads
// (t1 t2) -> t = t2 -> (t1 -> t) - (t2 -> t1) -> t.
inline PreLieElement gl_action(const Forest& f, const Tree& t) {
  static std::map<std::pair<std::string, std::string>, PreLieElement> cache;
  static std::mutex mtx;
  if (f.empty()) return PreLieElement(t);
  const auto cache_key = std::make_pair(f.key(), t.key());
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(cache_key);
    if (it != cache.end()) return it->second;
  }
  PreLieElement out;
  const std::size_t p = f.weight();
  const std::size_t nv = static_cast<std::size_t>(t.degree());
  std::vector<std::size_t> target(p, 0);
  while (true) {
    std::vector<std::vector<Tree>> by_vertex(nv);
    for (std::size_t i = 0; i < p; ++i) by_vertex[target[i]].push_back(f.trees()[i]);
    std::size_t pos = 0;
    out.add(detail::attach_bundles(t, by_vertex, pos), Rational(1));
    std::size_t i = 0;
    while (i < p && ++target[i] == nv) target[i++] = 0;
    if (i == p) break;
  }
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(cache_key, out);
  return out;
}

// Same action through the peeling identity
//   (s . R) -> t = R -> (s -> t) - sum_{0 != S subset R} ((R\S).(S -> s)) -> t,
// recursing on forest weight.  Kept as an independent route so the
// well-definedness of the reconstruction (any peel position, and agreement
// with gl_action) can be checked exactly.
inline PreLieElement gl_action_peeling(const Forest& f, const Tree& t, std::size_t peel_index = 0) {
  if (f.empty()) return PreLieElement(t);
  if (peel_index >= f.weight()) throw std::invalid_argument("gl_action_peeling: bad peel index");
  const Tree s = f.trees()[peel_index];
  const Forest rest = f.without(peel_index);
  const std::size_t r = rest.weight();

  auto act_rest = [&](const Forest& g, const PreLieElement& elem) {
    PreLieElement acc;
    for (const auto& [u, c] : elem.terms()) acc.add(gl_action_peeling(g, u), c);
    return acc;
  };

  PreLieElement out = act_rest(rest, graft(s, t));
  for (std::size_t mask = 1; mask < (std::size_t{1} << r); ++mask) {
    std::vector<Tree> sel, unsel;
    for (std::size_t i = 0; i < r; ++i)
      (mask >> i & 1 ? sel : unsel).push_back(rest.trees()[i]);
    PreLieElement onto_s = gl_action_peeling(Forest(std::move(sel)), s);
    for (const auto& [u, c] : onto_s.terms()) {
      Forest g = Forest(unsel).with_tree(u);
      out.add(gl_action_peeling(g, t), -c);
    }
  }
  return out;
}

// Grossman-Larson product:
//   (t_1..t_n) * (u_1..u_m) = sum over f: {1..m} -> {0..n} of
//   F_0 (F_1 -> t_1) ... (F_n -> t_n),  F_i = product of u_j with f(j) = i.
// Degree-additive; terms above degree_cap are dropped (pass a negative cap
// for the exact product).
inline GLElement gl_product(const GLElement& x, const GLElement& y, int degree_cap = -1) {
  GLElement out;
  for (const auto& [fx, cx] : x.terms()) {
    for (const auto& [fy, cy] : y.terms()) {
      if (degree_cap >= 0 && fx.degree() + fy.degree() > degree_cap) continue;
      const std::size_t n = fx.weight();
      const std::size_t m = fy.weight();
      const Rational c = cx * cy;
      std::vector<std::size_t> assign(m, 0);
      while (true) {
        std::vector<Tree> f0;
        std::vector<std::vector<Tree>> groups(n);
        for (std::size_t j = 0; j < m; ++j) {
          if (assign[j] == 0)
            f0.push_back(fy.trees()[j]);
          else
            groups[assign[j] - 1].push_back(fy.trees()[j]);
        }
        GLElement partial(Forest(std::move(f0)), c);
        for (std::size_t i = 0; i < n && !partial.is_zero(); ++i) {
          PreLieElement acted = gl_action(Forest(groups[i]), fx.trees()[i]);
          GLElement next;
          for (const auto& [forest, cf] : partial.terms())
            for (const auto& [tree, ct] : acted.terms()) next.add(forest.with_tree(tree), cf * ct);
          partial = std::move(next);
        }
        out.add(partial);
        std::size_t j = 0;
        while (j < m && ++assign[j] == n + 1) assign[j++] = 0;
        if (j == m) break;
      }
    }
  }
  return out;
}

// Degree-n component of log*(exp(vertex)) -> vertex: the Grossman-Larson
// closed form of the pre-Lie Magnus element,
//   sum_{k > 0} ((-1)^{k-1} / k) (exp(vertex) - 1)^{* (k-1)} -> vertex.
// Only forests of degree <= n-1 contribute, so each component is a finite
// exact sum.
inline PreLieElement log_star_component(int n) {
  check_order(n);
  const int cap = n - 1;
  GLElement expm1;  // exp(vertex) - 1, truncated: forests of k single
                    // vertices with coefficient 1/k!
  for (int k = 1; k <= cap; ++k)
    expm1.add(Forest::dots(k), Rational(BigInt(1), factorial(static_cast<unsigned>(k))));
  GLElement power(Forest{}, Rational(1));  // (exp(vertex)-1)^{* (k-1)}
  PreLieElement total;
  const Tree dot{};
  for (int k = 1; k <= n; ++k) {
    if (k > 1) power = gl_product(power, expm1, cap);
    Rational w = Rational(k % 2 == 1 ? 1 : -1) / Rational(k);
    for (const auto& [f, c] : power.terms()) {
      if (f.degree() != n - 1) continue;
      total.add(gl_action(f, dot), c * w);
    }
  }
  return total;
}

}  // namespace magnus
