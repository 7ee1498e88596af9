#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace magnus {

// Rooted trees, planar (child order significant) and non-planar (children in
// canonical order).  A vertex is either undecorated or carries a generator
// index i >= 1 standing for a_i of the graded alphabet, |a_i| = i.
//
// Canonical serialization grammar (bit-exact interface):
//   vertex label: "o" undecorated, "a<i>" decorated;
//   tree: label, then "(" + comma-joined children + ")", omitted if childless.
// Non-planar trees serialize with children sorted ascending by their own
// serialization; planar trees serialize in stored order.

namespace detail {
inline std::string vertex_label(int decoration) {
  return decoration == 0 ? std::string("o") : "a" + std::to_string(decoration);
}

template <class T>
std::string tree_key(int decoration, const std::vector<T>& children) {
  std::string s = vertex_label(decoration);
  if (!children.empty()) {
    s += '(';
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (i) s += ',';
      s += children[i].key();
    }
    s += ')';
  }
  return s;
}
}  // namespace detail

class PlanarTree {
 public:
  PlanarTree() { init(); }
  explicit PlanarTree(int decoration, std::vector<PlanarTree> children = {})
      : decoration_(decoration), children_(std::move(children)) {
    if (decoration_ < 0) throw std::invalid_argument("PlanarTree: negative decoration");
    init();
  }

  int decoration() const { return decoration_; }
  const std::vector<PlanarTree>& children() const { return children_; }
  int degree() const { return degree_; }    // vertex count
  int weight() const { return weight_; }    // decorated degree (undecorated vertex counts 1)
  int fertility() const { return static_cast<int>(children_.size()); }
  const std::string& key() const { return key_; }

  friend bool operator==(const PlanarTree& a, const PlanarTree& b) { return a.key_ == b.key_; }
  friend bool operator!=(const PlanarTree& a, const PlanarTree& b) { return a.key_ != b.key_; }
  friend bool operator<(const PlanarTree& a, const PlanarTree& b) { return a.key_ < b.key_; }

 private:
  void init() {
    degree_ = 1;
    weight_ = decoration_ == 0 ? 1 : decoration_;
    for (const auto& c : children_) {
      degree_ += c.degree_;
      weight_ += c.weight_;
    }
    key_ = detail::tree_key(decoration_, children_);
  }

  int decoration_ = 0;
  std::vector<PlanarTree> children_;
  int degree_ = 1;
  int weight_ = 1;
  std::string key_;
};

class Tree {
 public:
  Tree() { init(); }
  explicit Tree(int decoration, std::vector<Tree> children = {})
      : decoration_(decoration), children_(std::move(children)) {
    if (decoration_ < 0) throw std::invalid_argument("Tree: negative decoration");
    std::sort(children_.begin(), children_.end());
    init();
  }

  int decoration() const { return decoration_; }
  const std::vector<Tree>& children() const { return children_; }
  int degree() const { return degree_; }
  int weight() const { return weight_; }
  int fertility() const { return static_cast<int>(children_.size()); }
  const std::string& key() const { return key_; }

  Tree with_extra_child(const Tree& s) const {
    auto cs = children_;
    cs.push_back(s);
    return Tree(decoration_, std::move(cs));
  }
  Tree with_child_replaced(std::size_t i, const Tree& repl) const {
    auto cs = children_;
    cs.at(i) = repl;
    return Tree(decoration_, std::move(cs));
  }

  friend bool operator==(const Tree& a, const Tree& b) { return a.key_ == b.key_; }
  friend bool operator!=(const Tree& a, const Tree& b) { return a.key_ != b.key_; }
  friend bool operator<(const Tree& a, const Tree& b) { return a.key_ < b.key_; }

 private:
  void init() {
    degree_ = 1;
    weight_ = decoration_ == 0 ? 1 : decoration_;
    for (const auto& c : children_) {
      degree_ += c.degree_;
      weight_ += c.weight_;
    }
    key_ = detail::tree_key(decoration_, children_);
  }

  int decoration_ = 0;
  std::vector<Tree> children_;
  int degree_ = 1;
  int weight_ = 1;
  std::string key_;
};

// B_+: joins an ordered sequence of trees under a new root.
inline PlanarTree b_plus(std::vector<PlanarTree> children, int decoration = 0) {
  return PlanarTree(decoration, std::move(children));
}

// Left Butcher product: grafts t1 onto the root of t2 as the new leftmost
// branch, t1 (lb) B_+(s1..sk) = B_+(t1 s1..sk).
inline PlanarTree left_butcher(const PlanarTree& t1, const PlanarTree& t2) {
  std::vector<PlanarTree> cs;
  cs.reserve(t2.children().size() + 1);
  cs.push_back(t1);
  for (const auto& c : t2.children()) cs.push_back(c);
  return PlanarTree(t2.decoration(), std::move(cs));
}

inline Tree canonicalize(const PlanarTree& t) {
  std::vector<Tree> cs;
  cs.reserve(t.children().size());
  for (const auto& c : t.children()) cs.push_back(canonicalize(c));
  return Tree(t.decoration(), std::move(cs));
}

// Embedding of a canonical tree back into the planar family (children kept
// in canonical order).
inline PlanarTree to_planar(const Tree& t) {
  std::vector<PlanarTree> cs;
  cs.reserve(t.children().size());
  for (const auto& c : t.children()) cs.push_back(to_planar(c));
  return PlanarTree(t.decoration(), std::move(cs));
}

namespace detail {

// All ordered sequences of undecorated planar trees with the given total
// vertex count, children drawn from `atoms` (atoms[d] = trees of degree d).
inline void sequences_of(int total, const std::map<int, std::vector<PlanarTree>>& atoms,
                         std::vector<PlanarTree>& prefix,
                         std::vector<std::vector<PlanarTree>>& out) {
  if (total == 0) {
    out.push_back(prefix);
    return;
  }
  for (int d = 1; d <= total; ++d) {
    auto it = atoms.find(d);
    if (it == atoms.end()) continue;
    for (const auto& t : it->second) {
      prefix.push_back(t);
      sequences_of(total - d, atoms, prefix, out);
      prefix.pop_back();
    }
  }
}

}  // namespace detail

// All undecorated planar rooted trees with n vertices (Catalan(n-1) of them).
inline const std::vector<PlanarTree>& enumerate_planar(int n) {
  if (n < 1) throw std::invalid_argument("enumerate_planar: order must be >= 1");
  static std::map<int, std::vector<PlanarTree>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  for (int m = 1; m <= n; ++m) {
    if (cache.count(m)) continue;
    std::vector<std::vector<PlanarTree>> seqs;
    std::vector<PlanarTree> prefix;
    detail::sequences_of(m - 1, cache, prefix, seqs);
    std::vector<PlanarTree> trees;
    trees.reserve(seqs.size());
    for (auto& s : seqs) trees.push_back(b_plus(std::move(s)));
    std::sort(trees.begin(), trees.end());
    cache.emplace(m, std::move(trees));
  }
  return cache.at(n);
}

// The fertility-restricted family T^{e1}_pl: planar rooted trees in which no
// vertex has odd fertility > 1 (allowed fertilities: 0, 1, 2, 4, 6, ...).
// Sizes follow sequence A049130: 1, 1, 2, 4, 10, 26, 73, 211, 630, ...
inline const std::vector<PlanarTree>& enumerate_e1(int n) {
  if (n < 1) throw std::invalid_argument("enumerate_e1: order must be >= 1");
  static std::map<int, std::vector<PlanarTree>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  for (int m = 1; m <= n; ++m) {
    if (cache.count(m)) continue;
    std::vector<std::vector<PlanarTree>> seqs;
    std::vector<PlanarTree> prefix;
    detail::sequences_of(m - 1, cache, prefix, seqs);
    std::vector<PlanarTree> trees;
    for (auto& s : seqs) {
      std::size_t k = s.size();
      if (k == 1 || k % 2 == 0) trees.push_back(b_plus(std::move(s)));
    }
    std::sort(trees.begin(), trees.end());
    cache.emplace(m, std::move(trees));
  }
  return cache.at(n);
}

inline bool is_e1(const PlanarTree& t) {
  int k = t.fertility();
  if (k > 1 && k % 2 == 1) return false;
  for (const auto& c : t.children())
    if (!is_e1(c)) return false;
  return true;
}

// All full decorations of `t` by generators a_1..a_{e_max} whose total
// decorated degree is <= degree_cap.
inline std::vector<PlanarTree> decorate_all(const PlanarTree& t, int e_max, int degree_cap) {
  // Preorder list of vertices; a decoration is one label per vertex.
  struct Walk {
    static void rebuild(const PlanarTree& node, const std::vector<int>& labels, std::size_t& pos,
                        PlanarTree& out) {
      int deco = labels[pos++];
      std::vector<PlanarTree> cs;
      cs.reserve(node.children().size());
      for (const auto& c : node.children()) {
        PlanarTree sub;
        rebuild(c, labels, pos, sub);
        cs.push_back(sub);
      }
      out = PlanarTree(deco, std::move(cs));
    }
  };
  int n = t.degree();
  std::vector<int> labels(static_cast<std::size_t>(n), 1);
  std::vector<PlanarTree> out;
  // Enumerate label vectors with sum <= degree_cap; remaining vertices need
  // at least 1 each.
  std::function<void(int, int)> rec = [&](int idx, int used) {
    if (idx == n) {
      std::size_t pos = 0;
      PlanarTree decorated;
      Walk::rebuild(t, labels, pos, decorated);
      out.push_back(decorated);
      return;
    }
    int remaining_min = n - idx - 1;
    for (int v = 1; v <= e_max && used + v + remaining_min <= degree_cap; ++v) {
      labels[static_cast<std::size_t>(idx)] = v;
      rec(idx + 1, used + v);
    }
  };
  rec(0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

// Parses the canonical grammar back into a planar tree.
inline PlanarTree parse_planar(const std::string& s) {
  std::size_t pos = 0;
  std::function<PlanarTree()> rec = [&]() -> PlanarTree {
    int deco = 0;
    if (pos < s.size() && s[pos] == 'o') {
      ++pos;
    } else if (pos < s.size() && s[pos] == 'a') {
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (start == pos) throw std::invalid_argument("parse_planar: bad label in " + s);
      deco = std::stoi(s.substr(start, pos - start));
    } else {
      throw std::invalid_argument("parse_planar: bad label in " + s);
    }
    std::vector<PlanarTree> cs;
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      while (true) {
        cs.push_back(rec());
        if (pos >= s.size()) throw std::invalid_argument("parse_planar: unterminated " + s);
        if (s[pos] == ',') {
          ++pos;
          continue;
        }
        if (s[pos] == ')') {
          ++pos;
          break;
        }
        throw std::invalid_argument("parse_planar: unexpected '" + std::string(1, s[pos]) + "'");
      }
    }
    return PlanarTree(deco, std::move(cs));
  };
  PlanarTree t = rec();
  if (pos != s.size()) throw std::invalid_argument("parse_planar: trailing input in " + s);
  return t;
}

inline Tree parse_tree(const std::string& s) { return canonicalize(parse_planar(s)); }

}  // namespace magnus
