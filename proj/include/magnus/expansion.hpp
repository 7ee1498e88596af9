#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "magnus/exact.hpp"
#include "magnus/prelie.hpp"
#include "magnus/trees.hpp"

namespace magnus {

inline constexpr int kMaxExpansionOrder = 9;

inline void check_order(int n, int cap = kMaxExpansionOrder) {
  if (n < 1 || n > cap) throw std::invalid_argument("invalid expansion order " + std::to_string(n));
}

// gamma(tree) = product over vertices of B_{f(v)} / f(v)!, the tree
// coefficient of the pre-Lie Magnus expansion.  Vanishes exactly on trees
// with a vertex of odd fertility > 1 (B_{2n+1} = 0 for n > 0); decorations
// are ignored.
inline Rational gamma(const PlanarTree& t) {
  Rational r = bernoulli(static_cast<unsigned>(t.fertility())) /
               Rational(factorial(static_cast<unsigned>(t.fertility())));
  for (const auto& c : t.children()) {
    if (r.is_zero()) return r;
    r *= gamma(c);
  }
  return r;
}

// Tree functional F[tau](x) = F[t1](x) > (F[t2](x) > (... > (F[tk](x) > x))),
// F[vertex](x) = x, with > the grafting product.
inline PreLieElement tree_functional(const PlanarTree& t, const PreLieElement& arg) {
  if (t.children().empty()) return arg;
  PreLieElement acc = arg;
  for (auto it = t.children().rbegin(); it != t.children().rend(); ++it)
    acc = graft_linear(tree_functional(*it, arg), acc);
  return acc;
}

struct MagnusTermTable {
  int order = 0;
  std::map<PlanarTree, Rational> planar_terms;  // supported on enumerate_e1(order)
  PreLieElement nonplanar;                      // sum of gamma(tau) * Psi_bar(tau)
};

// The tree-indexed pre-Lie Magnus expansion: Omega-dot restricted to degree n
// is sum over tau in T^{e1}_pl of degree n of gamma(tau) F[tau](x), and
// F[tau](vertex) = Psi_bar(tau).
inline MagnusTermTable magnus_theorem4(int n) {
  check_order(n);
  MagnusTermTable table;
  table.order = n;
  for (const auto& t : enumerate_e1(n)) {
    Rational g = gamma(t);
    if (g.is_zero()) continue;
    table.planar_terms.emplace(t, g);
    table.nonplanar.add(psi_bar(t), g);
  }
  return table;
}

// The same element by the direct Bernoulli recursion in the free pre-Lie
// algebra with one generator:
//   Omega-dot_1 = x,
//   Omega-dot_n = sum_{j=1}^{n-1} B_j/j! sum_{k_1+..+k_j = n-1}
//                 Omega-dot_{k_1} > (... > (Omega-dot_{k_j} > x)).
inline PreLieElement magnus_recursion(int n) {
  check_order(n);
  std::vector<PreLieElement> omega(static_cast<std::size_t>(n) + 1);
  const PreLieElement x(Tree{});
  omega[1] = x;
  for (int m = 2; m <= n; ++m) {
    PreLieElement acc;
    for (int j = 1; j <= m - 1; ++j) {
      Rational w = bernoulli(static_cast<unsigned>(j)) / Rational(factorial(static_cast<unsigned>(j)));
      if (w.is_zero()) continue;
      // compositions of m-1 into j positive parts
      std::vector<int> parts(static_cast<std::size_t>(j), 0);
      std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == j) {
          if (left != 0) return;
          PreLieElement cur = x;
          for (int i = j - 1; i >= 0; --i)
            cur = graft_linear(omega[static_cast<std::size_t>(parts[static_cast<std::size_t>(i)])], cur);
          acc.add(cur, w);
          return;
        }
        int remaining_min = j - idx - 1;
        for (int k = 1; k + remaining_min <= left; ++k) {
          parts[static_cast<std::size_t>(idx)] = k;
          rec(idx + 1, left - k);
        }
      };
      rec(0, m - 1);
    }
    omega[static_cast<std::size_t>(m)] = acc;
  }
  return omega[static_cast<std::size_t>(n)];
}

struct TermCounts {
  std::size_t e1_count = 0;
  std::size_t nonplanar_support = 0;
  std::optional<std::size_t> reduced_count;  // absent when the removal table is exhausted
};

// Term bookkeeping.  reduced_count is e1_count minus the known removable-term
// count {4:2, 5:3, 6:11, 7:23} (0 below order 4); above order 7 no removal
// count is known and the field is left empty.
inline TermCounts term_counts(int n) {
  check_order(n);
  TermCounts tc;
  tc.e1_count = enumerate_e1(n).size();
  tc.nonplanar_support = magnus_theorem4(n).nonplanar.size();
  static const std::map<int, std::size_t> removable{{4, 2}, {5, 3}, {6, 11}, {7, 23}};
  if (n <= 3) {
    tc.reduced_count = tc.e1_count;
  } else if (auto it = removable.find(n); it != removable.end()) {
    tc.reduced_count = tc.e1_count - it->second;
  }
  return tc;
}

}  // namespace magnus
