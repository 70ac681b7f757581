#pragma once

// Slow, independent reference computations used only by tests.

#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "blossom/gf.hpp"
#include "blossom/map.hpp"
#include "blossom/tree.hpp"

namespace oracle {

using namespace blossom;

inline mpz_class zz(long long v) { return to_mpz(v); }

// [z^0..n] of B from b_n = (d-1) sum over compositions, i.e. the plain
// recursion b_n = (d-1) [z^{n-1}] (1+B)^{d-1}, one coefficient at a time.
inline std::vector<mpz_class> b_coefficients(int d, int n_max) {
  std::vector<mpz_class> b(n_max + 1, 0);
  for (int n = 1; n <= n_max; ++n) {
    // (1+B)^{d-1} truncated at degree n-1 using the coefficients found so far.
    std::vector<mpz_class> p(n, 0);
    p[0] = 1;
    for (int f = 0; f < d - 1; ++f) {
      std::vector<mpz_class> q(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) q[i + j] += p[i] * (j == 0 ? mpz_class(1) + b[0] : b[j]);
      p = q;
    }
    b[n] = zz(d - 1) * p[n - 1];
  }
  return b;
}

// [z^n] of (1+B)^a from the coefficient list.
inline mpz_class one_plus_b_power(const std::vector<mpz_class>& b, int a, int n) {
  std::vector<mpz_class> p(n + 1, 0);
  p[0] = 1;
  for (int f = 0; f < a; ++f) {
    std::vector<mpz_class> q(n + 1, 0);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) q[i + j] += p[i] * (j == 0 ? mpz_class(1) : b[j]);
    p = q;
  }
  return p[n];
}

// Exact P(B_k(T_n) = ball) by enumerating T^d_n.
inline mpq_class brute_ball_prob(int d, int n, const BlossomTree& ball_tree, int k) {
  const auto trees = enumerate_trees(d, n);
  const auto code = canonical_code(ball_tree).code;
  long long hits = 0;
  for (const auto& t : trees) hits += canonical_code(tree_ball(t, k).ball).code == code;
  mpq_class p(zz(hits), zz(static_cast<long long>(trees.size())));
  p.canonicalize();
  return p;
}

// Every admissible k-ball shape for d: black root with d entries, one of them
// its white child; white vertices have d-1 entries, each a closing stem or a
// black child; black non-roots have d-1 entries with one white child.
inline std::vector<BlossomTree> all_balls(int d, int k) {
  std::vector<BlossomTree> out;
  BlossomTree seed;
  seed.d = d;
  seed.nodes.push_back({Color::black, {}});
  if (k == 0) return {seed};
  struct State {
    BlossomTree t;
    std::vector<int> depth;
    std::size_t next;
  };
  std::vector<State> stack{{seed, {0}, 0}};
  while (!stack.empty()) {
    State s = std::move(stack.back());
    stack.pop_back();
    if (s.next == s.t.nodes.size()) {
      out.push_back(s.t);
      continue;
    }
    const int v = static_cast<int>(s.next);
    if (s.depth[v] == k) {
      ++s.next;
      stack.push_back(std::move(s));
      continue;
    }
    const bool root = v == 0;
    const int len = root ? d : d - 1;
    if (s.t.nodes[v].color == Color::black) {
      for (int c = 0; c < len; ++c) {
        State n = s;
        const auto id = static_cast<VertexId>(n.t.nodes.size());
        n.t.nodes.push_back({Color::white, {}});
        n.depth.push_back(s.depth[v] + 1);
        for (int i = 0; i < len; ++i) n.t.nodes[v].offspring.push_back(i == c ? Entry::make_child(id) : Entry::open());
        ++n.next;
        stack.push_back(std::move(n));
      }
    } else {
      for (unsigned mask = 0; mask < (1u << len); ++mask) {
        State n = s;
        for (int i = 0; i < len; ++i) {
          if (mask & (1u << i)) {
            const auto id = static_cast<VertexId>(n.t.nodes.size());
            n.t.nodes.push_back({Color::black, {}});
            n.depth.push_back(s.depth[v] + 1);
            n.t.nodes[v].offspring.push_back(Entry::make_child(id));
          } else {
            n.t.nodes[v].offspring.push_back(Entry::close());
          }
        }
        ++n.next;
        stack.push_back(std::move(n));
      }
    }
  }
  return out;
}

// Leftmost-first reduction of "close, open" pairs on the cyclic word.
inline std::vector<int> reduce_pairs(const std::vector<Entry::Kind>& w) {
  const int n = static_cast<int>(w.size());
  std::vector<int> partner(n, -1), live(n);
  for (int i = 0; i < n; ++i) live[i] = i;
  while (!live.empty()) {
    const int m = static_cast<int>(live.size());
    bool found = false;
    for (int i = 0; i < m; ++i) {
      const int a = live[i], b = live[(i + 1) % m];
      if (w[a] == Entry::Kind::close && w[b] == Entry::Kind::open) {
        partner[a] = b;
        partner[b] = a;
        std::vector<int> rest;
        for (int x : live)
          if (x != a && x != b) rest.push_back(x);
        live = rest;
        found = true;
        break;
      }
    }
    if (!found) return {};
  }
  return partner;
}

// Rotation-preserving isomorphism sending root corner to root corner, found
// by propagating along half-edges from the root.
inline bool isomorphic_rooted(const PlanarMap& a, const PlanarMap& b) {
  if (a.vertices.size() != b.vertices.size() || a.half_edges.size() != b.half_edges.size()) return false;
  std::vector<HalfEdgeId> f(a.half_edges.size(), -2);
  std::vector<std::pair<HalfEdgeId, HalfEdgeId>> todo;
  auto at = [](const PlanarMap& m, Corner c) { return m.vertices[c.vertex].rot[c.pos]; };
  todo.push_back({at(a, a.root), at(b, b.root)});
  std::vector<VertexId> vmap(a.vertices.size(), -1);
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    if (f[x] != -2) {
      if (f[x] != y) return false;
      continue;
    }
    f[x] = y;
    const auto& hx = a.half_edges[x];
    const auto& hy = b.half_edges[y];
    if (a.vertices[hx.vertex].color != b.vertices[hy.vertex].color) return false;
    if (a.vertices[hx.vertex].rot.size() != b.vertices[hy.vertex].rot.size()) return false;
    if (vmap[hx.vertex] == -1) vmap[hx.vertex] = hy.vertex;
    else if (vmap[hx.vertex] != hy.vertex) return false;
    if ((hx.twin == kFrontier) != (hy.twin == kFrontier)) return false;
    if (hx.twin != kFrontier) todo.push_back({hx.twin, hy.twin});
    const int len = static_cast<int>(a.vertices[hx.vertex].rot.size());
    todo.push_back({a.vertices[hx.vertex].rot[(hx.pos + 1) % len], b.vertices[hy.vertex].rot[(hy.pos + 1) % len]});
  }
  return true;
}

// Probabilities of the total black count of a graft, by iterating the
// offspring generating function G(z) = z (1 - p + p G(z))^{d-1}.
inline std::vector<double> graft_pmf_series(int d, int n_max) {
  const double p = 1.0 / (d - 1);
  std::vector<double> g(n_max + 1, 0);
  for (int round = 0; round <= n_max; ++round) {
    std::vector<double> base(n_max + 1, 0);
    for (int i = 0; i <= n_max; ++i) base[i] = p * g[i];
    base[0] += 1 - p;
    std::vector<double> pw(n_max + 1, 0);
    pw[0] = 1;
    for (int f = 0; f < d - 1; ++f) {
      std::vector<double> q(n_max + 1, 0);
      for (int i = 0; i <= n_max; ++i)
        for (int j = 0; i + j <= n_max; ++j) q[i + j] += pw[i] * base[j];
      pw = q;
    }
    std::vector<double> next(n_max + 1, 0);
    for (int i = 1; i <= n_max; ++i) next[i] = pw[i - 1];
    g = next;
  }
  return g;
}

}  // namespace oracle
