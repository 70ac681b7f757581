#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <set>

#include "blossom/closure.hpp"
#include "blossom/experiments.hpp"
#include "blossom/gf.hpp"
#include "blossom/sampler.hpp"
#include "oracles.hpp"

using namespace blossom;

namespace {

using K = Entry::Kind;

std::vector<K> word_of(const BlossomTree& t) {
  std::vector<K> w;
  for (const auto& s : contour_stems(t)) w.push_back(s.kind);
  return w;
}

std::vector<K> random_balanced_word(int pairs, Rng& rng) {
  std::vector<K> w(2 * pairs, K::open);
  std::fill(w.begin(), w.begin() + pairs, K::close);
  std::shuffle(w.begin(), w.end(), rng);
  return w;
}

// Interior vertices of a ball have every half-edge matched, every edge joins
// opposite colors and distances match the recorded ones.
void check_ball(const MapBall& b, int d) {
  const auto& m = b.ball;
  REQUIRE(b.distance.size() == m.vertices.size());
  CHECK(b.distance[m.root.vertex] == 0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    CHECK(static_cast<int>(m.vertices[v].rot.size()) == d);
    CHECK(b.distance[v] <= b.R);
    for (HalfEdgeId h : m.vertices[v].rot) {
      const auto& he = m.half_edges[h];
      if (he.twin == kFrontier) {
        CHECK(b.distance[v] == b.R);
        continue;
      }
      const VertexId u = m.half_edges[he.twin].vertex;
      CHECK(m.half_edges[he.twin].twin == h);
      CHECK(m.vertices[u].color != m.vertices[v].color);
      CHECK(std::abs(b.distance[u] - b.distance[v]) <= 1);
    }
  }
}

double homogeneity_p(const std::map<std::string, std::array<long long, 2>>& table) {
  long long n0 = 0, n1 = 0;
  for (const auto& [k, c] : table) n0 += c[0], n1 += c[1];
  double stat = 0;
  int cells = 0;
  const double n = static_cast<double>(n0 + n1);
  long long pool0 = 0, pool1 = 0;
  auto add = [&](long long a, long long b) {
    const double row = static_cast<double>(a + b);
    const double e0 = row * n0 / n, e1 = row * n1 / n;
    stat += (a - e0) * (a - e0) / e0 + (b - e1) * (b - e1) / e1;
    ++cells;
  };
  for (const auto& [k, c] : table) {
    if (c[0] + c[1] < 20) {
      pool0 += c[0];
      pool1 += c[1];
      continue;
    }
    add(c[0], c[1]);
  }
  if (pool0 + pool1 > 0) add(pool0, pool1);
  if (cells < 2) return 1;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(cells - 1), stat));
}

}  // namespace

TEST_CASE("matching of a short word") {
  std::vector<K> w{K::close, K::close, K::open, K::open};
  auto p = cyclic_matching(w);
  CHECK(p == std::vector<int>{3, 2, 1, 0});
  Rng rng(1);
  CHECK(random_order_matching(w, rng) == p);
  CHECK(oracle::reduce_pairs(w) == p);
  std::vector<K> rotated{K::open, K::close, K::close, K::open};
  CHECK(cyclic_matching(rotated) == std::vector<int>{1, 0, 3, 2});
}

TEST_CASE("matching agrees with pair reduction") {
  Rng rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const int pairs = 1 + trial % 12;
    auto w = random_balanced_word(pairs, rng);
    auto p = cyclic_matching(w);
    CHECK(p == oracle::reduce_pairs(w));
    CHECK(p == random_order_matching(w, rng));
    for (int i = 0; i < 2 * pairs; ++i) {
      CHECK(p[p[i]] == i);
      CHECK(w[i] != w[p[i]]);
    }
  }
  CHECK_THROWS(cyclic_matching({K::close, K::close, K::open}));
}

TEST_CASE("finite closure of the single tree with one black") {
  auto trees = enumerate_trees(3, 1);
  REQUIRE(trees.size() == 3);
  auto m = close_finite(trees[0]);
  auto r = validate_map(m, 3);
  CHECK(r.ok());
  CHECK(r.V == 2);
  CHECK(r.E == 3);
  CHECK(r.F == 3);
  CHECK(m.marked_face.has_value());
  CHECK(oracle::isomorphic_rooted(forget_marked_face(m), parallel_edge_map(3)));
}

TEST_CASE("finite closures are valid and injective") {
  for (auto [d, nmax] : {std::pair{3, 5}, std::pair{4, 3}, std::pair{5, 2}}) {
    for (int n = 1; n <= nmax; ++n) {
      std::set<std::string> codes;
      auto trees = enumerate_trees(d, n);
      for (const auto& t : trees) {
        auto m = close_finite(t);
        auto r = validate_map(m, d);
        CHECK(r.ok());
        CHECK(r.V == 2 * n);
        CHECK(r.F == 2 + (d - 2) * n);
        codes.insert(canonical_code(m, true).code);
      }
      CHECK(codes.size() == trees.size());
    }
  }
}

TEST_CASE("finite closure rejects bad charge") {
  BlossomTree t;
  t.d = 3;
  t.nodes.push_back({Color::black, {Entry::open(), Entry::open(), Entry::open()}});
  CHECK_THROWS_AS(close_finite(t), DomainError);
}

TEST_CASE("periodic contour matches the finite closure") {
  for (auto [d, nmax] : {std::pair{3, 4}, std::pair{4, 3}}) {
    for (int n = 1; n <= nmax; ++n) {
      for (const auto& t : enumerate_trees(d, n)) {
        auto w = word_of(t);
        auto p = cyclic_matching(w);
        auto cp = ContourProcess::from_finite_tree(t);
        CHECK(cp.kind() == ContourProcess::Kind::periodic);
        const long long N = cp.period();
        REQUIRE(N == static_cast<long long>(w.size()));
        for (long long k = -N; k < 2 * N; ++k) {
          auto r = match_stems(cp, k);
          REQUIRE(r.kind == MatchResult::Kind::index);
          const long long base = ((k % N) + N) % N;
          CHECK(((r.index % N) + N) % N == p[base]);
          auto back = match_stems(cp, r.index);
          REQUIRE(back.kind == MatchResult::Kind::index);
          CHECK(back.index == k);
        }
      }
    }
  }
}

TEST_CASE("linear words match to infinity") {
  auto cp = ContourProcess::from_word({K::open, K::close, K::open});
  CHECK(cp.walk(0) == 0);
  CHECK(cp.walk(3) == 1);
  auto a = match_stems(cp, 0);
  auto b = match_stems(cp, 1);
  auto c = match_stems(cp, 2);
  CHECK(a.kind != MatchResult::Kind::index);
  CHECK(b.kind == MatchResult::Kind::index);
  CHECK(b.index == 2);
  CHECK(c.index == 1);
  auto cl = match_stems(ContourProcess::from_word({K::close}), 0);
  CHECK(cl.kind != MatchResult::Kind::index);
  CHECK(cl.kind != a.kind);
}

TEST_CASE("stability windows") {
  auto t = enumerate_trees(3, 3)[2];
  auto cp = ContourProcess::from_finite_tree(t);
  auto w = stability_window(cp, 0, 0);
  REQUIRE(w.has_value());
  CHECK(w->K_minus <= 0);
  CHECK(w->K_plus >= 0);
  for (std::uint64_t s = 0; s < 40; ++s) {
    SpineTree st(3, s);
    auto grow = ContourProcess::from_spine(st);
    grow.realize_levels(6);
    auto small = stability_window(grow, 0, 0);
    auto wide = stability_window(grow, -2, 2);
    if (!small || !wide) continue;
    CHECK(small->K_minus <= 0);
    CHECK(small->K_plus >= 0);
    CHECK(wide->K_minus <= small->K_minus);
    CHECK(wide->K_plus >= small->K_plus);
    for (long long k = small->K_minus; k <= small->K_plus; ++k) {
      auto r = match_stems(grow, k);
      if (r.kind != MatchResult::Kind::index) continue;
      CHECK(r.index >= small->K_minus);
      CHECK(r.index <= small->K_plus);
    }
    grow.realize_levels(12);
    auto again = stability_window(grow, 0, 0);
    REQUIRE(again.has_value());
    CHECK(again->K_minus == small->K_minus);
    CHECK(again->K_plus == small->K_plus);
  }
}

TEST_CASE("limit balls") {
  auto b0 = close_ball(3, 5, 0);
  CHECK(b0.ball.vertices.size() == 1);
  for (HalfEdgeId h : b0.ball.vertices[0].rot) CHECK(b0.ball.half_edges[h].twin == kFrontier);
  for (int d : {3, 4}) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto b = close_ball(d, s, 3);
      check_ball(b, d);
      CloseBallOptions big;
      big.initial_radius = 40;
      auto again = close_ball(d, s, 3, big);
      CHECK(canonical_code(b.ball).code == canonical_code(again.ball).code);
      auto inner = map_ball(b.ball, 2);
      REQUIRE(inner.has_value());
      CHECK(canonical_code(inner->ball).code == canonical_code(close_ball(d, s, 2).ball).code);
    }
  }
}

TEST_CASE("windowed closure agrees with lazy closure") {
  int compared = 0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    SpineTree a(3, s), b(3, s);
    auto w = close_ball_windowed(a, 2, 8);
    if (!w) continue;
    ++compared;
    CHECK(canonical_code(w->ball).code == canonical_code(close_ball(b, 2).ball).code);
  }
  CHECK(compared >= 30);
}

TEST_CASE("walk identity") {
  for (auto mode : {GraftMode::lazy, GraftMode::sized}) {
    for (std::uint64_t s = 0; s < 200; ++s) {
      SpineTree t(3, s, mode);
      auto ws = spine_walk_stats(t, 12);
      CHECK(ws.identity_holds());
      for (std::size_t k = 1; k < ws.Y.size(); ++k) CHECK(std::abs(ws.Y[k]) <= 1);
      for (long long x : ws.X) CHECK(x >= 0);
    }
  }
}

TEST_CASE("root ball of the limit closure against large finite closures") {
  const int n = 400;
  const long long samples = 4000;
  std::map<std::string, std::array<long long, 2>> table;
  Rng rng(2024);
  for (long long i = 0; i < samples; ++i) {
    auto fb = map_ball(close_finite(sample_tree_cycle(3, n, rng)), 1);
    REQUIRE(fb.has_value());
    ++table[canonical_code(fb->ball).code][0];
    ++table[canonical_code(close_ball(3, 10'000 + i, 1).ball).code][1];
  }
  CHECK(table.size() >= 2);
  CHECK(homogeneity_p(table) > 0.001);
}
