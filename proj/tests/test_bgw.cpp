#include <doctest.h>

#include <map>

#include "blossom/bgw.hpp"
#include "blossom/gf.hpp"
#include "blossom/stats.hpp"
#include "oracles.hpp"

using namespace blossom;

namespace {

int count_type(const OffspringWord& w, TypeTag t) { return static_cast<int>(std::count(w.begin(), w.end(), t)); }

}  // namespace

TEST_CASE("offspring laws") {
  for (int d = 3; d <= 8; ++d)
    for (auto type : {TypeTag::root, TypeTag::black, TypeTag::white, TypeTag::stem}) {
      mpq_class total = 0;
      for (const auto& wm : offspring_law(d, type)) total += wm.mass;
      CHECK(total == 1);
      mpq_class biased = 0;
      for (const auto& wm : size_biased_law(d, type)) biased += wm.mass;
      CHECK(biased == 1);
    }
  auto white = offspring_law(3, TypeTag::white);
  CHECK(white.size() == 4);
  for (const auto& wm : white)
    if (count_type(wm.word, TypeTag::black) == 0) CHECK(wm.mass == mpq_class(1, 4));
  auto root = offspring_law(3, TypeTag::root);
  CHECK(root.size() == 3);
  for (const auto& wm : root) {
    CHECK(wm.mass == mpq_class(1, 3));
    CHECK(count_type(wm.word, TypeTag::white) == 1);
    CHECK(count_type(wm.word, TypeTag::stem) == 2);
  }
  for (const auto& wm : size_biased_law(3, TypeTag::white)) {
    const int k = count_type(wm.word, TypeTag::black);
    CHECK(wm.mass == (k == 0 ? mpq_class(0) : mpq_class(1, 4) * k));
  }
  CHECK(offspring_law(3, TypeTag::stem).front().word.empty());
}

TEST_CASE("criticality") {
  for (int d = 3; d <= 8; ++d) {
    mpq_class mean = 0;
    for (const auto& wm : offspring_law(d, TypeTag::white)) mean += wm.mass * count_type(wm.word, TypeTag::black);
    CHECK(mean == 1);
  }
}

TEST_CASE("mean matrix") {
  for (int d = 3; d <= 8; ++d) {
    auto mm = mean_matrix(d);
    auto cf = mean_matrix_closed_form(d);
    CHECK(mm.eigen_check());
    CHECK(cf.eigen_check());
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) CHECK(mm.m[i][j] == cf.m[i][j]);
      CHECK(mm.b[i] == (i == 3 ? 0 : d - 1));
    }
    const int rows[4] = {d, d - 1, d - 1, 0};
    for (int i = 0; i < 4; ++i) {
      mpq_class s = 0;
      for (int j = 0; j < 4; ++j) s += mm.m[i][j];
      CHECK(s == rows[i]);
    }
  }
}

TEST_CASE("graft size law") {
  for (int d = 3; d <= 5; ++d) {
    auto series = oracle::graft_pmf_series(d, 40);
    for (int n = 1; n <= 40; ++n) CHECK(graft_blacks_pmf(d, n) == doctest::Approx(series[n]).epsilon(1e-9));
  }
  // Tail ~ c n^{-1/2}: the mass above 10^7 is far from negligible.
  double head = 0;
  for (long long n = 1; n <= 10'000'000; ++n) head += graft_blacks_pmf(3, n);
  CHECK(1 - head == doctest::Approx(3.6e-4).epsilon(0.05));

  Rng rng(8);
  std::vector<long long> hist(6, 0);
  const long long draws = 200000;
  for (long long i = 0; i < draws; ++i) {
    const long long n = sample_graft_blacks(3, rng);
    CHECK(n >= 1);
    ++hist[std::min<long long>(n, 6) - 1];
  }
  std::vector<double> p(6, 0);
  double acc = 0;
  for (int n = 1; n <= 5; ++n) acc += p[n - 1] = graft_blacks_pmf(3, n);
  p[5] = 1 - acc;
  CHECK(chi_square(hist, p).p_value > 0.001);
}

TEST_CASE("spine structure") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    SpineTree t(3, s);
    for (int h = 0; h <= 20; ++h) {
      const auto& L = t.level(h);
      CHECK(L.color == (h % 2 == 0 ? Color::black : Color::white));
      CHECK(L.kinds[L.spine_slot] == Entry::Kind::child);
      CHECK(static_cast<int>(L.kinds.size()) == (h == 0 ? 3 : 2));
      if (h % 2 == 0)
        CHECK(std::count(L.kinds.begin(), L.kinds.end(), Entry::Kind::child) == 1);
    }
  }
  // Levels do not depend on the order they are grown in.
  SpineTree a(4, 99), b(4, 99);
  a.grow_spine(30);
  for (int h = 30; h >= 0; --h) {
    const auto& la = a.level(h);
    const auto& lb = b.level(h);
    CHECK(la.kinds == lb.kinds);
    CHECK(la.spine_slot == lb.spine_slot);
    CHECK(la.key == lb.key);
  }
  SpineTree sized(3, 5, GraftMode::sized);
  const auto& L = sized.level(1);
  for (int i = 0; i < 2; ++i)
    if (L.kinds[i] == Entry::Kind::child && i != L.spine_slot) CHECK(L.graft_blacks[i] >= 1);
  NodeRef off{};
  off.on_spine = false;
  CHECK_THROWS_AS(sized.offspring(off), DomainError);
  SpineTree tiny(3, 1, GraftMode::lazy, SpineBudget{5});
  CHECK_THROWS_AS(tiny.level(6), ResourceError);
  CHECK_THROWS_AS(SpineTree(17, 1), DomainError);
}

TEST_CASE("root word is uniform") {
  for (int d : {3, 5}) {
    std::vector<long long> hist(d, 0);
    for (std::uint64_t s = 0; s < 100000; ++s) ++hist[SpineTree(d, s).level(0).spine_slot];
    CHECK(chi_square(hist, std::vector<double>(d, 1.0 / d)).p_value > 0.001);
  }
}

TEST_CASE("truncations are well charged") {
  for (std::uint64_t s = 0; s < 300; ++s) {
    SpineTree t(3, s);
    for (int k = 1; k <= 5; ++k) {
      auto tr = truncate(t, k);
      check_ball_shape(3, tr.ball);
      CHECK(tr.spine.size() == static_cast<std::size_t>(k + 1));
      auto ch = truncation_charges(tr.ball, 3);
      CHECK(ch.total == 0);
      for (std::size_t v = 0; v < tr.ball.ball.nodes.size(); ++v) {
        if (tr.ball.ball.nodes[v].color == Color::black) CHECK(ch.charge_of[v] <= 1);
        else CHECK(ch.charge_of[v] >= 0);
      }
    }
  }
}

TEST_CASE("truncations are consistent across heights") {
  for (std::uint64_t s = 0; s < 300; ++s) {
    SpineTree t(3, s);
    for (int k = 0; k <= 5; ++k) {
      auto lo = truncate(t, k);
      auto hi = truncate(t, k + 1);
      CHECK(canonical_code(tree_ball(hi.ball.ball, k).ball) == canonical_code(lo.ball.ball));
    }
  }
}

TEST_CASE("ball frequencies of the limit tree") {
  const int k = 2;
  const long long draws = 60000;
  std::map<std::string, std::pair<TreeBall, long long>> seen;
  for (long long i = 0; i < draws; ++i) {
    SpineTree t(3, static_cast<std::uint64_t>(i) + 1000);
    auto tr = truncate(t, k);
    auto code = canonical_code(tr.ball.ball).code;
    auto it = seen.find(code);
    if (it == seen.end()) seen.emplace(code, std::pair{tr.ball, 1LL});
    else ++it->second.second;
  }
  mpq_class covered = 0;
  for (const auto& [code, bc] : seen) {
    const mpq_class p = spine_ball_prob(3, bc.first);
    CHECK(p == ball_prob_limit(3, bc.first));
    covered += p;
    if (p.get_d() < 1e-3) continue;
    auto chk = binomial_check(bc.second, draws, p.get_d(), 4);
    INFO(code << " observed " << bc.second << " p " << p.get_d());
    CHECK(chk.pass);
  }
  CHECK(covered <= 1);
  CHECK(spine_ball_prob(3, tree_ball(enumerate_trees(3, 1).front(), 1)) == mpq_class(1, 3));
}

TEST_CASE("truncation json") {
  SpineTree t(3, 4);
  auto j = to_json(truncate(t, 3));
  CHECK(j["k"] == 3);
  CHECK(j["spine"].size() == 4);
  CHECK(canonical_code(tree_from_json(j)) == canonical_code(truncate(t, 3).ball.ball));
}
