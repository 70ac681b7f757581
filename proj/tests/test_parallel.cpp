#include <doctest.h>

#include "blossom/parallel.hpp"

using namespace blossom;

TEST_CASE("tree tallies") {
  for (auto s : {TreeSampler::recursive, TreeSampler::cycle}) {
    auto a = tally_trees(3, 4, 3000, 11, s, Exec::serial);
    auto b = tally_trees(3, 4, 3000, 11, s, Exec::parallel);
    CHECK(a == b);
    long long total = 0;
    for (const auto& [code, c] : a) total += c;
    CHECK(total == 3000);
    CHECK(tally_balls(4, 30, 2, 2000, 5, s, Exec::serial) == tally_balls(4, 30, 2, 2000, 5, s, Exec::parallel));
  }
}

TEST_CASE("walk tallies") {
  for (auto mode : {GraftMode::lazy, GraftMode::sized}) {
    // Lazy mode scans whole grafts, whose sizes are heavy tailed.
    const long long n = mode == GraftMode::lazy ? 200 : 2000;
    auto a = walk_tally(3, 8, n, 3, mode, Exec::serial);
    auto b = walk_tally(3, 8, n, 3, mode, Exec::parallel);
    CHECK(a == b);
    CHECK(a.samples == n);
    CHECK(a.identity_ok == n);
  }
}

TEST_CASE("ball batches") {
  CloseBallOptions opt;
  auto a = close_ball_batch(3, 3, 100, 60, opt, Exec::serial);
  auto b = close_ball_batch(3, 3, 100, 60, opt, Exec::parallel);
  CHECK(a.balls == b.balls);
  CHECK(a.errors == b.errors);
  REQUIRE(a.balls.size() == 60);
  for (std::size_t i = 0; i < 60; ++i) CHECK(a.balls[i] == nlohmann::json(to_json(close_ball(3, 100 + i, 3))).dump());
}

TEST_CASE("errors inside a parallel batch surface as exceptions") {
  CHECK_THROWS_AS(tally_trees(2, 4, 10, 1, TreeSampler::cycle, Exec::parallel), DomainError);
  CHECK_THROWS_AS(walk_tally(17, 4, 10, 1, GraftMode::lazy, Exec::parallel), DomainError);
}
