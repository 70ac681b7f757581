// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "blossom/closure.hpp"
#include "blossom/experiments.hpp"
#include "blossom/sampler.hpp"
#include "blossom/stats.hpp"
#include "oracles.hpp"

using namespace blossom;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) note = what;
    pass = pass && ok;
  }
};

std::map<std::string, TreeBall> realized_balls(int d, int n, int k) {
  std::map<std::string, TreeBall> out;
  for (const auto& t : enumerate_trees(d, n)) {
    auto b = tree_ball(t, k);
    out.emplace(canonical_code(b.ball).code, b);
  }
  return out;
}

Outcome bijection() {
  Outcome o;
  for (auto [d, n_max] : {std::pair{3, 5}, std::pair{4, 4}}) {
    auto r = verify_bijection(d, n_max);
    o.require(r.pass(), "verify_bijection d=" + std::to_string(d));
  }
  return o;
}

Outcome finite_identity() {
  Outcome o;
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= 3; ++k)
      for (const auto& [code, b] : realized_balls(3, n, k))
        o.require(ball_prob_finite(3, n, b) == oracle::brute_ball_prob(3, n, b.ball, k),
                  "n=" + std::to_string(n) + " k=" + std::to_string(k) + " " + code);
  return o;
}

Outcome limit_formula() {
  Outcome o;
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k <= 3; ++k)
      for (const auto& [code, b] : realized_balls(3, n, k))
        o.require(ball_prob_limit(3, b) == spine_ball_prob(3, b), "spine product differs on " + code);
  for (const auto& t : enumerate_trees(3, 1)) {
    auto b = tree_ball(t, 1);
    o.require(ball_prob_limit(3, b) == mpq_class(1, 3) && spine_ball_prob(3, b) == mpq_class(1, 3), "k=1 value");
  }
  for (int k = 1; k <= 2; ++k) {
    mpq_class total = 0;
    for (const auto& shape : oracle::all_balls(3, k)) total += ball_prob_limit(3, tree_ball(shape, k));
    o.require(total == 1, "sum at k=" + std::to_string(k));
  }
  return o;
}

Outcome sampler_uniformity() {
  Outcome o;
  SamplerContext ctx(3, 2);
  Rng rng(mix_seed(20240601, 4));
  std::map<std::string, long long> seen;
  for (const auto& t : enumerate_trees(3, 2)) seen[canonical_code(t).code] = 0;
  o.require(seen.size() == 12, "support size");
  for (long long i = 0; i < 120000; ++i) {
    auto it = seen.find(canonical_code(sample_tree(ctx, 2, rng)).code);
    o.require(it != seen.end(), "sample outside T^3_2");
    if (it != seen.end()) ++it->second;
  }
  std::vector<long long> obs;
  for (const auto& [code, c] : seen) obs.push_back(c);
  auto cs = chi_square(obs, std::vector<double>(obs.size(), 1.0 / obs.size()));
  o.require(cs.p_value >= 0.001, "chi-square p=" + std::to_string(cs.p_value));
  o.note += (o.note.empty() ? "" : "; ") + std::string("p=") + std::to_string(cs.p_value);
  return o;
}

Outcome convergence() {
  Outcome o;
  BlossomTree deep;
  for (const auto& t : enumerate_trees(3, 3))
    if (tree_height(t) >= 2) {
      deep = t;
      break;
    }
  ConvergenceOptions opt;
  opt.n_grid = {10, 100, 1000, 10000};
  opt.sampled_n = {1000};
  opt.samples = 100000;
  opt.seed = 5;
  auto r = verify_convergence(3, tree_ball(deep, 2), opt);
  for (const auto& c : r.checks) o.require(c["pass"].get<bool>(), c["name"].get<std::string>());
  return o;
}

Outcome infinite_closure() {
  Outcome o;
  for (int n = 1; n <= 4; ++n)
    for (const auto& t : enumerate_trees(3, n)) {
      std::vector<Entry::Kind> w;
      for (const auto& s : contour_stems(t)) w.push_back(s.kind);
      const auto p = cyclic_matching(w);
      auto cp = ContourProcess::from_finite_tree(t);
      const long long N = cp.period();
      for (long long k = 0; k < N; ++k) {
        auto m = match_stems(cp, k);
        o.require(m.kind == MatchResult::Kind::index && ((m.index % N) + N) % N == p[k], "sigma on " + canonical_code(t).code);
      }
    }
  CloseBallOptions base, doubled;
  doubled.initial_radius = 2 * (3 + 2);
  doubled.stem_budget = 2 * base.stem_budget;
  doubled.spine_budget = 2 * base.spine_budget;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    auto a = close_ball(3, s, 3, base);
    auto b = close_ball(3, s, 3, doubled);
    o.require(to_json(a).dump() == to_json(b).dump(), "seed " + std::to_string(s) + " changed");
    const auto& m = a.ball;
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
      int matched = 0;
      for (HalfEdgeId h : m.vertices[v].rot) {
        const auto& he = m.half_edges[h];
        if (he.twin == kFrontier) continue;
        ++matched;
        o.require(m.vertices[m.half_edges[he.twin].vertex].color != m.vertices[v].color, "not bipartite");
      }
      if (a.distance[v] < a.R) o.require(matched == 3, "interior degree");
    }
  }
  return o;
}

Outcome walk() {
  Outcome o;
  auto r = walk_stats_experiment(3, 50, 100000, 7);
  for (const auto& c : r.checks) o.require(c["pass"].get<bool>(), c["name"].get<std::string>());
  return o;
}

Outcome criticality() {
  Outcome o;
  for (int d = 3; d <= 8; ++d) {
    auto mm = mean_matrix(d);
    const mpq_class b[4] = {d - 1, d - 1, d - 1, 0};
    for (int i = 0; i < 4; ++i) {
      mpq_class mb = 0;
      for (int j = 0; j < 4; ++j) mb += mm.m[i][j] * b[j];
      o.require(mb == b[i], "M b != b at d=" + std::to_string(d));
    }
    const TypeTag types[4] = {TypeTag::root, TypeTag::black, TypeTag::white, TypeTag::stem};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        mpq_class e = 0;
        for (const auto& wm : offspring_law(d, types[i]))
          e += wm.mass * static_cast<long>(std::count(wm.word.begin(), wm.word.end(), types[j]));
        o.require(mm.m[i][j] == e, "entry differs from expectation at d=" + std::to_string(d));
        o.require(mean_matrix_closed_form(d).m[i][j] == e, "closed form differs at d=" + std::to_string(d));
      }
  }
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"bijection and counting", bijection},
      {"exact finite ball probabilities", finite_identity},
      {"limit ball probabilities", limit_formula},
      {"sampler uniformity", sampler_uniformity},
      {"convergence witness", convergence},
      {"infinite closure", infinite_closure},
      {"walk statistics", walk},
      {"mean matrix criticality", criticality},
  };
  int failed = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("threw: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %d %s: %s (%.1f s)%s%s\n", id, o.pass ? "PASS" : "FAIL", name, s, o.note.empty() ? "" : " ",
                o.note.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
