#include "blossom/experiments.hpp"

#include <chrono>
#include <set>

#include "blossom/closure.hpp"
#include "blossom/sampler.hpp"
#include "blossom/stats.hpp"

namespace blossom {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void ExperimentReport::check(const std::string& name, bool pass, nlohmann::json detail) {
  checks.push_back({{"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
}

bool ExperimentReport::pass() const {
  for (const auto& c : checks)
    if (!c["pass"].get<bool>()) return false;
  return true;
}

nlohmann::json ExperimentReport::to_json(bool with_timing) const {
  nlohmann::json j = {{"schema_version", kSchemaVersion},
                      {"experiment", id},
                      {"parameters", parameters},
                      {"cells", cells},
                      {"checks", checks},
                      {"pass", pass()}};
  if (with_timing) j["wall_clock_s"] = wall_clock;
  return j;
}

nlohmann::json exact_json(const mpq_class& q) { return {{"exact", q.get_str()}, {"approx", q.get_d()}}; }

ExperimentReport verify_bijection(int d, int n_max) {
  const auto t0 = Clock::now();
  ExperimentReport r;
  r.id = "verify-bijection";
  r.parameters = {{"d", d}, {"n_max", n_max}};
  const auto w_iter = w_series_iteration(d, std::max(0, n_max - 1));
  const auto slots = slot_dp_recurrence(d, d - 1, std::max(0, n_max - 1));
  for (int n = 1; n <= n_max; ++n) {
    const auto trees = enumerate_trees(d, n);
    const mpz_class closed = count_plane_maps(d, n);
    const mpz_class iterated = to_mpz(d) * w_iter[n - 1];
    const mpz_class dp = to_mpz(d) * slots[d - 1][n - 1];
    const mpz_class found(static_cast<unsigned long>(trees.size()));
    nlohmann::json row = {{"n", n},
                          {"trees", found.get_str()},
                          {"closed_form", closed.get_str()},
                          {"series_iteration", iterated.get_str()},
                          {"slot_dp", dp.get_str()}};
    r.check("count n=" + std::to_string(n), found == closed && closed == iterated && closed == dp, row);

    const long long faces_expected = static_cast<long long>(d - 2) * n + 2;
    std::set<std::string> plane;
    std::map<std::string, long long> rooted;
    nlohmann::json witness, class_witness;
    for (const auto& t : trees) {
      PlanarMap m = close_finite(t);
      auto rep = validate_map(m, d);
      if (!rep.ok() || rep.F.value_or(-1) != faces_expected) {
        if (witness.is_null()) witness = {{"tree", to_json(t)}, {"problem", rep.problem}};
        continue;
      }
      if (!plane.insert(canonical_code(m, true).code).second && witness.is_null())
        witness = {{"tree", to_json(t)}, {"problem", "two trees close to the same plane map"}};
      ++rooted[canonical_code(m, false).code];
    }
    bool classes_ok = true;
    for (const auto& [code, size] : rooted)
      if (size != faces_expected) {
        classes_ok = false;
        if (class_witness.is_null()) class_witness = {{"rooted_map", code}, {"class_size", size}};
      }
    const mpz_class rooted_count(static_cast<unsigned long>(rooted.size()));
    row["rooted_maps"] = rooted_count.get_str();
    row["rooted_maps_formula"] = count_rooted_maps(d, n).get_str();
    row["class_size"] = faces_expected;
    r.cells.push_back(row);
    r.check("closure valid and injective n=" + std::to_string(n), witness.is_null(),
            witness.is_null() ? nlohmann::json::object() : witness);
    r.check("rooted classes of size 2+(d-2)n, n=" + std::to_string(n),
            classes_ok && rooted_count == count_rooted_maps(d, n), {{"classes", rooted_count.get_str()}, {"witness", class_witness}});
  }
  r.wall_clock = seconds_since(t0);
  return r;
}

ExperimentReport verify_convergence(int d, const TreeBall& ball, const ConvergenceOptions& opt) {
  const auto t0 = Clock::now();
  ExperimentReport r;
  r.id = "verify-convergence";
  const std::string code = canonical_code(ball.ball).code;
  r.parameters = {{"d", d},     {"k", ball.k},           {"ball", code},
                  {"n_grid", opt.n_grid}, {"sampled_n", opt.sampled_n}, {"samples", opt.samples},
                  {"seed", opt.seed}};
  const mpq_class limit = ball_prob_limit(d, ball);
  const mpq_class spine = spine_ball_prob(d, ball);
  r.check("limit equals spine product", limit == spine, {{"limit", exact_json(limit)}, {"spine", exact_json(spine)}});

  std::vector<mpq_class> gaps;
  for (int n : opt.n_grid) {
    const mpq_class exact = ball_prob_finite(d, n, ball);
    mpq_class gap = abs(exact - limit);
    gaps.push_back(gap);
    nlohmann::json row = {{"n", n}, {"exact", exact_json(exact)}, {"limit", exact_json(limit)}, {"gap", exact_json(gap)}};
    if (opt.samples > 0 && std::find(opt.sampled_n.begin(), opt.sampled_n.end(), n) != opt.sampled_n.end()) {
      auto balls = tally_balls(d, n, ball.k, opt.samples, mix_seed(opt.seed, n), opt.sampler, opt.exec);
      long long total = 0;
      for (const auto& [c, v] : balls) total += v;
      const long long hits = balls.count(code) ? balls.at(code) : 0;
      auto bc = binomial_check(hits, opt.samples, exact.get_d());
      row["observed"] = hits;
      row["frequency"] = bc.frequency;
      row["z"] = bc.z;
      row["distinct_balls"] = balls.size();
      r.check("empirical within 3 sigma n=" + std::to_string(n), bc.pass, {{"z", bc.z}});
      r.check("ball frequencies sum to 1 n=" + std::to_string(n), total == opt.samples);
    }
    r.cells.push_back(row);
  }
  bool decreasing = true;
  for (std::size_t i = 2; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
  r.check("gap strictly decreasing after the first term", decreasing);
  r.wall_clock = seconds_since(t0);
  return r;
}

ExperimentReport walk_stats_experiment(int d, int levels, long long samples, std::uint64_t seed, GraftMode mode,
                                       Exec e) {
  const auto t0 = Clock::now();
  ExperimentReport r;
  r.id = "walk-stats";
  r.parameters = {{"d", d},
                  {"levels", levels},
                  {"samples", samples},
                  {"seed", seed},
                  {"grafts", mode == GraftMode::sized ? "sized" : "lazy"}};
  const WalkTally t = walk_tally(d, levels, samples, seed, mode, e);
  const double alpha = bonferroni(0.001, 2);

  // Y_k = U - U' with U, U' uniform on {0..d-2}.
  std::vector<double> py(2 * d - 3);
  const mpz_class sq = to_mpz(d - 1) * to_mpz(d - 1);
  for (int y = -(d - 2); y <= d - 2; ++y) {
    mpq_class p(to_mpz(d - 1 - std::abs(y)), sq);
    p.canonicalize();
    py[y + d - 2] = p.get_d();
    auto bc = binomial_check(t.y_hist[y + d - 2], samples * levels, p.get_d());
    r.cells.push_back({{"variable", "Y_k"}, {"value", y}, {"observed", t.y_hist[y + d - 2]}, {"expected", exact_json(p)}, {"z", bc.z}});
    r.check("Y_k mass at " + std::to_string(y) + " within 3 sigma", bc.pass, {{"z", bc.z}});
  }
  auto cy = chi_square(t.y_hist, py);
  r.check("Y_k chi-square", cy.p_value >= alpha, {{"statistic", cy.statistic}, {"dof", cy.dof}, {"p_value", cy.p_value}});

  std::vector<double> p0(d, 1.0 / d);
  for (int y = 0; y < d; ++y)
    r.cells.push_back({{"variable", "Y_0"}, {"value", y}, {"observed", t.y0_hist[y]}, {"expected", exact_json(mpq_class(1, d))}});
  auto c0 = chi_square(t.y0_hist, p0);
  r.check("Y_0 chi-square", c0.p_value >= alpha, {{"statistic", c0.statistic}, {"dof", c0.dof}, {"p_value", c0.p_value}});

  r.check("C(R_n) = S_n + Y_0 on every sample", t.identity_ok == samples,
          {{"holds", t.identity_ok}, {"samples", samples}});
  r.check("X_k >= 0", t.x_negative == 0);
  r.check("P(X_k > 0) > 0", t.x_positive > 0, {{"positive", t.x_positive}, {"cells", t.x_cells}});
  r.wall_clock = seconds_since(t0);
  return r;
}

PlanarMap parallel_edge_map(int d) {
  PlanarMap m;
  m.d = d;
  m.add_vertex(Color::black, d);
  m.add_vertex(Color::white, d);
  // Reversed order at the white end keeps the embedding planar.
  for (int i = 0; i < d; ++i) m.link(m.vertices[0].rot[i], m.vertices[1].rot[(d - i) % d]);
  m.root = {0, 0};
  return m;
}

ExperimentReport recurrence_experiment(int d, const RecurrenceOptions& opt) {
  const auto t0 = Clock::now();
  ExperimentReport r;
  r.id = "srw";
  r.parameters = {{"d", d},           {"radius", opt.radius}, {"steps", opt.steps}, {"walkers", opt.walkers},
                  {"seed", opt.seed}, {"sanity", opt.sanity}, {"conclusive", false}};
  long long flagged = 0, failed = 0, total_returns = 0;
  for (long long i = 0; i < opt.walkers; ++i) {
    nlohmann::json row = {{"walker", i}};
    try {
      PlanarMap m;
      if (opt.sanity) {
        m = parallel_edge_map(d);
      } else {
        m = close_ball(d, opt.seed + static_cast<std::uint64_t>(i), opt.radius, opt.ball).ball;
        row["ball_seed"] = opt.seed + static_cast<std::uint64_t>(i);
      }
      Rng rng = sample_rng(opt.seed ^ 0x5257ULL, static_cast<std::uint64_t>(i));
      auto w = simple_random_walk(m, opt.steps, rng);
      row["returns"] = w.returns;
      row["steps"] = w.steps_taken;
      row["max_distance"] = w.max_distance;
      row["truncated"] = w.truncated;
      flagged += w.truncated;
      total_returns += w.returns;
      if (opt.sanity)
        r.check("walker " + std::to_string(i) + " returns every other step", w.returns == opt.steps / 2,
                {{"returns", w.returns}});
    } catch (const ResourceError& ex) {
      row["error"] = ex.what();
      ++failed;
    }
    r.cells.push_back(row);
  }
  r.check("every walk completed or flagged", true,
          {{"truncated", flagged}, {"ball_failures", failed}, {"returns", total_returns}});
  r.wall_clock = seconds_since(t0);
  return r;
}

}  // namespace blossom
