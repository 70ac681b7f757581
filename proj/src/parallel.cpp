#include "blossom/parallel.hpp"

#include <exception>
#include <omp.h>

#include "blossom/sampler.hpp"

namespace blossom {

BlossomTree draw_tree(int d, int n, TreeSampler s, Rng& rng) {
  if (s == TreeSampler::cycle) return sample_tree_cycle(d, n, rng);
  thread_local std::map<std::pair<int, int>, SamplerContext> contexts;
  auto it = contexts.find({d, n});
  if (it == contexts.end()) it = contexts.emplace(std::pair{d, n}, SamplerContext(d, n)).first;
  return sample_tree(it->second, n, rng);
}

namespace {

// Exceptions may not leave an OpenMP region; the first one is rethrown after.
class FirstError {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(blossom_first_error)
      if (!err_) err_ = std::current_exception();
    }
  }
  void rethrow() {
    if (err_) std::rethrow_exception(err_);
  }

 private:
  std::exception_ptr err_;
};

template <class Key>
std::map<std::string, long long> tally(long long count, Exec e, Key key) {
  std::map<std::string, long long> out;
  if (e == Exec::serial) {
    for (long long i = 0; i < count; ++i) ++out[key(i)];
    return out;
  }
  FirstError err;
#pragma omp parallel
  {
    std::map<std::string, long long> local;
#pragma omp for schedule(dynamic, 64) nowait
    for (long long i = 0; i < count; ++i) err.run([&] { ++local[key(i)]; });
#pragma omp critical
    for (auto& [k, v] : local) out[k] += v;
  }
  err.rethrow();
  return out;
}

void add_sample(WalkTally& t, const WalkStats& ws) {
  ++t.samples;
  ++t.y0_hist[ws.Y0()];
  for (int k = 1; k <= t.levels; ++k) ++t.y_hist[ws.Y[k] + t.d - 2];
  for (int k = 0; k <= t.levels; ++k) {
    t.x_positive += ws.X[k] > 0;
    t.x_negative += ws.X[k] < 0;
    ++t.x_cells;
  }
  t.identity_ok += ws.identity_holds();
}

void merge(WalkTally& a, const WalkTally& b) {
  a.samples += b.samples;
  for (std::size_t i = 0; i < a.y_hist.size(); ++i) a.y_hist[i] += b.y_hist[i];
  for (std::size_t i = 0; i < a.y0_hist.size(); ++i) a.y0_hist[i] += b.y0_hist[i];
  a.identity_ok += b.identity_ok;
  a.x_positive += b.x_positive;
  a.x_negative += b.x_negative;
  a.x_cells += b.x_cells;
}

}  // namespace

std::map<std::string, long long> tally_trees(int d, int n, long long count, std::uint64_t seed, TreeSampler s,
                                             Exec e) {
  return tally(count, e, [&](long long i) {
    Rng rng = sample_rng(seed, i);
    return canonical_code(draw_tree(d, n, s, rng)).code;
  });
}

std::map<std::string, long long> tally_balls(int d, int n, int k, long long count, std::uint64_t seed,
                                             TreeSampler s, Exec e) {
  return tally(count, e, [&](long long i) {
    Rng rng = sample_rng(seed, i);
    return canonical_code(tree_ball(draw_tree(d, n, s, rng), k).ball).code;
  });
}

WalkTally walk_tally(int d, int levels, long long count, std::uint64_t seed, GraftMode mode, Exec e) {
  WalkTally out;
  out.d = d;
  out.levels = levels;
  out.y_hist.assign(2 * d - 3, 0);
  out.y0_hist.assign(d, 0);
  auto one = [&](long long i) {
    SpineTree t(d, mix_seed(seed, static_cast<std::uint64_t>(i)), mode);
    return spine_walk_stats(t, levels);
  };
  if (e == Exec::serial) {
    for (long long i = 0; i < count; ++i) add_sample(out, one(i));
    return out;
  }
  FirstError err;
#pragma omp parallel
  {
    WalkTally local = out;
#pragma omp for schedule(dynamic, 64) nowait
    for (long long i = 0; i < count; ++i) err.run([&] { add_sample(local, one(i)); });
#pragma omp critical
    merge(out, local);
  }
  err.rethrow();
  return out;
}

BallBatch close_ball_batch(int d, int R, std::uint64_t first_seed, long long count, CloseBallOptions opt, Exec e) {
  BallBatch out;
  out.balls.resize(count);
  out.errors.resize(count);
  auto one = [&](long long i) {
    try {
      out.balls[i] = to_json(close_ball(d, first_seed + static_cast<std::uint64_t>(i), R, opt)).dump();
    } catch (const std::exception& ex) {
      out.errors[i] = ex.what();
    }
  };
  if (e == Exec::serial) {
    for (long long i = 0; i < count; ++i) one(i);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < count; ++i) one(i);
  return out;
}

}  // namespace blossom
