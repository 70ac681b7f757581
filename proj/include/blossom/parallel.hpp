#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "blossom/bgw.hpp"
#include "blossom/closure.hpp"

namespace blossom {

// Every batch kernel runs either as a plain loop or as an OpenMP loop. Sample
// i always draws from sample_rng(seed, i), so both give identical results.
enum class Exec { serial, parallel };

enum class TreeSampler { recursive, cycle };

BlossomTree draw_tree(int d, int n, TreeSampler s, Rng& rng);

// Canonical code -> count over `count` samples of T^d_n.
std::map<std::string, long long> tally_trees(int d, int n, long long count, std::uint64_t seed, TreeSampler s,
                                             Exec e);
// Same for the k-balls of the samples.
std::map<std::string, long long> tally_balls(int d, int n, int k, long long count, std::uint64_t seed,
                                             TreeSampler s, Exec e);

struct WalkTally {
  int d = 0;
  int levels = 0;
  long long samples = 0;
  std::vector<long long> y_hist;   // Y_k, k >= 1, shifted by d-2
  std::vector<long long> y0_hist;  // Y_0
  long long identity_ok = 0;
  long long x_positive = 0, x_cells = 0;
  long long x_negative = 0;
  bool operator==(const WalkTally&) const = default;
};

// Sample i uses SpineTree(d, mix_seed(seed, i), mode).
WalkTally walk_tally(int d, int levels, long long count, std::uint64_t seed, GraftMode mode, Exec e);

struct BallBatch {
  std::vector<std::string> balls;   // JSON text per seed, empty on failure
  std::vector<std::string> errors;  // empty on success
};

// Balls for seeds first_seed .. first_seed+count-1.
BallBatch close_ball_batch(int d, int R, std::uint64_t first_seed, long long count, CloseBallOptions opt, Exec e);

}  // namespace blossom
