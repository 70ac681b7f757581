#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "blossom/gf.hpp"
#include "blossom/parallel.hpp"

namespace blossom {

inline constexpr int kSchemaVersion = 1;

struct ExperimentReport {
  std::string id;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json cells = nlohmann::json::array();
  nlohmann::json checks = nlohmann::json::array();
  double wall_clock = 0;  // seconds

  void check(const std::string& name, bool pass, nlohmann::json detail = nlohmann::json::object());
  bool pass() const;
  // Wall-clock is left out unless asked for, so reports stay byte-reproducible.
  nlohmann::json to_json(bool with_timing = false) const;
};

// "p/q" plus a double rendering.
nlohmann::json exact_json(const mpq_class& q);

// Exhaustive check of T^d_n against the map counts for every n <= n_max.
ExperimentReport verify_bijection(int d, int n_max);

struct ConvergenceOptions {
  std::vector<int> n_grid;
  std::vector<int> sampled_n;  // subset of n_grid with an empirical column
  long long samples = 0;
  std::uint64_t seed = 0;
  TreeSampler sampler = TreeSampler::cycle;
  Exec exec = Exec::parallel;
};

ExperimentReport verify_convergence(int d, const TreeBall& ball, const ConvergenceOptions& opt);

ExperimentReport walk_stats_experiment(int d, int levels, long long samples, std::uint64_t seed,
                                       GraftMode mode = GraftMode::sized, Exec e = Exec::parallel);

// The single map of T^d_1: two vertices joined by d parallel edges.
PlanarMap parallel_edge_map(int d);

struct RecurrenceOptions {
  int radius = 30;
  long long steps = 1000;
  long long walkers = 100;
  std::uint64_t seed = 0;
  bool sanity = false;  // walk on parallel_edge_map instead
  CloseBallOptions ball;
};

// Exploratory: walks on balls of the closed limit map. Not a recurrence test.
ExperimentReport recurrence_experiment(int d, const RecurrenceOptions& opt);

}  // namespace blossom
