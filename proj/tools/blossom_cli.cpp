#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "blossom/closure.hpp"
#include "blossom/experiments.hpp"
#include "blossom/gf.hpp"
#include "blossom/sampler.hpp"

using namespace blossom;
using nlohmann::json;

namespace {

struct Global {
  int d = 3;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format;
  long long budget = 0;  // 0 keeps each command's default
  bool serial = false;
  bool timing = false;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DomainError("cannot open " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string format_or(const Global& g, const std::string& fallback) { return g.format.empty() ? fallback : g.format; }

Exec exec_of(const Global& g) { return g.serial ? Exec::serial : Exec::parallel; }

json read_json(const std::string& path) {
  if (path == "-") return json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return json::parse(in);
}

void emit_map(std::ostream& os, const PlanarMap& m, const std::string& fmt) {
  if (fmt == "dot") os << to_dot(m);
  else if (fmt == "json" || fmt == "jsonl") os << to_json(m).dump() << '\n';
  else throw DomainError("map format must be json, jsonl or dot");
}

int emit_report(const Global& g, const ExperimentReport& r) {
  Output out(g.out);
  out.os() << r.to_json(g.timing).dump(2) << '\n';
  return r.pass() ? 0 : 1;
}

CloseBallOptions ball_options(const Global& g) {
  CloseBallOptions opt;
  if (g.budget > 0) opt.stem_budget = g.budget;
  return opt;
}

TreeBall default_ball(int d, int k) {
  for (int n = 1;; ++n)
    for (const auto& t : enumerate_trees(d, n))
      if (tree_height(t) >= k) return tree_ball(t, k);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blossoming trees, their closures and the infinite bipartite planar map"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--d", g.d, "vertex degree")->check(CLI::Range(3, 64));
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output file, - for stdout");
  app.add_option("--format", g.format, "csv, json, jsonl, dot or code");
  app.add_option("--budget", g.budget, "stem budget (search nodes for enumerate)");
  app.add_flag("--serial", g.serial, "disable OpenMP loops");
  app.add_flag("--timing", g.timing, "include wall-clock in reports");
  app.fallthrough();

  int n = 4, n_max = 5, count = 1, k = 2, radius = 3, levels = 50;
  long long samples = 1000, steps = 1000, walkers = 100;
  std::string sampler = "recursive", input = "-", ball_file, grafts = "sized";
  std::vector<int> n_grid{10, 100, 1000, 10000}, sampled_n;
  bool exhaustive = false, sanity = false;

  auto* c_count = app.add_subcommand("count", "exact counts of trees and maps");
  c_count->add_option("--n-max", n_max);
  c_count->add_flag("--exhaustive", exhaustive, "also enumerate");

  auto* c_enum = app.add_subcommand("enumerate", "all trees of T^d_n");
  c_enum->add_option("--n", n)->required();

  auto* c_st = app.add_subcommand("sample-tree", "uniform trees of T^d_n");
  c_st->add_option("--n", n)->required();
  c_st->add_option("--count", count);
  c_st->add_option("--sampler", sampler)->check(CLI::IsMember({"recursive", "cycle"}));

  auto* c_sm = app.add_subcommand("sample-map", "uniform plane maps with n black vertices");
  c_sm->add_option("--n", n)->required();
  c_sm->add_option("--count", count);

  auto* c_close = app.add_subcommand("close", "closure of a tree given as JSON");
  c_close->add_option("--in", input, "tree JSON file, - for stdin");

  auto* c_spine = app.add_subcommand("sample-spine", "ball of the limit tree");
  c_spine->add_option("--k", k);
  c_spine->add_option("--count", count);

  auto* c_ui = app.add_subcommand("sample-uirbpm", "balls of the infinite map");
  c_ui->add_option("--radius", radius);
  c_ui->add_option("--count", count);

  auto* c_vb = app.add_subcommand("verify-bijection", "exhaustive bijection check");
  c_vb->add_option("--n-max", n_max);

  auto* c_vc = app.add_subcommand("verify-convergence", "finite versus limit ball probabilities");
  c_vc->add_option("--k", k);
  c_vc->add_option("--ball", ball_file, "ball as tree JSON; default is the k-ball of the first enumerated tree of height >= k");
  c_vc->add_option("--n-grid", n_grid, "comma separated")->delimiter(',');
  c_vc->add_option("--sampled-n", sampled_n)->delimiter(',');
  c_vc->add_option("--samples", samples);
  c_vc->add_option("--sampler", sampler)->check(CLI::IsMember({"recursive", "cycle"}));

  auto* c_ws = app.add_subcommand("walk-stats", "contour walk along the spine");
  c_ws->add_option("--levels", levels);
  c_ws->add_option("--samples", samples);
  c_ws->add_option("--grafts", grafts)->check(CLI::IsMember({"sized", "lazy"}));

  auto* c_srw = app.add_subcommand("srw", "simple random walks on balls of the infinite map");
  c_srw->add_option("--radius", radius);
  c_srw->add_option("--steps", steps);
  c_srw->add_option("--walkers", walkers);
  c_srw->add_flag("--sanity", sanity, "walk on the parallel-edge map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const TreeSampler ts = sampler == "cycle" ? TreeSampler::cycle : TreeSampler::recursive;

  try {
    if (*c_count) {
      Output out(g.out);
      const auto fmt = format_or(g, "csv");
      if (fmt == "csv") out.os() << "d,n,trees,plane_maps,rooted_maps" << (exhaustive ? ",enumerated" : "") << '\n';
      const auto slots = slot_dp_recurrence(g.d, g.d - 1, std::max(0, n_max - 1));
      for (int i = 1; i <= n_max; ++i) {
        json row = {{"d", g.d},
                    {"n", i},
                    {"trees", mpz_class(to_mpz(g.d) * slots[g.d - 1][i - 1]).get_str()},
                    {"plane_maps", count_plane_maps(g.d, i).get_str()},
                    {"rooted_maps", count_rooted_maps(g.d, i).get_str()}};
        if (exhaustive) row["enumerated"] = enumerate_trees(g.d, i).size();
        if (fmt == "csv") {
          out.os() << g.d << ',' << i << ',' << row["trees"].get<std::string>() << ','
                   << row["plane_maps"].get<std::string>() << ',' << row["rooted_maps"].get<std::string>();
          if (exhaustive) out.os() << ',' << row["enumerated"];
          out.os() << '\n';
        } else {
          out.os() << row.dump() << '\n';
        }
      }
      return 0;
    }
    if (*c_enum) {
      EnumerationGuard guard;
      if (g.budget > 0) guard.max_search_nodes = g.budget;
      Output out(g.out);
      const auto fmt = format_or(g, "jsonl");
      for (const auto& t : enumerate_trees(g.d, n, guard))
        out.os() << (fmt == "code" ? canonical_code(t).code : to_json(t).dump()) << '\n';
      return 0;
    }
    if (*c_st) {
      Output out(g.out);
      const auto fmt = format_or(g, "jsonl");
      for (int i = 0; i < count; ++i) {
        Rng rng = sample_rng(g.seed, i);
        auto t = draw_tree(g.d, n, ts, rng);
        out.os() << (fmt == "code" ? canonical_code(t).code : to_json(t).dump()) << '\n';
      }
      return 0;
    }
    if (*c_sm) {
      Output out(g.out);
      SamplerContext ctx(g.d, n);
      for (int i = 0; i < count; ++i) {
        Rng rng = sample_rng(g.seed, i);
        emit_map(out.os(), sample_map(ctx, n, rng), format_or(g, "jsonl"));
      }
      return 0;
    }
    if (*c_close) {
      auto t = tree_from_json(read_json(input));
      Output out(g.out);
      emit_map(out.os(), close_finite(t), format_or(g, "json"));
      return 0;
    }
    if (*c_spine) {
      Output out(g.out);
      for (int i = 0; i < count; ++i) {
        SpineTree t(g.d, g.seed + static_cast<std::uint64_t>(i));
        out.os() << to_json(truncate(t, k)).dump() << '\n';
      }
      return 0;
    }
    if (*c_ui) {
      Output out(g.out);
      const auto fmt = format_or(g, "jsonl");
      for (int i = 0; i < count; ++i) {
        auto b = close_ball(g.d, g.seed + static_cast<std::uint64_t>(i), radius, ball_options(g));
        if (fmt == "dot") out.os() << to_dot(b.ball);
        else if (fmt == "jsonl" || fmt == "json") out.os() << to_json(b).dump() << '\n';
        else throw DomainError("ball format must be jsonl or dot");
      }
      return 0;
    }
    if (*c_vb) return emit_report(g, verify_bijection(g.d, n_max));
    if (*c_vc) {
      TreeBall ball = ball_file.empty() ? default_ball(g.d, k) : tree_ball(tree_from_json(read_json(ball_file)), k);
      ConvergenceOptions opt{n_grid, sampled_n, samples, g.seed, ts, exec_of(g)};
      return emit_report(g, verify_convergence(g.d, ball, opt));
    }
    if (*c_ws)
      return emit_report(g, walk_stats_experiment(g.d, levels, samples, g.seed,
                                                  grafts == "lazy" ? GraftMode::lazy : GraftMode::sized, exec_of(g)));
    if (*c_srw) {
      RecurrenceOptions opt;
      opt.radius = radius;
      opt.steps = steps;
      opt.walkers = walkers;
      opt.seed = g.seed;
      opt.sanity = sanity;
      opt.ball = ball_options(g);
      return emit_report(g, recurrence_experiment(g.d, opt));
    }
  } catch (const ResourceError& e) {
    std::cerr << "resource: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
