#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "blossom/common.hpp"

namespace blossom {

struct Entry {
  enum class Kind : std::uint8_t { child, open, close };
  Kind kind = Kind::open;
  VertexId child = -1;

  static Entry make_child(VertexId v) { return {Kind::child, v}; }
  static Entry open() { return {Kind::open, -1}; }
  static Entry close() { return {Kind::close, -1}; }
  bool is_child() const { return kind == Kind::child; }
  bool is_stem() const { return kind != Kind::child; }
  bool operator==(const Entry&) const = default;
};

struct TreeVertex {
  Color color = Color::black;
  std::vector<Entry> offspring;
};

// Offspring lists are in clockwise contour order. For a non-root vertex the
// parent edge comes first in its rotation, followed by the offspring. The root
// corner sits just before root.offspring[root_corner].
struct BlossomTree {
  int d = 3;
  std::vector<TreeVertex> nodes;
  VertexId root = 0;
  int root_corner = 0;

  std::size_t size() const { return nodes.size(); }
  std::size_t black_count() const;
};

struct ChargeReport {
  std::vector<long long> charge_of;
  long long total = 0;
};

struct TreeBall {
  BlossomTree ball;
  int k = 0;
  long long m_k = 0;
  long long n_k = 0;
};

// Checks ids, colors, stem placement and that every vertex hangs off the root
// exactly once. Throws StructuralError.
void check_well_formed(const BlossomTree& t);

ChargeReport compute_charges(const BlossomTree& t);
bool is_well_charged(const BlossomTree& t);
bool validate_regular(const BlossomTree& t, int d);

// Pre-order parents and heights. parent[root] = -1.
struct TreeLayout {
  std::vector<VertexId> parent;
  std::vector<int> entry_in_parent;
  std::vector<int> height;
  std::vector<VertexId> preorder;
};
TreeLayout layout(const BlossomTree& t);

struct StemRef {
  VertexId vertex;
  int entry;
  Entry::Kind kind;
};
// Stems in clockwise contour order starting from the root corner.
std::vector<StemRef> contour_stems(const BlossomTree& t);

struct EnumerationGuard {
  long long max_search_nodes = 200'000'000;
};
// All of T^d_n, sorted by canonical code. Exhaustive; exponential in n.
std::vector<BlossomTree> enumerate_trees(int d, int n, EnumerationGuard guard = {});

TreeBall tree_ball(const BlossomTree& t, int k);
int tree_height(const BlossomTree& t);

CanonicalCode canonical_code(const BlossomTree& t);
// 0 for equal trees, otherwise 1/(1+R*); 1 when even the 0-balls differ.
mpq_class local_distance(const BlossomTree& a, const BlossomTree& b);

// Same tree with the root corner moved; used to check charge invariance.
BlossomTree reroot_corner(const BlossomTree& t, int corner);
// Mirror image: every offspring list reversed.
BlossomTree mirror(const BlossomTree& t);
// Relabel vertices in pre-order from the root.
BlossomTree normalize_ids(const BlossomTree& t);

nlohmann::json to_json(const BlossomTree& t);
BlossomTree tree_from_json(const nlohmann::json& j);

}  // namespace blossom
