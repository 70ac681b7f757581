#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "blossom/tree.hpp"

namespace blossom {

enum class TypeTag : std::uint8_t { root, black, white, stem };
using OffspringWord = std::vector<TypeTag>;

struct WordMass {
  OffspringWord word;
  mpq_class mass;
};

std::vector<WordMass> offspring_law(int d, TypeTag type);
std::vector<WordMass> size_biased_law(int d, TypeTag type);

// Rows and columns ordered root, black, white, stem.
struct MeanMatrix {
  std::array<std::array<mpq_class, 4>, 4> m;
  std::array<mpq_class, 4> b;
  bool eigen_check() const;
};

// Expected type counts, summed over the offspring laws.
MeanMatrix mean_matrix(int d);
// The closed-form matrix, for comparison.
MeanMatrix mean_matrix_closed_form(int d);

// Total number of black vertices in an unconditioned graft hanging from a
// white vertex: P(T = n) = (1/n) P(Bin(n(d-1), 1/(d-1)) = n-1).
double graft_blacks_pmf(int d, long long n);
template <class G>
long long sample_graft_blacks(int d, G& rng);  // instantiated for Rng and KeyStream

enum class GraftMode : std::uint8_t {
  lazy,   // graft vertices generated on demand from per-vertex keys
  sized,  // only the black count of each graft is drawn; interiors are opaque
};

struct SpineLevel {
  std::uint64_t key = 0;
  Color color = Color::black;
  std::vector<Entry::Kind> kinds;
  int spine_slot = 0;
  std::vector<long long> graft_blacks;  // sized mode, per entry; 0 elsewhere
};

// A vertex of the limit tree, spine or graft.
struct NodeRef {
  std::uint64_t key = 0;
  int spine_level = 0;  // level of the spine vertex it hangs from
  int depth = 0;        // height in the tree
  Color color = Color::black;
  bool on_spine = true;
  int side = 0;  // -1 left of the spine, +1 right, 0 on the spine
};

struct SpineBudget {
  int max_spine_height = 10'000;
};

// The size-biased tree with a single spine. Spine level h is drawn from its
// own stream, so the realization never depends on how or when it is grown.
class SpineTree {
 public:
  SpineTree(int d, std::uint64_t seed, GraftMode mode = GraftMode::lazy, SpineBudget budget = {});

  int d() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  GraftMode mode() const { return mode_; }
  int realized_height() const { return static_cast<int>(levels_.size()) - 1; }
  void set_budget(SpineBudget b) { budget_ = b; }

  void grow_spine(int target_height);
  const SpineLevel& level(int h);

  NodeRef spine_node(int h);
  // Offspring kinds of any vertex; graft vertices derive them from their key.
  std::vector<Entry::Kind> offspring(const NodeRef& v);
  NodeRef child(const NodeRef& v, int entry);

 private:
  int d_;
  std::uint64_t seed_;
  GraftMode mode_;
  SpineBudget budget_;
  std::vector<SpineLevel> levels_;
};

struct SpineTruncation {
  TreeBall ball;
  std::vector<VertexId> spine;  // ids of spine vertices in ball
  std::vector<std::uint64_t> keys;
};

// B_k of the limit tree.
SpineTruncation truncate(SpineTree& t, int k);

// Charges of a truncation with the cut vertices at height k carrying their
// forced charge: 1 for black, d-1 for white.
ChargeReport truncation_charges(const TreeBall& tb, int d);

// m_k times the product of offspring masses over vertices below height k.
mpq_class spine_ball_prob(int d, const TreeBall& ball);

nlohmann::json to_json(const SpineTruncation& s);

}  // namespace blossom
