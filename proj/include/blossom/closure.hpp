#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "blossom/bgw.hpp"
#include "blossom/map.hpp"
#include "blossom/tree.hpp"

namespace blossom {

// Sign convention used throughout: reading stems in clockwise contour order,
// a closing stem acts as "(" and an opening stem as ")". The contour walk C
// goes up by one across an opening stem and down by one across a closing stem.

// Partner of every stem of the cyclic word, by stack reduction.
std::vector<int> cyclic_matching(const std::vector<Entry::Kind>& word);
// Same matching, reducing adjacent "( )" pairs in random order.
std::vector<int> random_order_matching(const std::vector<Entry::Kind>& word, Rng& rng);

// Closure of a tree in T^d: map vertex ids equal tree vertex ids, rotations
// are [parent, offspring...] (the root has no parent slot), the root corner is
// inherited and the marked face is the one holding the outer corners.
PlanarMap close_finite(const BlossomTree& t);

struct StemInfo {
  Entry::Kind kind;
  std::uint64_t vertex;  // NodeRef key, or tree vertex id for finite trees
  int entry;
  int spine_height;
  int tree_height;
};

struct MatchResult {
  enum class Kind { index, plus_infinity, minus_infinity, needs_deepening } kind;
  long long index = 0;
};

struct MatchWindow {
  long long k_minus = 0, k_plus = 0;
  long long x = 0;
  long long K_minus = 0, K_plus = 0;
  int R2 = 0, R_prime = 0;
};

class ContourCursor;

// Stem word indexed by Z with its walk. Index 0 is the first stem clockwise
// after the root corner, negative indices run counterclockwise from it.
class ContourProcess {
 public:
  enum class Kind { complete, periodic, growable };

  // A finite linear word at indices 0..n-1; nothing lies outside it.
  static ContourProcess from_word(const std::vector<Entry::Kind>& word);
  // The contour of a finite tree, repeated periodically.
  static ContourProcess from_finite_tree(const BlossomTree& t);
  // The contour of a limit tree, realized on demand.
  static ContourProcess from_spine(SpineTree& t, long long stem_budget = 1'000'000);

  ContourProcess(ContourProcess&&) noexcept;
  ContourProcess& operator=(ContourProcess&&) noexcept;
  ~ContourProcess();

  Kind kind() const { return kind_; }
  long long lo() const;
  long long hi() const;
  bool realized(long long k) const { return k >= lo() && k <= hi(); }
  // Number of stems of one period; periodic only.
  long long period() const { return static_cast<long long>(right_.size()); }
  const StemInfo& stem(long long k) const;
  // C(k) for lo() <= k <= hi()+1, with C(0) = 0.
  long long walk(long long k) const;

  // Growable only: realize every stem whose index lies in [lo, hi].
  void realize(long long lo, long long hi);
  // Growable only: realize every stem hanging from spine levels <= h.
  void realize_levels(int h);
  int realized_levels() const { return levels_; }

 private:
  ContourProcess() = default;
  void push_right();
  void push_left();

  Kind kind_ = Kind::complete;
  std::vector<StemInfo> right_;  // indices 0, 1, ...
  std::vector<StemInfo> left_;   // indices -1, -2, ...
  std::vector<long long> walk_right_;  // C(0..right_.size())
  std::vector<long long> walk_left_;   // C(-1), C(-2), ...
  long long budget_ = 0;
  int levels_ = -1;
  std::unique_ptr<ContourCursor> rcur_, lcur_;
};

// Partner of stem k; needs_deepening when the realized window is too short.
MatchResult match_stems(const ContourProcess& cp, long long k);

// Smallest interval around [k_minus, k_plus] that is closed under matching.
// nullopt when the walk does not come back to level x inside the realization.
std::optional<MatchWindow> stability_window(const ContourProcess& cp, long long k_minus, long long k_plus);
std::optional<MatchWindow> stability_window(const ContourProcess& cp, const std::vector<std::uint64_t>& vertices);

struct CloseBallOptions {
  int initial_radius = -1;  // spine radius of the first round; -1 means R+2
  long long stem_budget = 100'000'000;
  int spine_budget = 10'000;
};

// B_R of the closure of the limit tree, revealed lazily: each stem is matched
// by scanning the contour until the walk returns to its level. A round that
// would have to look beyond the current spine radius is retried with the
// radius doubled.
MapBall close_ball(SpineTree& t, int R, CloseBallOptions opt = {});
MapBall close_ball(int d, std::uint64_t seed, int R, CloseBallOptions opt = {});

// Same ball computed with realized windows: the contour is realized level by
// level, matched by stack inside a stability window, and B_R is read off the
// partial map. Explores whole grafts, so only suited to small cases.
std::optional<MapBall> close_ball_windowed(SpineTree& t, int R, int spine_levels, long long stem_budget = 2'000'000);

struct WalkStats {
  std::vector<long long> l_close, l_open, X, Y;  // per band k = 0..n
  std::vector<long long> R, S;                   // partial sums, k = 0..n
  std::vector<long long> C_at_R;                 // walk read at index R_k
  long long Y0() const { return Y.empty() ? 0 : Y[0]; }
  // C(R_k) = S_k + Y_0 for every k.
  bool identity_holds() const;
};

// Band k holds the stems right of the spine whose spine height is 2k-1 or 2k.
WalkStats spine_walk_stats(SpineTree& t, int n_levels, long long stem_budget = 100'000'000);

}  // namespace blossom
