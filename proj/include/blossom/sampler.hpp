#pragma once

#include <vector>

#include <gmpxx.h>

#include "blossom/map.hpp"
#include "blossom/tree.hpp"

namespace blossom {

// Exact counts for the recursive sampler. slot(j, r) = [z^r](1+B)^j counts
// sequences of j white slots holding r black vertices in total.
class SamplerContext {
 public:
  SamplerContext(int d, int n_max);

  int d() const { return d_; }
  int n_max() const { return n_max_; }
  const mpz_class& slot(int j, int r) const { return slot_[j][r]; }
  const mpz_class& b(int k) const { return b_[k]; }

 private:
  int d_;
  int n_max_;
  std::vector<std::vector<mpz_class>> slot_;
  std::vector<mpz_class> b_;
};

// Uniform integer in [0, total).
mpz_class uniform_below(const mpz_class& total, Rng& rng);

// Uniform on T^d_n by the recursive method over exact counts.
BlossomTree sample_tree(const SamplerContext& ctx, int n, Rng& rng);

// Uniform on T^d_n through the cycle lemma on the breadth of white vertices:
// pick n-1 of the n(d-1) white slots, rotate to the unique valid Lukasiewicz
// word. Linear time, no big integers.
BlossomTree sample_tree_cycle(int d, int n, Rng& rng);

// Closure of a uniform tree with the marked face dropped.
PlanarMap sample_map(const SamplerContext& ctx, int n, Rng& rng);

// slot counts by the convolution recurrence; independent of SamplerContext.
std::vector<std::vector<mpz_class>> slot_dp_recurrence(int d, int j_max, int r_max);

}  // namespace blossom
