#pragma once

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "blossom/tree.hpp"

namespace blossom {

using ExactProbability = mpq_class;

// gmpxx has no long long overloads.
inline mpz_class to_mpz(long long v) {
  mpz_class z;
  mpz_set_si(z.get_mpz_t(), static_cast<long>(v));
  return z;
}

// Coefficients of B(z) = z(d-1)(1+B(z))^{d-1} and W(z) = (1+B(z))^{d-1}.
// b[] grows append-only under a lock; powers are memoized.
class CoeffTable {
 public:
  explicit CoeffTable(int d);

  int d() const { return d_; }
  void reserve(int n_max);

  mpz_class b(int n) const;
  // [z^n] W^m
  mpz_class w_power(int m, int n) const;
  // [z^n] B^m
  mpz_class b_power(int m, int n) const;
  // [z^n] (1+B)^a
  mpz_class one_plus_b_power(long long a, int n) const;

 private:
  int d_;
  mutable std::mutex mu_;
  mutable std::vector<mpz_class> b_;
  mutable std::map<std::pair<int, int>, mpz_class> w_pow_;
};

// Shared table per d, built lazily.
const CoeffTable& coeff_table(int d);

mpz_class coeff_B(int d, int n);
mpz_class coeff_W_power(int d, int n, int m);
mpz_class coeff_B_power(int d, int n, int m);
mpz_class count_plane_maps(int d, int n);
mpz_class count_rooted_maps(int d, int n);
mpq_class rho(int d);

// Balls handed to the probability formulas must look like the top of a tree
// in T^d: black root, full offspring strictly below height k, bare leaves at
// height k. Throws DomainError otherwise.
void check_ball_shape(int d, const TreeBall& ball);

// Coefficients 0..n_max of B and of W = (1+B)^{d-1}, by iterating
// B <- z(d-1)(1+B)^{d-1} on truncated power series. Slow; a cross-check.
std::vector<mpz_class> b_series_iteration(int d, int n_max);
std::vector<mpz_class> w_series_iteration(int d, int n_max);

// P(B_k(T_n) = ball) for T_n uniform on T^d_n.
ExactProbability ball_prob_finite(int d, int n, const TreeBall& ball);
// Limit as n -> infinity.
ExactProbability ball_prob_limit(int d, const TreeBall& ball);

// Binomial closed form of the odd-k ratio, written independently of the
// coefficient routines; used as a cross-check.
ExactProbability odd_ball_ratio_closed_form(int d, int n, long long m, long long n_k);

}  // namespace blossom
