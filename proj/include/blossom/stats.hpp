#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "blossom/common.hpp"

namespace blossom {

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

// Pearson test of counts against cell probabilities. Cells with zero expected
// mass must have zero counts.
inline ChiSquare chi_square(const std::vector<long long>& observed, const std::vector<double>& probs) {
  if (observed.size() != probs.size() || observed.size() < 2) throw DomainError("chi-square needs matching cells");
  long long total = 0;
  for (auto o : observed) total += o;
  ChiSquare r;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * static_cast<double>(total);
    if (e == 0) {
      if (observed[i] != 0) {
        r.statistic = INFINITY;
        r.p_value = 0;
        return r;
      }
      continue;
    }
    const double diff = static_cast<double>(observed[i]) - e;
    r.statistic += diff * diff / e;
    ++cells;
  }
  r.dof = cells - 1;
  if (r.dof < 1) return r;
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

inline double bonferroni(double alpha, int tests) { return alpha / std::max(1, tests); }

struct BinomialCheck {
  double frequency = 0;
  double sigma = 0;
  double z = 0;
  bool pass = true;
};

// |observed/n - p| <= width * sqrt(p(1-p)/n)
inline BinomialCheck binomial_check(long long observed, long long n, double p, double width = 3) {
  BinomialCheck c;
  if (n <= 0) throw DomainError("binomial check needs samples");
  c.frequency = static_cast<double>(observed) / static_cast<double>(n);
  c.sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
  const double dev = std::fabs(c.frequency - p);
  c.z = c.sigma > 0 ? dev / c.sigma : (dev == 0 ? 0 : INFINITY);
  c.pass = c.z <= width;
  return c;
}

}  // namespace blossom
