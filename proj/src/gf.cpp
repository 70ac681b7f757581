#include "blossom/gf.hpp"

#include <memory>

namespace blossom {

namespace {

mpz_class binom(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

mpz_class pow_z(long long base, long long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(e));
  return r;
}

mpz_class Z(long long v) { return mpz_class(static_cast<long>(v)); }

mpz_class exact_div(const mpz_class& a, const mpz_class& b) {
  if (a % b != 0) throw InternalConsistencyError("inexact division in coefficient formula");
  return a / b;
}

void check_d(int d) {
  if (d < 3) throw DomainError("d must be at least 3");
}

}  // namespace

CoeffTable::CoeffTable(int d) : d_(d) {
  check_d(d);
  b_.push_back(0);
}

void CoeffTable::reserve(int n_max) { (void)b(n_max); }

mpz_class CoeffTable::b(int n) const {
  if (n < 0) throw DomainError("negative coefficient index");
  std::lock_guard lock(mu_);
  while (static_cast<int>(b_.size()) <= n) {
    const long long k = static_cast<long long>(b_.size());
    b_.push_back(exact_div(pow_z(d_ - 1, k) * binom((d_ - 1) * k, k - 1), Z(k)));
  }
  return b_[n];
}

mpz_class CoeffTable::w_power(int m, int n) const {
  if (m < 0 || n < 0) throw DomainError("negative index");
  std::lock_guard lock(mu_);
  auto key = std::make_pair(m, n);
  if (auto it = w_pow_.find(key); it != w_pow_.end()) return it->second;
  mpz_class v = one_plus_b_power(static_cast<long long>(d_ - 1) * m, n);
  w_pow_.emplace(key, v);
  return v;
}

mpz_class CoeffTable::one_plus_b_power(long long a, int n) const {
  if (a < 0 || n < 0) throw DomainError("negative index");
  if (n == 0) return 1;
  if (a == 0) return 0;
  // Lagrange inversion with H(u) = (1+u)^a and phi(u) = (d-1)(1+u)^{d-1}.
  return exact_div(Z(a) * pow_z(d_ - 1, n) * binom(a - 1 + static_cast<long long>(d_ - 1) * n, n - 1), n);
}

mpz_class CoeffTable::b_power(int m, int n) const {
  if (m < 0 || n < 0) throw DomainError("negative index");
  if (m == 0) return n == 0 ? 1 : 0;
  if (n < m) return 0;
  return exact_div(Z(m) * pow_z(d_ - 1, n) * binom(static_cast<long long>(d_ - 1) * n, n - m), n);
}

const CoeffTable& coeff_table(int d) {
  check_d(d);
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CoeffTable>> tables;
  std::lock_guard lock(mu);
  auto& slot = tables[d];
  if (!slot) slot = std::make_unique<CoeffTable>(d);
  return *slot;
}

mpz_class coeff_B(int d, int n) { return coeff_table(d).b(n); }
mpz_class coeff_W_power(int d, int n, int m) { return coeff_table(d).w_power(m, n); }
mpz_class coeff_B_power(int d, int n, int m) { return coeff_table(d).b_power(m, n); }

mpz_class count_plane_maps(int d, int n) {
  if (n < 1) throw DomainError("n must be at least 1");
  return Z(d) * coeff_W_power(d, n - 1, 1);
}

mpz_class count_rooted_maps(int d, int n) {
  return exact_div(count_plane_maps(d, n), Z(2 + static_cast<long long>(d - 2) * n));
}

mpq_class rho(int d) {
  check_d(d);
  mpq_class r(pow_z(d - 2, d - 2), pow_z(d - 1, d));
  r.canonicalize();
  return r;
}

void check_ball_shape(int d, const TreeBall& tb) {
  const auto& t = tb.ball;
  check_well_formed(t);
  if (t.nodes[t.root].color != Color::black) throw DomainError("ball root must be black");
  auto lay = layout(t);
  long long m = 0, nb = 0;
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    const auto& node = t.nodes[v];
    if (node.color == Color::black) ++nb;
    if (lay.height[v] > tb.k) throw DomainError("ball deeper than its radius");
    if (lay.height[v] == tb.k) {
      ++m;
      if (!node.offspring.empty()) throw DomainError("height-k vertex keeps offspring");
      continue;
    }
    const std::size_t want = static_cast<VertexId>(v) == t.root ? d : d - 1;
    if (node.offspring.size() != want) throw DomainError("offspring size does not match d");
    if (node.color == Color::black) {
      int kids = 0;
      for (const Entry& e : node.offspring) kids += e.is_child();
      if (kids != 1) throw DomainError("black vertex needs exactly one white child");
    }
  }
  if (m != tb.m_k || nb != tb.n_k) throw DomainError("ball counts do not match its contents");
}

namespace {

std::vector<mpz_class> series_mul(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  std::vector<mpz_class> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0)
      for (std::size_t j = 0; i + j < c.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<mpz_class> one_plus_power(const std::vector<mpz_class>& b, int e) {
  std::vector<mpz_class> base(b), out(b.size());
  base[0] += 1;
  out[0] = 1;
  for (int i = 0; i < e; ++i) out = series_mul(out, base);
  return out;
}

}  // namespace

std::vector<mpz_class> b_series_iteration(int d, int n_max) {
  if (d < 3) throw DomainError("d must be at least 3");
  if (n_max < 0) throw DomainError("negative order");
  std::vector<mpz_class> b(n_max + 1);
  // Each round fixes one more coefficient.
  for (int round = 0; round <= n_max; ++round) {
    auto w = one_plus_power(b, d - 1);
    std::vector<mpz_class> next(n_max + 1);
    for (int i = 1; i <= n_max; ++i) next[i] = Z(d - 1) * w[i - 1];
    b = std::move(next);
  }
  return b;
}

std::vector<mpz_class> w_series_iteration(int d, int n_max) {
  return one_plus_power(b_series_iteration(d, n_max), d - 1);
}

ExactProbability ball_prob_finite(int d, int n, const TreeBall& ball) {
  check_ball_shape(d, ball);
  if (n < 1) throw DomainError("n must be at least 1");
  if (ball.k == 0) return 1;
  if (n < ball.n_k) return 0;
  const auto& tab = coeff_table(d);
  const int m = static_cast<int>(ball.m_k);
  const int rest = n - static_cast<int>(ball.n_k);
  mpz_class num = ball.k % 2 == 1 ? tab.w_power(m, rest) : tab.b_power(m, rest + m);
  mpq_class p(num, Z(d) * tab.w_power(1, n - 1));
  p.canonicalize();
  return p;
}

ExactProbability ball_prob_limit(int d, const TreeBall& ball) {
  check_ball_shape(d, ball);
  if (ball.k == 0) return 1;
  const long long m = ball.m_k;
  mpq_class r = rho(d);
  mpq_class p = Z(m);
  for (long long i = 0; i < ball.n_k; ++i) p *= r;
  p *= mpq_class((d - 1) * (d - 2), d);
  mpq_class ratio(d - 1, d - 2);
  ratio.canonicalize();
  for (long long i = 0; i < (d - 1) * m; ++i) p *= ratio;
  if (ball.k % 2 == 0)
    for (long long i = 0; i < m; ++i) p *= Z(d - 1);
  p.canonicalize();
  return p;
}

ExactProbability odd_ball_ratio_closed_form(int d, int n, long long m, long long n_k) {
  if (n < n_k) return 0;
  const long long rest = n - n_k;
  const long long a = (d - 1) * m;
  // d [z^{n-1}] W = d (d-1)^{n-1} C((d-1)n, n) / ((d-2)n + 1)
  mpz_class den = Z(d) * pow_z(d - 1, n - 1) * binom(static_cast<long long>(d - 1) * n, n);
  mpz_class num = Z(static_cast<long long>(d - 2) * n + 1);
  if (rest > 0) {
    num *= Z(a) * pow_z(d - 1, rest) * binom(a - 1 + (d - 1) * rest, rest - 1);
    den *= Z(rest);
  }
  mpq_class p(num, den);
  p.canonicalize();
  return p;
}

}  // namespace blossom
