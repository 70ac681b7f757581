#include "blossom/sampler.hpp"

#include <algorithm>
#include <numeric>

#include "blossom/closure.hpp"
#include "blossom/gf.hpp"

namespace blossom {

SamplerContext::SamplerContext(int d, int n_max) : d_(d), n_max_(n_max) {
  if (d < 3) throw DomainError("d must be at least 3");
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  const auto& tab = coeff_table(d);
  b_.resize(n_max + 1);
  for (int k = 0; k <= n_max; ++k) b_[k] = tab.b(k);
  slot_.assign(d, std::vector<mpz_class>(n_max + 1));
  for (int j = 0; j < d; ++j)
    for (int r = 0; r <= n_max; ++r) slot_[j][r] = tab.one_plus_b_power(j, r);
}

mpz_class uniform_below(const mpz_class& total, Rng& rng) {
  if (total <= 0) throw DomainError("uniform_below needs a positive bound");
  const std::size_t bits = mpz_sizeinbase(total.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> buf(words);
  const unsigned top = static_cast<unsigned>(bits - 64 * (words - 1));
  const std::uint64_t mask = top == 64 ? ~0ULL : ((1ULL << top) - 1);
  mpz_class u;
  for (;;) {
    for (auto& w : buf) w = rng();
    buf.back() &= mask;
    mpz_import(u.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
    if (u < total) return u;
  }
}

namespace {

// Category 0 is a closing stem, category k >= 1 a black subtree with k blacks.
// Scans from both ends since the mass sits at small k and at k close to r.
int pick_slot(const SamplerContext& ctx, int j, int r, Rng& rng) {
  if (j == 1) return r;
  const mpz_class& total = ctx.slot(j, r);
  const mpz_class u = uniform_below(total, rng);
  auto weight = [&](int k) -> mpz_class {
    return k == 0 ? ctx.slot(j - 1, r) : ctx.b(k) * ctx.slot(j - 1, r - k);
  };
  mpz_class lo = 0, hi = total;
  int a = 0, z = r;
  while (a <= z) {
    mpz_class w = weight(a);
    if (u < lo + w) return a;
    lo += w;
    ++a;
    if (a > z) break;
    w = weight(z);
    if (u >= hi - w) return z;
    hi -= w;
    --z;
  }
  throw InternalConsistencyError("slot weights do not sum to their total");
}

}  // namespace

BlossomTree sample_tree(const SamplerContext& ctx, int n, Rng& rng) {
  if (n < 1) throw DomainError("n must be at least 1");
  if (n > ctx.n_max()) throw DomainError("sampler table too small for n");
  const int d = ctx.d();
  BlossomTree t;
  t.d = d;
  t.nodes.push_back({Color::black, std::vector<Entry>(d, Entry::open())});
  t.nodes.push_back({Color::white, {}});
  t.nodes[0].offspring[uniform_below(rng, d)] = Entry::make_child(1);

  struct Task {
    VertexId white;
    int blacks;
  };
  std::vector<Task> todo{{1, n - 1}};
  while (!todo.empty()) {
    Task task = todo.back();
    todo.pop_back();
    int r = task.blacks;
    std::vector<Entry> off;
    off.reserve(d - 1);
    for (int j = d - 1; j >= 1; --j) {
      const int k = pick_slot(ctx, j, r, rng);
      if (k == 0) {
        off.push_back(Entry::close());
        continue;
      }
      const auto black = static_cast<VertexId>(t.nodes.size());
      const auto white = black + 1;
      std::vector<Entry> boff(d - 1, Entry::open());
      boff[uniform_below(rng, d - 1)] = Entry::make_child(white);
      t.nodes.push_back({Color::black, std::move(boff)});
      t.nodes.push_back({Color::white, {}});
      off.push_back(Entry::make_child(black));
      todo.push_back({white, k - 1});
      r -= k;
    }
    if (r != 0) throw InternalConsistencyError("sampler left blacks unplaced");
    t.nodes[task.white].offspring = std::move(off);
  }
  return normalize_ids(t);
}

BlossomTree sample_tree_cycle(int d, int n, Rng& rng) {
  if (d < 3) throw DomainError("d must be at least 3");
  if (n < 1) throw DomainError("n must be at least 1");
  const long long S = static_cast<long long>(n) * (d - 1);
  // Partial Fisher-Yates: first n-1 entries are a uniform subset of slots.
  std::vector<long long> perm(S);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> chosen(S, 0);
  for (long long i = 0; i < n - 1; ++i) {
    long long j = i + static_cast<long long>(uniform_below(rng, S - i));
    std::swap(perm[i], perm[j]);
    chosen[perm[i]] = 1;
  }
  std::vector<int> kids(n, 0);
  for (long long s = 0; s < S; ++s)
    if (chosen[s]) ++kids[s / (d - 1)];
  // First minimum of the prefix sums of (kids - 1) marks the rotation.
  long long sum = 0, best = 1;
  int start = 0;
  for (int i = 0; i < n; ++i) {
    sum += kids[i] - 1;
    if (sum < best) {
      best = sum;
      start = (i + 1) % n;
    }
  }
  BlossomTree t;
  t.d = d;
  t.nodes.push_back({Color::black, std::vector<Entry>(d, Entry::open())});
  t.nodes.push_back({Color::white, {}});
  t.nodes[0].offspring[uniform_below(rng, d)] = Entry::make_child(1);
  struct Frame {
    VertexId white;
    int word;
    int slot;
  };
  int next_word = 0;
  std::vector<Frame> stack{{1, (start + next_word++) % n, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.slot == d - 1) {
      stack.pop_back();
      continue;
    }
    const int s = f.slot++;
    if (!chosen[static_cast<long long>(f.word) * (d - 1) + s]) {
      t.nodes[f.white].offspring.push_back(Entry::close());
      continue;
    }
    const auto black = static_cast<VertexId>(t.nodes.size());
    const auto white = black + 1;
    t.nodes[f.white].offspring.push_back(Entry::make_child(black));
    std::vector<Entry> boff(d - 1, Entry::open());
    boff[uniform_below(rng, d - 1)] = Entry::make_child(white);
    t.nodes.push_back({Color::black, std::move(boff)});
    t.nodes.push_back({Color::white, {}});
    if (next_word >= n) throw InternalConsistencyError("cycle lemma rotation is invalid");
    stack.push_back({white, (start + next_word++) % n, 0});
  }
  if (next_word != n) throw InternalConsistencyError("cycle lemma rotation is invalid");
  return normalize_ids(t);
}

PlanarMap sample_map(const SamplerContext& ctx, int n, Rng& rng) {
  return forget_marked_face(close_finite(sample_tree(ctx, n, rng)));
}

std::vector<std::vector<mpz_class>> slot_dp_recurrence(int d, int j_max, int r_max) {
  // b by the fixed point b = z(d-1)(1+b)^{d-1}, coefficient by coefficient.
  std::vector<mpz_class> b(r_max + 1, 0);
  std::vector<std::vector<mpz_class>> dp(j_max + 1, std::vector<mpz_class>(r_max + 1, 0));
  dp[0][0] = 1;
  // (1+B)^{d-1} up to z^{r-1} determines b[r]; grow r and the powers together.
  std::vector<std::vector<mpz_class>> pw(d, std::vector<mpz_class>(r_max + 1, 0));
  for (int j = 0; j < d; ++j) pw[j][0] = 1;
  for (int r = 1; r <= r_max; ++r) {
    b[r] = (d - 1) * pw[d - 1][r - 1];
    for (int j = 1; j < d; ++j) {
      mpz_class acc = pw[j - 1][r];
      for (int k = 1; k <= r; ++k) acc += b[k] * pw[j - 1][r - k];
      pw[j][r] = acc;
    }
  }
  for (int j = 1; j <= j_max; ++j)
    for (int r = 0; r <= r_max; ++r) {
      mpz_class acc = dp[j - 1][r];
      for (int k = 1; k <= r; ++k) acc += b[k] * dp[j - 1][r - k];
      dp[j][r] = acc;
    }
  return dp;
}

}  // namespace blossom
