#include "blossom/bgw.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include "blossom/gf.hpp"

namespace blossom {

namespace {

int tag_index(TypeTag t) { return static_cast<int>(t); }

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void check_d(int d) {
  if (d < 3) throw DomainError("d must be at least 3");
}

}  // namespace

std::vector<WordMass> offspring_law(int d, TypeTag type) {
  check_d(d);
  std::vector<WordMass> out;
  switch (type) {
    case TypeTag::root:
    case TypeTag::black: {
      const int len = type == TypeTag::root ? d : d - 1;
      for (int i = 0; i < len; ++i) {
        OffspringWord w(len, TypeTag::stem);
        w[i] = TypeTag::white;
        out.push_back({w, mpq_class(1, len)});
      }
      break;
    }
    case TypeTag::white: {
      const mpz_class den(static_cast<long>(ipow(d - 1, d - 1)));
      for (unsigned mask = 0; mask < (1u << (d - 1)); ++mask) {
        OffspringWord w(d - 1, TypeTag::stem);
        int k = 0;
        for (int i = 0; i < d - 1; ++i)
          if (mask & (1u << i)) {
            w[i] = TypeTag::black;
            ++k;
          }
        mpq_class mass(mpz_class(static_cast<long>(ipow(d - 2, d - 1 - k))), den);
        mass.canonicalize();
        out.push_back({w, mass});
      }
      break;
    }
    case TypeTag::stem:
      out.push_back({{}, 1});
      break;
  }
  return out;
}

std::vector<WordMass> size_biased_law(int d, TypeTag type) {
  auto law = offspring_law(d, type);
  if (type != TypeTag::white) return law;
  for (auto& wm : law) {
    long k = 0;
    for (TypeTag t : wm.word) k += t == TypeTag::black;
    wm.mass *= k;
  }
  return law;
}

bool MeanMatrix::eigen_check() const {
  for (int i = 0; i < 4; ++i) {
    mpq_class s = 0;
    for (int j = 0; j < 4; ++j) s += m[i][j] * b[j];
    if (s != b[i]) return false;
  }
  return true;
}

MeanMatrix mean_matrix(int d) {
  check_d(d);
  MeanMatrix mm;
  for (int i = 0; i < 4; ++i) {
    for (const auto& wm : offspring_law(d, static_cast<TypeTag>(i)))
      for (TypeTag t : wm.word) mm.m[i][tag_index(t)] += wm.mass;
    mm.b[i] = i == 3 ? 0 : d - 1;
  }
  return mm;
}

MeanMatrix mean_matrix_closed_form(int d) {
  check_d(d);
  MeanMatrix mm;
  const int rows[4][4] = {{0, 0, 1, d - 1}, {0, 0, 1, d - 2}, {0, 1, 0, d - 2}, {0, 0, 0, 0}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) mm.m[i][j] = rows[i][j];
    mm.b[i] = i == 3 ? 0 : d - 1;
  }
  return mm;
}

namespace {

// Loader's saddle-point evaluation of binomial probabilities; stays accurate
// for counts far beyond where lgamma differences lose precision.
double stirlerr(double n) {
  constexpr double S0 = 1.0 / 12, S1 = 1.0 / 360, S2 = 1.0 / 1260, S3 = 1.0 / 1680, S4 = 1.0 / 1188;
  if (n <= 15) return std::lgamma(n + 1) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2 * M_PI);
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

double dbinom(double x, double n, double p) {
  if (x == 0) return std::exp(n * std::log1p(-p));
  if (x == n) return std::exp(n * std::log(p));
  double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * (1 - p));
  return std::exp(lc) * std::sqrt(n / (2 * M_PI * x * (n - x)));
}

// P(floor(U^-2) = n), written without cancellation.
double envelope_mass(double n) {
  const double a = std::sqrt(n), b = std::sqrt(n + 1);
  return 1 / (a * b * (a + b));
}

double envelope_bound(int d) {
  static std::mutex mu;
  static std::vector<double> cache;
  std::lock_guard lock(mu);
  if (static_cast<int>(cache.size()) <= d) cache.resize(d + 1, 0);
  if (cache[d] == 0) {
    double best = 0;
    for (long long n = 1; n <= 100000; ++n) best = std::max(best, graft_blacks_pmf(d, n) / envelope_mass(n));
    for (double n = 1e5; n < 1e18; n *= 3) best = std::max(best, graft_blacks_pmf(d, (long long)n) / envelope_mass(n));
    cache[d] = best * 1.01;
  }
  return cache[d];
}

}  // namespace

double graft_blacks_pmf(int d, long long n) {
  check_d(d);
  if (n < 1) return 0;
  const double N = static_cast<double>(n) * (d - 1);
  return dbinom(static_cast<double>(n - 1), N, 1.0 / (d - 1)) / static_cast<double>(n);
}

template <class G>
long long sample_graft_blacks(int d, G& rng) {
  const double M = envelope_bound(d);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    // floor(U^-2) has tail n^{-1/2}, the same order as the true law.
    const double u = 1.0 - unit(rng);
    const double x = std::floor(1.0 / (u * u));
    // Stem counts of a few such grafts must still fit in 64 bits.
    if (x > 1e17 / (d - 1)) continue;
    const auto n = static_cast<long long>(x);
    if (unit(rng) * M * envelope_mass(x) <= graft_blacks_pmf(d, n)) return n;
  }
}

template long long sample_graft_blacks<Rng>(int, Rng&);
template long long sample_graft_blacks<KeyStream>(int, KeyStream&);

SpineTree::SpineTree(int d, std::uint64_t seed, GraftMode mode, SpineBudget budget)
    : d_(d), seed_(seed), mode_(mode), budget_(budget) {
  check_d(d);
  if (d > 16) throw DomainError("limit tree supports d <= 16");
}

void SpineTree::grow_spine(int target_height) {
  if (target_height < 0) throw DomainError("negative spine height");
  (void)level(target_height);
}

const SpineLevel& SpineTree::level(int h) {
  if (h > budget_.max_spine_height)
    throw ResourceError("spine height budget exceeded at seed " + std::to_string(seed_));
  while (static_cast<int>(levels_.size()) <= h) {
    const int lv = static_cast<int>(levels_.size());
    KeyStream rng{mix_seed(seed_, static_cast<std::uint64_t>(lv))};
    SpineLevel L;
    L.key = mix_seed(mix_seed(seed_, 0x5350494eULL), static_cast<std::uint64_t>(lv));
    if (lv == 0 || lv % 2 == 0) {
      const int len = lv == 0 ? d_ : d_ - 1;
      L.color = Color::black;
      L.kinds.assign(len, Entry::Kind::open);
      L.spine_slot = static_cast<int>(uniform_below(rng, len));
      L.kinds[L.spine_slot] = Entry::Kind::child;
    } else {
      // Size-biased white word: weight (#black) (d-2)^{d-1-#black}, total (d-1)^{d-1}.
      L.color = Color::white;
      const int slots = d_ - 1;
      const auto total = static_cast<std::uint64_t>(ipow(d_ - 1, slots));
      std::uint64_t u = uniform_below(rng, total);
      unsigned mask = 0;
      for (;; ++mask) {
        const int k = __builtin_popcount(mask);
        const auto w = static_cast<std::uint64_t>(k * ipow(d_ - 2, slots - k));
        if (u < w) break;
        u -= w;
      }
      L.kinds.assign(slots, Entry::Kind::close);
      std::vector<int> blacks;
      for (int i = 0; i < slots; ++i)
        if (mask & (1u << i)) {
          L.kinds[i] = Entry::Kind::child;
          blacks.push_back(i);
        }
      L.spine_slot = blacks[uniform_below(rng, blacks.size())];
    }
    L.graft_blacks.assign(L.kinds.size(), 0);
    if (mode_ == GraftMode::sized)
      for (std::size_t i = 0; i < L.kinds.size(); ++i)
        if (L.kinds[i] == Entry::Kind::child && static_cast<int>(i) != L.spine_slot && L.color == Color::white)
          L.graft_blacks[i] = sample_graft_blacks(d_, rng);
    levels_.push_back(std::move(L));
  }
  return levels_[h];
}

NodeRef SpineTree::spine_node(int h) {
  const auto& L = level(h);
  return {L.key, h, h, L.color, true, 0};
}

std::vector<Entry::Kind> SpineTree::offspring(const NodeRef& v) {
  if (v.on_spine) return level(v.spine_level).kinds;
  if (mode_ == GraftMode::sized) throw DomainError("graft interiors are not realized in sized mode");
  KeyStream rng{v.key};
  if (v.color == Color::black) {
    std::vector<Entry::Kind> k(d_ - 1, Entry::Kind::open);
    k[uniform_below(rng, d_ - 1)] = Entry::Kind::child;
    return k;
  }
  std::vector<Entry::Kind> k(d_ - 1, Entry::Kind::close);
  for (auto& e : k)
    if (uniform_below(rng, d_ - 1) == 0) e = Entry::Kind::child;
  return k;
}

NodeRef SpineTree::child(const NodeRef& v, int entry) {
  if (v.on_spine) {
    const auto& L = level(v.spine_level);
    if (entry == L.spine_slot) return spine_node(v.spine_level + 1);
    return {mix_seed(v.key, static_cast<std::uint64_t>(entry) + 1), v.spine_level, v.depth + 1, opposite(v.color),
            false, entry < L.spine_slot ? 1 : -1};
  }
  return {mix_seed(v.key, static_cast<std::uint64_t>(entry) + 1), v.spine_level, v.depth + 1, opposite(v.color), false,
          v.side};
}

SpineTruncation truncate(SpineTree& t, int k) {
  if (k < 0) throw DomainError("negative truncation height");
  SpineTruncation out;
  auto& ball = out.ball;
  ball.k = k;
  ball.ball.d = t.d();
  struct Frame {
    NodeRef ref;
    VertexId id;
  };
  auto add = [&](const NodeRef& r) {
    auto id = static_cast<VertexId>(ball.ball.nodes.size());
    ball.ball.nodes.push_back({r.color, {}});
    out.keys.push_back(r.key);
    if (r.on_spine) out.spine.push_back(id);
    if (r.depth == k) ++ball.m_k;
    if (r.color == Color::black) ++ball.n_k;
    return id;
  };
  std::vector<Frame> stack;
  const NodeRef root = t.spine_node(0);
  stack.push_back({root, add(root)});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.ref.depth >= k) continue;
    const auto kinds = t.offspring(f.ref);
    std::vector<Entry> off;
    std::vector<Frame> kids;
    for (int i = 0; i < static_cast<int>(kinds.size()); ++i) {
      if (kinds[i] != Entry::Kind::child) {
        off.push_back({kinds[i], -1});
        continue;
      }
      NodeRef c = t.child(f.ref, i);
      VertexId id = add(c);
      off.push_back(Entry::make_child(id));
      kids.push_back({c, id});
    }
    ball.ball.nodes[f.id].offspring = std::move(off);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

ChargeReport truncation_charges(const TreeBall& tb, int d) {
  const auto& t = tb.ball;
  check_well_formed(t);
  auto lay = layout(t);
  ChargeReport rep;
  rep.charge_of.assign(t.nodes.size(), 0);
  for (auto it = lay.preorder.rbegin(); it != lay.preorder.rend(); ++it) {
    const VertexId v = *it;
    if (lay.height[v] == tb.k && tb.k > 0) {
      rep.charge_of[v] = t.nodes[v].color == Color::black ? 1 : d - 1;
      continue;
    }
    long long c = 0;
    for (const Entry& e : t.nodes[v].offspring) {
      if (e.kind == Entry::Kind::close) ++c;
      else if (e.kind == Entry::Kind::open) --c;
      else c += rep.charge_of[e.child];
    }
    rep.charge_of[v] = c;
  }
  rep.total = rep.charge_of[t.root];
  return rep;
}

mpq_class spine_ball_prob(int d, const TreeBall& ball) {
  check_ball_shape(d, ball);
  const auto& t = ball.ball;
  auto lay = layout(t);
  mpq_class p = mpz_class(static_cast<long>(ball.m_k));
  const mpz_class white_den = static_cast<long>(ipow(d - 1, d - 1));
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    if (lay.height[v] >= ball.k) continue;
    if (static_cast<VertexId>(v) == t.root) {
      p *= mpq_class(1, d);
    } else if (t.nodes[v].color == Color::black) {
      p *= mpq_class(1, d - 1);
    } else {
      int j = 0;
      for (const Entry& e : t.nodes[v].offspring) j += e.is_child();
      p *= mpq_class(mpz_class(static_cast<long>(ipow(d - 2, d - 1 - j))), white_den);
    }
  }
  p.canonicalize();
  return p;
}

nlohmann::json to_json(const SpineTruncation& s) {
  auto j = to_json(s.ball.ball);
  j["k"] = s.ball.k;
  j["spine"] = s.spine;
  return j;
}

}  // namespace blossom
