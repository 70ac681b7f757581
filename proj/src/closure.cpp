#include "blossom/closure.hpp"

#include <algorithm>
#include <climits>
#include <string>

namespace blossom {

namespace {

int step_of(Entry::Kind k) { return k == Entry::Kind::open ? 1 : -1; }

}  // namespace

std::vector<int> cyclic_matching(const std::vector<Entry::Kind>& word) {
  const int n = static_cast<int>(word.size());
  long long c = 0, best = 0;
  int start = 0;
  for (int i = 0; i < n; ++i) {
    c += step_of(word[i]);
    if (c > best) {
      best = c;
      start = (i + 1) % n;
    }
  }
  if (c != 0) throw DomainError("unmatched stems: stem counts differ");
  std::vector<int> partner(n, -1), stack;
  for (int s = 0; s < n; ++s) {
    const int i = (start + s) % n;
    if (word[i] == Entry::Kind::close) {
      stack.push_back(i);
    } else {
      if (stack.empty()) throw InternalConsistencyError("rotation at the walk maximum is not balanced");
      partner[i] = stack.back();
      partner[stack.back()] = i;
      stack.pop_back();
    }
  }
  return partner;
}

std::vector<int> random_order_matching(const std::vector<Entry::Kind>& word, Rng& rng) {
  const int n = static_cast<int>(word.size());
  std::vector<int> partner(n, -1);
  // Live stems form a cyclic doubly linked list; reducible pairs are a close
  // immediately followed by an open among live stems.
  std::vector<int> nxt(n), prv(n);
  for (int i = 0; i < n; ++i) {
    nxt[i] = (i + 1) % n;
    prv[i] = (i + n - 1) % n;
  }
  int live = n;
  long long opens = std::count(word.begin(), word.end(), Entry::Kind::open);
  if (opens * 2 != n) throw DomainError("unmatched stems: stem counts differ");
  std::vector<char> alive(n, 1);
  while (live > 0) {
    std::vector<int> cand;
    for (int i = 0; i < n; ++i)
      if (alive[i] && word[i] == Entry::Kind::close && word[nxt[i]] == Entry::Kind::open && nxt[i] != i)
        cand.push_back(i);
    if (cand.empty()) throw InternalConsistencyError("no reducible pair left");
    const int i = cand[uniform_below(rng, cand.size())];
    const int j = nxt[i];
    partner[i] = j;
    partner[j] = i;
    alive[i] = alive[j] = 0;
    live -= 2;
    if (live > 0) {
      const int a = prv[i], b = nxt[j];
      nxt[a] = b;
      prv[b] = a;
    }
  }
  return partner;
}

PlanarMap close_finite(const BlossomTree& t) {
  check_well_formed(t);
  if (!validate_regular(t, t.d)) throw DomainError("tree is not d-regular");
  auto rep = compute_charges(t);
  if (rep.total != 0) throw DomainError("unmatched stems: total charge is " + std::to_string(rep.total));
  if (!is_well_charged(t)) throw DomainError("tree violates the charge conditions");

  PlanarMap m;
  m.d = t.d;
  std::vector<HalfEdgeId> base(t.nodes.size());
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    const bool is_root = static_cast<VertexId>(v) == t.root;
    const int deg = static_cast<int>(t.nodes[v].offspring.size()) + (is_root ? 0 : 1);
    base[v] = static_cast<HalfEdgeId>(m.half_edges.size());
    m.add_vertex(t.nodes[v].color, deg);
  }
  auto he = [&](VertexId v, int entry) { return base[v] + entry + (v == t.root ? 0 : 1); };
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    const auto& off = t.nodes[v].offspring;
    for (int i = 0; i < static_cast<int>(off.size()); ++i)
      if (off[i].is_child()) m.link(he(static_cast<VertexId>(v), i), base[off[i].child]);
  }
  auto stems = contour_stems(t);
  std::vector<Entry::Kind> word;
  word.reserve(stems.size());
  for (const auto& s : stems) word.push_back(s.kind);
  auto partner = cyclic_matching(word);
  for (std::size_t i = 0; i < stems.size(); ++i)
    if (static_cast<int>(i) < partner[i])
      m.link(he(stems[i].vertex, stems[i].entry), he(stems[partner[i]].vertex, stems[partner[i]].entry));
  m.root = {t.root, t.root_corner};
  // The corner before the stem where the walk peaks is not under any chord.
  long long c = 0, best = 0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    c += step_of(word[i]);
    if (c > best) {
      best = c;
      peak = (i + 1) % word.size();
    }
  }
  if (!stems.empty()) m.marked_face = he(stems[peak].vertex, stems[peak].entry);
  return m;
}

// Walks the bi-infinite contour of a limit tree one stem at a time. The bottom
// frame is always a spine vertex; frames above it descend into one graft.
class ContourCursor {
 public:
  struct Frame {
    NodeRef node;
    std::vector<Entry::Kind> kinds;
    int idx;
  };

  // Positioned on stem 0.
  ContourCursor(SpineTree& t, int spine_cap) : t_(t), cap_(spine_cap) {
    stack_.push_back(spine_frame(0, 0));
    settle_forward();
  }

  // Positioned on a given stem entry of a vertex reached by `path`.
  ContourCursor(SpineTree& t, int spine_cap, int spine_level, const std::vector<int>& path, int entry)
      : t_(t), cap_(spine_cap) {
    stack_.push_back(spine_frame(spine_level, 0));
    for (int e : path) {
      stack_.back().idx = e;
      NodeRef c = t_.child(stack_.back().node, e);
      stack_.push_back({c, t_.offspring(c), 0});
    }
    stack_.back().idx = entry;
    if (stack_.back().kinds[entry] == Entry::Kind::child) throw InternalConsistencyError("cursor placed on a child");
  }

  void set_cap(int cap) { cap_ = cap; }
  Entry::Kind kind() const { return stack_.back().kinds[stack_.back().idx]; }
  const NodeRef& node() const { return stack_.back().node; }
  int entry() const { return stack_.back().idx; }
  int spine_height() const { return stack_.front().node.spine_level; }
  const std::vector<Frame>& frames() const { return stack_; }

  void advance() {
    ++stack_.back().idx;
    settle_forward();
  }

  void retreat() {
    --stack_.back().idx;
    settle_backward();
  }

 private:
  Frame spine_frame(int h, int idx) {
    if (h > cap_) throw NeedsDeepening("contour scan passed the spine radius");
    NodeRef n = t_.spine_node(h);
    return {n, t_.level(h).kinds, idx};
  }

  int slot(int h) { return t_.level(h).spine_slot; }

  void settle_forward() {
    for (;;) {
      Frame& f = stack_.back();
      const int len = static_cast<int>(f.kinds.size());
      if (f.idx < len) {
        if (f.kinds[f.idx] != Entry::Kind::child) return;
        if (f.node.on_spine && f.idx == slot(f.node.spine_level)) {
          stack_.back() = spine_frame(f.node.spine_level + 1, 0);
        } else {
          NodeRef c = t_.child(f.node, f.idx);
          stack_.push_back({c, t_.offspring(c), 0});
        }
        continue;
      }
      if (stack_.size() > 1) {
        stack_.pop_back();
        ++stack_.back().idx;
        continue;
      }
      const int h = f.node.spine_level;
      if (h == 0) f.idx = 0;
      else stack_.back() = spine_frame(h - 1, slot(h - 1) + 1);
    }
  }

  void settle_backward() {
    for (;;) {
      Frame& f = stack_.back();
      if (f.idx >= 0) {
        if (f.kinds[f.idx] != Entry::Kind::child) return;
        if (f.node.on_spine && f.idx == slot(f.node.spine_level)) {
          Frame nf = spine_frame(f.node.spine_level + 1, 0);
          nf.idx = static_cast<int>(nf.kinds.size()) - 1;
          stack_.back() = std::move(nf);
        } else {
          NodeRef c = t_.child(f.node, f.idx);
          auto kinds = t_.offspring(c);
          const int last = static_cast<int>(kinds.size()) - 1;
          stack_.push_back({c, std::move(kinds), last});
        }
        continue;
      }
      if (stack_.size() > 1) {
        stack_.pop_back();
        --stack_.back().idx;
        continue;
      }
      const int h = f.node.spine_level;
      if (h == 0) f.idx = static_cast<int>(f.kinds.size()) - 1;
      else stack_.back() = spine_frame(h - 1, slot(h - 1) - 1);
    }
  }

  SpineTree& t_;
  int cap_;
  std::vector<Frame> stack_;
};

namespace {

StemInfo info_of(const ContourCursor& c) {
  return {c.kind(), c.node().key, c.entry(), c.spine_height(), c.node().depth};
}

}  // namespace

ContourProcess::ContourProcess(ContourProcess&&) noexcept = default;
ContourProcess& ContourProcess::operator=(ContourProcess&&) noexcept = default;
ContourProcess::~ContourProcess() = default;

ContourProcess ContourProcess::from_word(const std::vector<Entry::Kind>& word) {
  ContourProcess cp;
  cp.kind_ = Kind::complete;
  cp.walk_right_.push_back(0);
  for (auto k : word) {
    cp.right_.push_back({k, 0, 0, 0, 0});
    cp.walk_right_.push_back(cp.walk_right_.back() + step_of(k));
  }
  return cp;
}

ContourProcess ContourProcess::from_finite_tree(const BlossomTree& t) {
  ContourProcess cp;
  cp.kind_ = Kind::periodic;
  auto lay = layout(t);
  cp.walk_right_.push_back(0);
  for (const auto& s : contour_stems(t)) {
    cp.right_.push_back({s.kind, static_cast<std::uint64_t>(s.vertex), s.entry, lay.height[s.vertex], lay.height[s.vertex]});
    cp.walk_right_.push_back(cp.walk_right_.back() + step_of(s.kind));
  }
  if (cp.walk_right_.back() != 0) throw DomainError("finite contour must have total charge 0");
  if (cp.right_.empty()) throw DomainError("finite contour has no stems");
  return cp;
}

ContourProcess ContourProcess::from_spine(SpineTree& t, long long stem_budget) {
  ContourProcess cp;
  cp.kind_ = Kind::growable;
  cp.budget_ = stem_budget;
  cp.walk_right_.push_back(0);
  cp.rcur_ = std::make_unique<ContourCursor>(t, INT_MAX);
  cp.lcur_ = std::make_unique<ContourCursor>(t, INT_MAX);
  cp.lcur_->retreat();
  return cp;
}

long long ContourProcess::lo() const {
  if (kind_ == Kind::periodic) return LLONG_MIN / 4;
  return -static_cast<long long>(left_.size());
}

long long ContourProcess::hi() const {
  if (kind_ == Kind::periodic) return LLONG_MAX / 4;
  return static_cast<long long>(right_.size()) - 1;
}

const StemInfo& ContourProcess::stem(long long k) const {
  if (kind_ == Kind::periodic) {
    const auto n = static_cast<long long>(right_.size());
    return right_[((k % n) + n) % n];
  }
  if (!realized(k)) throw NeedsDeepening("stem index outside the realized window");
  return k >= 0 ? right_[k] : left_[-k - 1];
}

long long ContourProcess::walk(long long k) const {
  if (kind_ == Kind::periodic) {
    const auto n = static_cast<long long>(right_.size());
    return walk_right_[((k % n) + n) % n];
  }
  if (k < lo() || k > hi() + 1) throw NeedsDeepening("walk index outside the realized window");
  return k >= 0 ? walk_right_[k] : walk_left_[-k - 1];
}

void ContourProcess::push_right() {
  if (static_cast<long long>(right_.size() + left_.size()) >= budget_)
    throw ResourceError("contour realization budget exhausted");
  right_.push_back(info_of(*rcur_));
  walk_right_.push_back(walk_right_.back() + step_of(right_.back().kind));
  rcur_->advance();
}

void ContourProcess::push_left() {
  if (static_cast<long long>(right_.size() + left_.size()) >= budget_)
    throw ResourceError("contour realization budget exhausted");
  left_.push_back(info_of(*lcur_));
  const long long after = walk_left_.empty() ? 0 : walk_left_.back();
  walk_left_.push_back(after - step_of(left_.back().kind));
  lcur_->retreat();
}

void ContourProcess::realize(long long lo_idx, long long hi_idx) {
  if (kind_ != Kind::growable) return;
  while (static_cast<long long>(right_.size()) <= hi_idx) push_right();
  while (static_cast<long long>(left_.size()) < -lo_idx) push_left();
}

void ContourProcess::realize_levels(int h) {
  if (kind_ != Kind::growable) return;
  while (rcur_->spine_height() <= h) push_right();
  while (lcur_->spine_height() <= h) push_left();
  levels_ = std::max(levels_, h);
}

MatchResult match_stems(const ContourProcess& cp, long long k) {
  using K = MatchResult::Kind;
  if (!cp.realized(k)) return {K::needs_deepening, 0};
  const bool periodic = cp.kind() == ContourProcess::Kind::periodic;
  const auto& s = cp.stem(k);
  const long long ck = cp.walk(k);
  if (s.kind == Entry::Kind::close) {
    const long long end = periodic ? k + cp.period() : cp.hi();
    for (long long j = k + 1; j <= end; ++j)
      if (cp.stem(j).kind == Entry::Kind::open && cp.walk(j) == ck - 1) return {K::index, j};
    if (periodic) throw InternalConsistencyError("periodic stem without partner");
    return {cp.kind() == ContourProcess::Kind::complete ? K::plus_infinity : K::needs_deepening, 0};
  }
  const long long end = periodic ? k - cp.period() : cp.lo();
  for (long long j = k - 1; j >= end; --j)
    if (cp.stem(j).kind == Entry::Kind::close && cp.walk(j) == ck + 1) return {K::index, j};
  if (periodic) throw InternalConsistencyError("periodic stem without partner");
  return {cp.kind() == ContourProcess::Kind::complete ? K::minus_infinity : K::needs_deepening, 0};
}

std::optional<MatchWindow> stability_window(const ContourProcess& cp, long long a, long long b) {
  if (a > b) throw DomainError("empty stem interval");
  MatchWindow w;
  w.k_minus = a;
  w.k_plus = b;
  if (cp.kind() == ContourProcess::Kind::periodic) {
    // The whole finite word is closed under matching.
    const long long n = cp.period();
    w.x = 0;
    for (long long i = 0; i < n; ++i) {
      w.x = std::max(w.x, cp.walk(i));
      w.R_prime = std::max(w.R_prime, cp.stem(i).tree_height);
    }
    w.K_minus = 0;
    w.K_plus = n - 1;
    w.R2 = w.R_prime;
    return w;
  }
  if (!cp.realized(a) || !cp.realized(b)) return std::nullopt;
  w.x = LLONG_MIN;
  for (long long k = a; k <= b + 1; ++k) w.x = std::max(w.x, cp.walk(k));
  long long P = a;
  while (cp.walk(P) < w.x) {
    if (P == cp.lo()) {
      if (cp.kind() == ContourProcess::Kind::complete) break;
      return std::nullopt;
    }
    --P;
  }
  long long Q = b + 1;
  while (cp.walk(Q) < w.x) {
    if (Q == cp.hi() + 1) {
      if (cp.kind() == ContourProcess::Kind::complete) break;
      return std::nullopt;
    }
    ++Q;
  }
  w.K_minus = P;
  w.K_plus = Q - 1;
  for (long long k = w.K_minus; k <= w.K_plus; ++k) {
    w.R2 = std::max(w.R2, cp.stem(k).spine_height);
    w.R_prime = std::max(w.R_prime, cp.stem(k).tree_height);
  }
  return w;
}

std::optional<MatchWindow> stability_window(const ContourProcess& cp, const std::vector<std::uint64_t>& vertices) {
  if (cp.kind() == ContourProcess::Kind::periodic) return stability_window(cp, 0, 0);
  std::vector<std::uint64_t> sorted(vertices);
  std::sort(sorted.begin(), sorted.end());
  long long a = LLONG_MAX, b = LLONG_MIN;
  for (long long k = cp.lo(); k <= cp.hi(); ++k) {
    if (std::binary_search(sorted.begin(), sorted.end(), cp.stem(k).vertex)) {
      a = std::min(a, k);
      b = std::max(b, k);
    }
  }
  if (a > b) throw DomainError("no realized stem belongs to the vertex set");
  return stability_window(cp, a, b);
}

namespace {

// Closed map of a limit tree, revealed one half-edge at a time.
class LazyClosure : public MapProvider {
 public:
  LazyClosure(SpineTree& t, long long stem_budget) : t_(t), budget_(stem_budget) { intern(t.spine_node(0), {}, -1); }

  void set_spine_cap(int cap) { cap_ = cap; }
  Dart root() override { return {0, 0}; }
  Color color(VertexId v) override { return verts_[v].node.color; }
  int degree(VertexId) override { return t_.d(); }

  std::optional<Dart> follow(VertexId v, int pos) override {
    if (auto& l = verts_[v].link[pos]) return l;
    const NodeRef node = verts_[v].node;
    const bool is_root = node.on_spine && node.spine_level == 0;
    const int entry = is_root ? pos : pos - 1;
    if (entry < 0) {
      resolve_parent(v);
    } else {
      auto kinds = t_.offspring(node);
      if (kinds[entry] == Entry::Kind::child) resolve_child(v, entry);
      else resolve_stem(v, entry);
    }
    return verts_[v].link[pos];
  }

 private:
  struct Vertex {
    NodeRef node;
    std::vector<int> path;  // entries from the spine vertex down to this vertex
    VertexId parent;
    std::vector<std::optional<Dart>> link;
  };

  int pos_of(VertexId v, int entry) const {
    const auto& n = verts_[v].node;
    return n.on_spine && n.spine_level == 0 ? entry : entry + 1;
  }

  VertexId intern(const NodeRef& n, std::vector<int> path, VertexId parent) {
    auto [it, fresh] = ids_.try_emplace(n.key, static_cast<VertexId>(verts_.size()));
    if (fresh) verts_.push_back({n, std::move(path), parent, std::vector<std::optional<Dart>>(t_.d())});
    return it->second;
  }

  VertexId spine_vertex(int h) {
    if (h > cap_) throw NeedsDeepening("spine vertex beyond the radius");
    NodeRef n = t_.spine_node(h);
    if (auto it = ids_.find(n.key); it != ids_.end()) return it->second;
    return intern(n, {}, -1);
  }

  void connect(VertexId a, int apos, VertexId b, int bpos) {
    verts_[a].link[apos] = Dart{b, bpos};
    verts_[b].link[bpos] = Dart{a, apos};
  }

  void resolve_parent(VertexId v) {
    const NodeRef node = verts_[v].node;
    if (node.on_spine) {
      const int h = node.spine_level;
      VertexId p = spine_vertex(h - 1);
      connect(v, 0, p, pos_of(p, t_.level(h - 1).spine_slot));
      return;
    }
    VertexId p = verts_[v].parent;
    if (p < 0) throw InternalConsistencyError("graft vertex without a parent record");
    connect(v, 0, p, pos_of(p, verts_[v].path.back()));
  }

  void resolve_child(VertexId v, int entry) {
    const NodeRef node = verts_[v].node;
    NodeRef c = t_.child(node, entry);
    VertexId cv;
    if (c.on_spine) {
      cv = spine_vertex(c.spine_level);
    } else {
      auto path = verts_[v].path;
      path.push_back(entry);
      cv = intern(c, std::move(path), v);
    }
    connect(v, pos_of(v, entry), cv, 0);
  }

  void resolve_stem(VertexId v, int entry) {
    const auto& rec = verts_[v];
    ContourCursor cur(t_, cap_, rec.node.spine_level, rec.path, entry);
    const bool forward = cur.kind() == Entry::Kind::close;
    // Walk level relative to the position before the starting stem.
    long long level = forward ? -1 : 0;
    for (;;) {
      if (++used_ > budget_)
        throw ResourceError("stem scan budget exhausted at seed " + std::to_string(t_.seed()));
      if (forward) {
        cur.advance();
        if (cur.kind() == Entry::Kind::open && level == -1) break;
        level += step_of(cur.kind());
      } else {
        cur.retreat();
        level -= step_of(cur.kind());
        if (cur.kind() == Entry::Kind::close && level == 1) break;
      }
    }
    // Register the partner and the chain of graft vertices above it.
    const auto& frames = cur.frames();
    VertexId at = spine_vertex(frames.front().node.spine_level);
    std::vector<int> path;
    for (std::size_t i = 1; i < frames.size(); ++i) {
      path.push_back(frames[i - 1].idx);
      at = intern(frames[i].node, path, at);
    }
    connect(v, pos_of(v, entry), at, pos_of(at, cur.entry()));
  }

  SpineTree& t_;
  long long budget_;
  long long used_ = 0;
  int cap_ = INT_MAX;
  std::unordered_map<std::uint64_t, VertexId> ids_;
  std::vector<Vertex> verts_;
};

}  // namespace

MapBall close_ball(SpineTree& t, int R, CloseBallOptions opt) {
  if (R < 0) throw DomainError("negative radius");
  int H = opt.initial_radius < 0 ? R + 2 : opt.initial_radius;
  t.set_budget({opt.spine_budget});
  LazyClosure lc(t, opt.stem_budget);
  for (;;) {
    lc.set_spine_cap(H);
    if (auto b = map_ball(lc, R)) {
      b->ball.d = t.d();
      return *b;
    }
    if (H >= opt.spine_budget)
      throw ResourceError("spine radius budget exhausted at seed " + std::to_string(t.seed()));
    H = std::min(2 * H, opt.spine_budget);
  }
}

MapBall close_ball(int d, std::uint64_t seed, int R, CloseBallOptions opt) {
  SpineTree t(d, seed);
  return close_ball(t, R, opt);
}

std::optional<MapBall> close_ball_windowed(SpineTree& t, int R, int spine_levels, long long stem_budget) {
  auto cp = ContourProcess::from_spine(t, stem_budget);
  int want = spine_levels;
  int L = spine_levels;
  for (int round = 0; round < 8; ++round) {
    std::optional<MatchWindow> w;
    try {
      cp.realize_levels(want);
      // Stems hanging from spine levels <= want form a contiguous index range.
      long long a = 0, b = -1;
      while (cp.realized(a - 1) && cp.stem(a - 1).spine_height <= want) --a;
      while (cp.realized(b + 1) && cp.stem(b + 1).spine_height <= want) ++b;
      w = stability_window(cp, a, b);
      L = std::max(L, want);
      while (!w) {
        L = std::max(L + 1, L * 2);
        cp.realize_levels(L);
        w = stability_window(cp, a, b);
      }
    } catch (const ResourceError&) {
      return std::nullopt;
    }
    L = std::max(L, cp.realized_levels());

    // Partial map over every vertex hanging from spine levels <= L.
    PlanarMap m;
    m.d = t.d();
    std::unordered_map<std::uint64_t, VertexId> id;
    std::vector<NodeRef> nodes;
    std::vector<std::vector<Entry::Kind>> kinds;
    auto add = [&](const NodeRef& n) {
      id[n.key] = static_cast<VertexId>(nodes.size());
      nodes.push_back(n);
      kinds.push_back(t.offspring(n));
      m.add_vertex(n.color, t.d());
    };
    for (int h = 0; h <= L; ++h) {
      add(t.spine_node(h));
      std::vector<NodeRef> stack;
      const auto& lev = t.level(h);
      for (int i = 0; i < static_cast<int>(lev.kinds.size()); ++i)
        if (lev.kinds[i] == Entry::Kind::child && i != lev.spine_slot) stack.push_back(t.child(t.spine_node(h), i));
      while (!stack.empty()) {
        NodeRef n = stack.back();
        stack.pop_back();
        add(n);
        const auto& ks = kinds.back();
        for (int i = 0; i < static_cast<int>(ks.size()); ++i)
          if (ks[i] == Entry::Kind::child) stack.push_back(t.child(n, i));
      }
    }
    auto pos_of = [&](VertexId v, int entry) {
      return nodes[v].on_spine && nodes[v].spine_level == 0 ? entry : entry + 1;
    };
    auto he = [&](VertexId v, int entry) { return m.vertices[v].rot[pos_of(v, entry)]; };
    for (VertexId v = 0; v < static_cast<VertexId>(nodes.size()); ++v)
      for (int i = 0; i < static_cast<int>(kinds[v].size()); ++i) {
        if (kinds[v][i] != Entry::Kind::child) continue;
        auto it = id.find(t.child(nodes[v], i).key);
        if (it != id.end()) m.link(he(v, i), m.vertices[it->second].rot[0]);
      }
    std::vector<long long> stack;
    for (long long k = w->K_minus; k <= w->K_plus; ++k) {
      const auto& s = cp.stem(k);
      if (s.kind == Entry::Kind::close) {
        stack.push_back(k);
        continue;
      }
      if (stack.empty()) throw InternalConsistencyError("stability window is not closed");
      const auto& c = cp.stem(stack.back());
      stack.pop_back();
      m.link(he(id.at(c.vertex), c.entry), he(id.at(s.vertex), s.entry));
    }
    if (!stack.empty()) throw InternalConsistencyError("stability window is not closed");
    m.root = {0, 0};
    if (auto ball = map_ball(m, R)) return ball;
    want *= 2;
  }
  return std::nullopt;
}

bool WalkStats::identity_holds() const {
  if (C_at_R.size() != S.size()) return false;
  for (std::size_t k = 0; k < S.size(); ++k)
    if (C_at_R[k] != S[k] + Y0()) return false;
  return true;
}

WalkStats spine_walk_stats(SpineTree& t, int n, long long stem_budget) {
  if (n < 0) throw DomainError("negative level count");
  const int d = t.d();
  WalkStats ws;
  ws.l_close.assign(n + 1, 0);
  ws.l_open.assign(n + 1, 0);
  long long used = 0;
  auto charge = [&](long long s) {
    used += s;
    if (used > stem_budget) throw ResourceError("walk statistics stem budget exhausted at seed " + std::to_string(t.seed()));
  };
  // Band counts straight from the spine words and the graft contents.
  for (int h = 0; h <= 2 * n; ++h) {
    const auto& L = t.level(h);
    const int band = (h + 1) / 2;
    for (int i = 0; i < L.spine_slot; ++i) {
      const auto k = L.kinds[i];
      if (k == Entry::Kind::open) ++ws.l_open[band];
      else if (k == Entry::Kind::close) ++ws.l_close[band];
      else if (t.mode() == GraftMode::sized) {
        const long long b = L.graft_blacks[i];
        charge(1);
        ws.l_open[band] += b * (d - 2);
        ws.l_close[band] += b * (d - 2) + 1;
      } else {
        std::vector<NodeRef> stack{t.child(t.spine_node(h), i)};
        while (!stack.empty()) {
          NodeRef v = stack.back();
          stack.pop_back();
          auto ks = t.offspring(v);
          for (int j = 0; j < static_cast<int>(ks.size()); ++j) {
            if (ks[j] == Entry::Kind::child) {
              stack.push_back(t.child(v, j));
            } else {
              charge(1);
              ++(ks[j] == Entry::Kind::open ? ws.l_open[band] : ws.l_close[band]);
            }
          }
        }
      }
    }
  }
  ws.X.resize(n + 1);
  ws.Y.resize(n + 1);
  ws.R.resize(n + 1);
  ws.S.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    ws.X[k] = ws.l_close[k] + ws.l_open[k];
    ws.Y[k] = ws.l_open[k] - ws.l_close[k];
    ws.R[k] = ws.X[k] + (k ? ws.R[k - 1] : 0);
    ws.S[k] = (k ? ws.Y[k] + ws.S[k - 1] : 0);
  }
  // The walk itself, read along the contour.
  ws.C_at_R.assign(n + 1, 0);
  if (t.mode() == GraftMode::lazy) {
    ContourCursor cur(t, INT_MAX);
    long long idx = 0, c = 0;
    for (int k = 0; k <= n; ++k) {
      while (idx < ws.R[k]) {
        charge(1);
        c += step_of(cur.kind());
        cur.advance();
        ++idx;
      }
      ws.C_at_R[k] = c;
      if (cur.spine_height() <= 2 * k) ws.C_at_R[k] = LLONG_MIN;  // band boundary missed
    }
  } else {
    // Graft blocks are read as a whole: b(d-2) opening and b(d-2)+1 closing stems.
    long long idx = 0, c = 0;
    int k = 0;
    auto flush = [&](int upto_band) {
      while (k < upto_band && k <= n) {
        ws.C_at_R[k] = idx == ws.R[k] ? c : LLONG_MIN;
        ++k;
      }
    };
    for (int h = 0; h <= 2 * n; ++h) {
      flush((h + 1) / 2);
      const auto& L = t.level(h);
      for (int i = 0; i < L.spine_slot; ++i) {
        const auto kind = L.kinds[i];
        if (kind != Entry::Kind::child) {
          c += step_of(kind);
          ++idx;
        } else {
          const long long b = L.graft_blacks[i];
          c += b * (d - 2) - (b * (d - 2) + 1);
          idx += 2 * b * (d - 2) + 1;
        }
      }
    }
    flush(n + 1);
  }
  return ws;
}

}  // namespace blossom
