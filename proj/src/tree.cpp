#include "blossom/tree.hpp"

#include <algorithm>
#include <utility>

namespace blossom {

std::size_t BlossomTree::black_count() const {
  return std::count_if(nodes.begin(), nodes.end(), [](const TreeVertex& v) { return v.color == Color::black; });
}

void check_well_formed(const BlossomTree& t) {
  const auto n = static_cast<VertexId>(t.nodes.size());
  if (n == 0) throw StructuralError("empty tree");
  if (t.root < 0 || t.root >= n) throw StructuralError("root id out of range");
  const auto& r = t.nodes[t.root];
  const int corners = std::max<int>(1, static_cast<int>(r.offspring.size()));
  if (t.root_corner < 0 || t.root_corner >= corners) throw StructuralError("root corner out of range");

  std::vector<char> seen(n, 0);
  std::vector<VertexId> stack{t.root};
  seen[t.root] = 1;
  VertexId visited = 0;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    ++visited;
    const auto& node = t.nodes[v];
    for (const Entry& e : node.offspring) {
      if (e.kind == Entry::Kind::open && node.color != Color::black)
        throw StructuralError("opening stem on a white vertex");
      if (e.kind == Entry::Kind::close && node.color != Color::white)
        throw StructuralError("closing stem on a black vertex");
      if (!e.is_child()) continue;
      if (e.child < 0 || e.child >= n) throw StructuralError("child id out of range");
      if (seen[e.child]) throw StructuralError("vertex reached twice");
      if (t.nodes[e.child].color == node.color) throw StructuralError("edge joins equal colors");
      seen[e.child] = 1;
      stack.push_back(e.child);
    }
  }
  if (visited != n) throw StructuralError("unreachable vertices");
}

TreeLayout layout(const BlossomTree& t) {
  const auto n = t.nodes.size();
  TreeLayout out;
  out.parent.assign(n, -1);
  out.entry_in_parent.assign(n, -1);
  out.height.assign(n, 0);
  out.preorder.reserve(n);
  std::vector<VertexId> stack{t.root};
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    out.preorder.push_back(v);
    const auto& off = t.nodes[v].offspring;
    for (int i = static_cast<int>(off.size()) - 1; i >= 0; --i) {
      if (!off[i].is_child()) continue;
      VertexId c = off[i].child;
      out.parent[c] = v;
      out.entry_in_parent[c] = i;
      out.height[c] = out.height[v] + 1;
      stack.push_back(c);
    }
  }
  return out;
}

ChargeReport compute_charges(const BlossomTree& t) {
  check_well_formed(t);
  auto lay = layout(t);
  ChargeReport rep;
  rep.charge_of.assign(t.nodes.size(), 0);
  for (auto it = lay.preorder.rbegin(); it != lay.preorder.rend(); ++it) {
    long long c = 0;
    for (const Entry& e : t.nodes[*it].offspring) {
      if (e.kind == Entry::Kind::close) ++c;
      else if (e.kind == Entry::Kind::open) --c;
      else c += rep.charge_of[e.child];
    }
    rep.charge_of[*it] = c;
  }
  rep.total = rep.charge_of[t.root];
  return rep;
}

bool is_well_charged(const BlossomTree& t) {
  auto rep = compute_charges(t);
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    if (t.nodes[v].color == Color::black && rep.charge_of[v] > 1) return false;
    if (t.nodes[v].color == Color::white && rep.charge_of[v] < 0) return false;
  }
  return true;
}

bool validate_regular(const BlossomTree& t, int d) {
  try {
    check_well_formed(t);
  } catch (const StructuralError&) {
    return false;
  }
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    const auto& node = t.nodes[v];
    const std::size_t want = static_cast<VertexId>(v) == t.root ? d : d - 1;
    if (node.offspring.size() != want) return false;
    if (node.color == Color::black) {
      auto kids = std::count_if(node.offspring.begin(), node.offspring.end(), [](const Entry& e) { return e.is_child(); });
      if (kids != 1) return false;
    }
  }
  return true;
}

std::vector<StemRef> contour_stems(const BlossomTree& t) {
  std::vector<StemRef> out;
  struct Frame {
    VertexId v;
    int done;
  };
  const auto& root = t.nodes[t.root].offspring;
  const int rs = static_cast<int>(root.size());
  std::vector<Frame> stack{{t.root, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& off = t.nodes[f.v].offspring;
    const int len = static_cast<int>(off.size());
    if (f.done == len) {
      stack.pop_back();
      continue;
    }
    int idx = f.v == t.root ? (t.root_corner + f.done) % rs : f.done;
    ++f.done;
    const Entry& e = off[idx];
    if (e.is_child()) stack.push_back({e.child, 0});
    else out.push_back({f.v, idx, e.kind});
  }
  return out;
}

int tree_height(const BlossomTree& t) {
  auto lay = layout(t);
  return *std::max_element(lay.height.begin(), lay.height.end());
}

CanonicalCode canonical_code(const BlossomTree& t) {
  CanonicalCode out;
  auto& s = out.code;
  s.reserve(t.nodes.size() * 8);
  struct Frame {
    VertexId v;
    int done;
  };
  const int rs = static_cast<int>(t.nodes[t.root].offspring.size());
  s.push_back(color_char(t.nodes[t.root].color) == 'b' ? 'B' : 'W');
  std::vector<Frame> stack{{t.root, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& off = t.nodes[f.v].offspring;
    const int len = static_cast<int>(off.size());
    if (f.done == len) {
      stack.pop_back();
      s.push_back(')');
      continue;
    }
    int idx = f.v == t.root ? (t.root_corner + f.done) % rs : f.done;
    ++f.done;
    const Entry& e = off[idx];
    switch (e.kind) {
      case Entry::Kind::open: s.push_back('o'); break;
      case Entry::Kind::close: s.push_back('c'); break;
      case Entry::Kind::child:
        s.push_back(t.nodes[e.child].color == Color::black ? 'B' : 'W');
        stack.push_back({e.child, 0});
        break;
    }
  }
  return out;
}

TreeBall tree_ball(const BlossomTree& t, int k) {
  if (k < 0) throw DomainError("negative ball radius");
  auto lay = layout(t);
  TreeBall out;
  out.k = k;
  out.ball.d = t.d;
  std::vector<VertexId> remap(t.nodes.size(), -1);
  for (VertexId v : lay.preorder) {
    if (lay.height[v] > k) continue;
    remap[v] = static_cast<VertexId>(out.ball.nodes.size());
    out.ball.nodes.push_back({t.nodes[v].color, {}});
    if (lay.height[v] == k) ++out.m_k;
    if (t.nodes[v].color == Color::black) ++out.n_k;
  }
  for (VertexId v : lay.preorder) {
    if (lay.height[v] >= k) continue;
    auto& off = out.ball.nodes[remap[v]].offspring;
    off = t.nodes[v].offspring;
    for (Entry& e : off)
      if (e.is_child()) e.child = remap[e.child];
  }
  out.ball.root = remap[t.root];
  out.ball.root_corner = k == 0 ? 0 : t.root_corner;
  return out;
}

mpq_class local_distance(const BlossomTree& a, const BlossomTree& b) {
  if (canonical_code(a) == canonical_code(b)) return 0;
  const int hmax = std::max(tree_height(a), tree_height(b));
  int agree = -1;
  for (int k = 0; k <= hmax; ++k) {
    if (canonical_code(tree_ball(a, k).ball) != canonical_code(tree_ball(b, k).ball)) break;
    agree = k;
  }
  if (agree < 0) return 1;
  return mpq_class(1, agree + 1);
}

BlossomTree reroot_corner(const BlossomTree& t, int corner) {
  BlossomTree out = t;
  const int rs = static_cast<int>(t.nodes[t.root].offspring.size());
  out.root_corner = rs == 0 ? 0 : ((corner % rs) + rs) % rs;
  return out;
}

BlossomTree mirror(const BlossomTree& t) {
  BlossomTree out = t;
  for (auto& v : out.nodes) std::reverse(v.offspring.begin(), v.offspring.end());
  const int rs = static_cast<int>(t.nodes[t.root].offspring.size());
  out.root_corner = rs == 0 ? 0 : (rs - t.root_corner) % rs;
  return out;
}

BlossomTree normalize_ids(const BlossomTree& t) {
  auto lay = layout(t);
  std::vector<VertexId> remap(t.nodes.size(), -1);
  for (std::size_t i = 0; i < lay.preorder.size(); ++i) remap[lay.preorder[i]] = static_cast<VertexId>(i);
  BlossomTree out;
  out.d = t.d;
  out.root = 0;
  out.root_corner = t.root_corner;
  out.nodes.resize(lay.preorder.size());
  for (VertexId v : lay.preorder) {
    auto& node = out.nodes[remap[v]];
    node = t.nodes[v];
    for (Entry& e : node.offspring)
      if (e.is_child()) e.child = remap[e.child];
  }
  return out;
}

namespace {

struct Enumerator {
  int d;
  int n;
  long long budget;
  long long visited = 0;
  int blacks = 0;
  int whites = 0;
  BlossomTree work;
  std::vector<BlossomTree> out;

  // Vertices are appended in breadth-first order; position q is the next one
  // whose offspring gets decided. Every black slot is an opening stem or a
  // white child, every white slot a closing stem or a black child.
  void expand(std::size_t q) {
    if (++visited > budget) throw ResourceError("enumeration search budget exhausted");
    if (q == work.nodes.size()) {
      if (blacks != n || whites != n) return;
      auto rep = compute_charges(work);
      if (rep.total != 0) return;
      if (!is_well_charged(work)) return;
      out.push_back(work);
      return;
    }
    const Color col = work.nodes[q].color;
    const Color kid = opposite(col);
    const int slots = q == 0 ? d : d - 1;
    const Entry stem = col == Color::black ? Entry::open() : Entry::close();
    int& kid_count = kid == Color::black ? blacks : whites;
    for (unsigned mask = 0; mask < (1u << slots); ++mask) {
      const int c = __builtin_popcount(mask);
      if (kid_count + c > n) continue;
      const std::size_t base = work.nodes.size();
      std::vector<Entry> off;
      off.reserve(slots);
      int made = 0;
      for (int i = 0; i < slots; ++i) {
        if (mask & (1u << i)) off.push_back(Entry::make_child(static_cast<VertexId>(base + made++)));
        else off.push_back(stem);
      }
      work.nodes[q].offspring = std::move(off);
      for (int i = 0; i < c; ++i) work.nodes.push_back({kid, {}});
      kid_count += c;
      expand(q + 1);
      kid_count -= c;
      work.nodes.resize(base);
    }
    work.nodes[q].offspring.clear();
  }
};

}  // namespace

std::vector<BlossomTree> enumerate_trees(int d, int n, EnumerationGuard guard) {
  if (d < 3) throw DomainError("d must be at least 3");
  if (n < 1) throw DomainError("n must be at least 1");
  // A charge-0 d-regular tree with n black vertices has exactly n white ones
  // (edge count on each side), so the search caps both colors at n.
  Enumerator e{d, n, guard.max_search_nodes, 0, 0, 0, {}, {}};
  e.work.d = d;
  e.work.nodes.push_back({Color::black, {}});
  e.blacks = 1;
  e.expand(0);
  std::vector<std::pair<CanonicalCode, std::size_t>> keyed;
  keyed.reserve(e.out.size());
  for (std::size_t i = 0; i < e.out.size(); ++i) keyed.emplace_back(canonical_code(e.out[i]), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<BlossomTree> sorted;
  sorted.reserve(keyed.size());
  for (auto& [code, i] : keyed) sorted.push_back(normalize_ids(e.out[i]));
  return sorted;
}

nlohmann::json to_json(const BlossomTree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    nlohmann::json off = nlohmann::json::array();
    for (const Entry& e : t.nodes[v].offspring) {
      if (e.is_child()) off.push_back({{"child", e.child}});
      else off.push_back(e.kind == Entry::Kind::open ? "open" : "close");
    }
    nodes.push_back({{"id", v}, {"color", std::string(1, color_char(t.nodes[v].color))}, {"offspring", off}});
  }
  return {{"d", t.d}, {"root", t.root}, {"root_corner", t.root_corner}, {"nodes", nodes}};
}

BlossomTree tree_from_json(const nlohmann::json& j) {
  BlossomTree t;
  t.d = j.at("d").get<int>();
  t.root = j.at("root").get<VertexId>();
  t.root_corner = j.at("root_corner").get<int>();
  const auto& nodes = j.at("nodes");
  t.nodes.resize(nodes.size());
  for (const auto& nj : nodes) {
    auto id = nj.at("id").get<std::size_t>();
    if (id >= t.nodes.size()) throw StructuralError("node id out of range");
    auto& node = t.nodes[id];
    auto col = nj.at("color").get<std::string>();
    if (col != "b" && col != "w") throw StructuralError("bad color " + col);
    node.color = col == "b" ? Color::black : Color::white;
    for (const auto& e : nj.at("offspring")) {
      if (e.is_string()) {
        auto s = e.get<std::string>();
        if (s == "open") node.offspring.push_back(Entry::open());
        else if (s == "close") node.offspring.push_back(Entry::close());
        else throw StructuralError("bad offspring entry " + s);
      } else {
        node.offspring.push_back(Entry::make_child(e.at("child").get<VertexId>()));
      }
    }
  }
  check_well_formed(t);
  return t;
}

}  // namespace blossom
