#include "blossom/map.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace blossom {

VertexId PlanarMap::add_vertex(Color c, int degree) {
  const auto v = static_cast<VertexId>(vertices.size());
  MapVertex mv{c, {}};
  for (int i = 0; i < degree; ++i) {
    mv.rot.push_back(static_cast<HalfEdgeId>(half_edges.size()));
    half_edges.push_back({v, i, kFrontier});
  }
  vertices.push_back(std::move(mv));
  return v;
}

void PlanarMap::link(HalfEdgeId a, HalfEdgeId b) {
  half_edges[a].twin = b;
  half_edges[b].twin = a;
}

HalfEdgeId PlanarMap::rot_next(HalfEdgeId h) const {
  const auto& he = half_edges[h];
  const auto& rot = vertices[he.vertex].rot;
  return rot[(he.pos + 1) % rot.size()];
}

std::size_t PlanarMap::edge_count() const {
  std::size_t n = 0;
  for (const auto& h : half_edges) n += h.twin != kFrontier;
  return n / 2;
}

std::vector<HalfEdgeId> PlanarMap::frontier() const {
  std::vector<HalfEdgeId> out;
  for (std::size_t h = 0; h < half_edges.size(); ++h)
    if (half_edges[h].twin == kFrontier) out.push_back(static_cast<HalfEdgeId>(h));
  return out;
}

std::optional<Dart> PlanarMapProvider::follow(VertexId v, int pos) {
  HalfEdgeId t = m_.half_edges[m_.vertices[v].rot[pos]].twin;
  if (t == kFrontier) return std::nullopt;
  return Dart{m_.half_edges[t].vertex, m_.half_edges[t].pos};
}

MapReport validate_map(const PlanarMap& m, int d) {
  MapReport r;
  r.V = static_cast<long long>(m.vertices.size());
  const auto H = static_cast<HalfEdgeId>(m.half_edges.size());
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const auto& rot = m.vertices[v].rot;
    if (static_cast<int>(rot.size()) != d) r.regular = false;
    for (std::size_t i = 0; i < rot.size(); ++i) {
      HalfEdgeId h = rot[i];
      if (h < 0 || h >= H || m.half_edges[h].vertex != static_cast<VertexId>(v) ||
          m.half_edges[h].pos != static_cast<int>(i)) {
        r.rotation_consistent = false;
        r.problem = "rotation does not match half-edge records";
        return r;
      }
    }
  }
  for (HalfEdgeId h = 0; h < H; ++h) {
    HalfEdgeId t = m.half_edges[h].twin;
    if (t == kFrontier) continue;
    if (t < 0 || t >= H || t == h || m.half_edges[t].twin != h) {
      r.twins_involutive = false;
      r.problem = "twin is not an involution";
      return r;
    }
    if (m.vertices[m.half_edges[h].vertex].color == m.vertices[m.half_edges[t].vertex].color) r.bipartite = false;
  }
  r.E = static_cast<long long>(m.edge_count());
  if (m.vertices.empty()) {
    r.connected = false;
    return r;
  }
  std::vector<char> seen(m.vertices.size(), 0);
  std::vector<VertexId> stack{m.root.vertex};
  seen[m.root.vertex] = 1;
  std::size_t count = 0;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    ++count;
    for (HalfEdgeId h : m.vertices[v].rot) {
      HalfEdgeId t = m.half_edges[h].twin;
      if (t == kFrontier) continue;
      VertexId w = m.half_edges[t].vertex;
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  r.connected = count == m.vertices.size();
  if (m.complete()) {
    r.F = static_cast<long long>(faces(m).size());
    r.euler = r.V - r.E + *r.F;
  }
  if (!r.regular) r.problem = "vertex degree differs from d";
  else if (!r.bipartite) r.problem = "edge joins equal colors";
  else if (!r.connected) r.problem = "map is disconnected";
  else if (r.euler && *r.euler != 2) r.problem = "Euler characteristic is not 2";
  return r;
}

std::vector<int> face_index(const PlanarMap& m) {
  if (!m.complete()) throw PartialMapError("faces of a partial map");
  std::vector<int> idx(m.half_edges.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < m.half_edges.size(); ++s) {
    if (idx[s] >= 0) continue;
    HalfEdgeId h = static_cast<HalfEdgeId>(s);
    do {
      idx[h] = next;
      h = m.face_next(h);
    } while (idx[h] < 0);
    ++next;
  }
  return idx;
}

std::vector<std::vector<HalfEdgeId>> faces(const PlanarMap& m) {
  auto idx = face_index(m);
  std::vector<std::vector<HalfEdgeId>> out;
  std::vector<char> done(m.half_edges.size(), 0);
  for (std::size_t s = 0; s < m.half_edges.size(); ++s) {
    if (done[s]) continue;
    std::vector<HalfEdgeId> cyc;
    HalfEdgeId h = static_cast<HalfEdgeId>(s);
    while (!done[h]) {
      done[h] = 1;
      cyc.push_back(h);
      h = m.face_next(h);
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

std::optional<MapBall> map_ball(MapProvider& p, int R) {
  if (R < 0) throw DomainError("negative radius");
  const Dart root = p.root();
  std::unordered_map<VertexId, int> local;
  std::vector<VertexId> order;
  std::vector<int> dist;
  struct Link {
    int a, apos, b, bpos;
  };
  std::vector<Link> links;
  local[root.vertex] = 0;
  order.push_back(root.vertex);
  dist.push_back(0);
  try {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (dist[i] >= R) break;
      const VertexId v = order[i];
      const int deg = p.degree(v);
      for (int pos = 0; pos < deg; ++pos) {
        auto t = p.follow(v, pos);
        if (!t) return std::nullopt;
        auto [it, fresh] = local.try_emplace(t->vertex, static_cast<int>(order.size()));
        if (fresh) {
          order.push_back(t->vertex);
          dist.push_back(dist[i] + 1);
        }
        links.push_back({static_cast<int>(i), pos, it->second, t->pos});
      }
    }
  } catch (const NeedsDeepening&) {
    return std::nullopt;
  }
  MapBall out;
  out.R = R;
  out.distance = dist;
  auto& m = out.ball;
  std::vector<HalfEdgeId> base;
  for (VertexId v : order) {
    base.push_back(static_cast<HalfEdgeId>(m.half_edges.size()));
    m.add_vertex(p.color(v), p.degree(v));
  }
  for (const Link& l : links) m.link(base[l.a] + l.apos, base[l.b] + l.bpos);
  m.root = {0, root.pos};
  return out;
}

std::optional<MapBall> map_ball(const PlanarMap& m, int R) {
  PlanarMapProvider p(m);
  auto out = map_ball(p, R);
  if (out) out->ball.d = m.d;
  return out;
}

CanonicalCode canonical_code(const PlanarMap& m, bool with_marked_face) {
  std::vector<int> label(m.vertices.size(), -1);
  std::vector<int> ref(m.vertices.size(), 0);
  std::vector<VertexId> order{m.root.vertex};
  label[m.root.vertex] = 0;
  ref[m.root.vertex] = m.root.pos;
  std::ostringstream os;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const VertexId v = order[i];
    const auto& rot = m.vertices[v].rot;
    const int deg = static_cast<int>(rot.size());
    os << color_char(m.vertices[v].color) << deg << ':';
    for (int j = 0; j < deg; ++j) {
      HalfEdgeId h = rot[(ref[v] + j) % deg];
      HalfEdgeId t = m.half_edges[h].twin;
      if (t == kFrontier) {
        os << "F,";
        continue;
      }
      const VertexId w = m.half_edges[t].vertex;
      if (label[w] < 0) {
        label[w] = static_cast<int>(order.size());
        ref[w] = m.half_edges[t].pos;
        order.push_back(w);
      }
      const int wdeg = static_cast<int>(m.vertices[w].rot.size());
      os << label[w] << '.' << ((m.half_edges[t].pos - ref[w]) % wdeg + wdeg) % wdeg << ',';
    }
    os << ';';
  }
  if (with_marked_face && m.marked_face) {
    const auto& he = m.half_edges[*m.marked_face];
    const int deg = static_cast<int>(m.vertices[he.vertex].rot.size());
    os << "M" << label[he.vertex] << '.' << ((he.pos - ref[he.vertex]) % deg + deg) % deg;
  }
  return {os.str()};
}

mpq_class local_distance(const PlanarMap& a, const PlanarMap& b) {
  if (canonical_code(a) == canonical_code(b)) return 0;
  const int bound = static_cast<int>(std::max(a.vertices.size(), b.vertices.size())) + 1;
  int agree = -1;
  for (int R = 0; R <= bound; ++R) {
    auto ba = map_ball(a, R);
    auto bb = map_ball(b, R);
    if (!ba || !bb) break;
    if (canonical_code(ba->ball) != canonical_code(bb->ball)) break;
    agree = R;
  }
  if (agree < 0) return 1;
  return mpq_class(1, agree + 1);
}

PlanarMap forget_marked_face(PlanarMap m) {
  m.marked_face.reset();
  return m;
}

std::vector<int> bfs_distances(const PlanarMap& m) {
  std::vector<int> dist(m.vertices.size(), -1);
  std::deque<VertexId> q{m.root.vertex};
  dist[m.root.vertex] = 0;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    for (HalfEdgeId h : m.vertices[v].rot) {
      HalfEdgeId t = m.half_edges[h].twin;
      if (t == kFrontier) continue;
      VertexId w = m.half_edges[t].vertex;
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

WalkSummary simple_random_walk(const PlanarMap& m, long long steps, Rng& rng) {
  WalkSummary s;
  s.visits.assign(m.vertices.size(), 0);
  auto dist = bfs_distances(m);
  VertexId at = m.root.vertex;
  s.visits[at] = 1;
  for (long long i = 0; i < steps; ++i) {
    const auto& rot = m.vertices[at].rot;
    HalfEdgeId t = m.half_edges[rot[uniform_below(rng, rot.size())]].twin;
    if (t == kFrontier) {
      s.truncated = true;
      break;
    }
    at = m.half_edges[t].vertex;
    ++s.steps_taken;
    ++s.visits[at];
    if (at == m.root.vertex) ++s.returns;
    s.max_distance = std::max(s.max_distance, dist[at]);
  }
  return s;
}

nlohmann::json to_json(const PlanarMap& m) {
  nlohmann::json verts = nlohmann::json::array();
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    verts.push_back({{"id", v}, {"color", std::string(1, color_char(m.vertices[v].color))}, {"rot", m.vertices[v].rot}});
  nlohmann::json twins = nlohmann::json::array();
  nlohmann::json frontier = nlohmann::json::array();
  for (std::size_t h = 0; h < m.half_edges.size(); ++h) {
    HalfEdgeId t = m.half_edges[h].twin;
    if (t == kFrontier) frontier.push_back(h);
    else if (static_cast<HalfEdgeId>(h) < t) twins.push_back({h, t});
  }
  nlohmann::json j = {{"d", m.d},
                      {"vertices", verts},
                      {"twins", twins},
                      {"frontier", frontier},
                      {"root", {{"vertex", m.root.vertex}, {"pos", m.root.pos}}}};
  if (m.marked_face) j["marked_face"] = *m.marked_face;
  return j;
}

PlanarMap map_from_json(const nlohmann::json& j) {
  PlanarMap m;
  m.d = j.at("d").get<int>();
  const auto& verts = j.at("vertices");
  m.vertices.resize(verts.size());
  std::size_t H = 0;
  for (const auto& vj : verts) H += vj.at("rot").size();
  m.half_edges.assign(H, {});
  for (const auto& vj : verts) {
    auto id = vj.at("id").get<std::size_t>();
    if (id >= m.vertices.size()) throw StructuralError("vertex id out of range");
    auto col = vj.at("color").get<std::string>();
    if (col != "b" && col != "w") throw StructuralError("bad color " + col);
    m.vertices[id].color = col == "b" ? Color::black : Color::white;
    m.vertices[id].rot = vj.at("rot").get<std::vector<HalfEdgeId>>();
    for (std::size_t i = 0; i < m.vertices[id].rot.size(); ++i) {
      HalfEdgeId h = m.vertices[id].rot[i];
      if (h < 0 || static_cast<std::size_t>(h) >= H) throw StructuralError("half-edge id out of range");
      m.half_edges[h].vertex = static_cast<VertexId>(id);
      m.half_edges[h].pos = static_cast<int>(i);
    }
  }
  for (const auto& tw : j.at("twins")) {
    auto a = tw.at(0).get<HalfEdgeId>(), b = tw.at(1).get<HalfEdgeId>();
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= H || static_cast<std::size_t>(b) >= H)
      throw StructuralError("twin id out of range");
    m.link(a, b);
  }
  m.root = {j.at("root").at("vertex").get<VertexId>(), j.at("root").at("pos").get<int>()};
  if (j.contains("marked_face")) m.marked_face = j.at("marked_face").get<HalfEdgeId>();
  return m;
}

nlohmann::json to_json(const MapBall& b) {
  auto j = to_json(b.ball);
  j["R"] = b.R;
  j["distances"] = b.distance;
  return j;
}

std::string to_dot(const PlanarMap& m) {
  std::ostringstream os;
  os << "graph map {\n";
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const bool blk = m.vertices[v].color == Color::black;
    os << "  v" << v << " [style=filled, fillcolor=" << (blk ? "black" : "white")
       << ", fontcolor=" << (blk ? "white" : "black");
    if (static_cast<VertexId>(v) == m.root.vertex) os << ", xlabel=\"root@" << m.root.pos << "\", penwidth=3";
    os << "];\n";
  }
  for (std::size_t h = 0; h < m.half_edges.size(); ++h) {
    HalfEdgeId t = m.half_edges[h].twin;
    if (t == kFrontier || t < static_cast<HalfEdgeId>(h)) continue;
    os << "  v" << m.half_edges[h].vertex << " -- v" << m.half_edges[t].vertex << ";\n";
  }
  int stub = 0;
  for (std::size_t h = 0; h < m.half_edges.size(); ++h) {
    if (m.half_edges[h].twin != kFrontier) continue;
    os << "  f" << stub << " [shape=point];\n  v" << m.half_edges[h].vertex << " -- f" << stub << " [style=dashed];\n";
    ++stub;
  }
  os << "}\n";
  return os.str();
}

std::string export_map(const PlanarMap& m, const std::string& format) {
  if (format == "json") return to_json(m).dump();
  if (format == "dot") return to_dot(m);
  throw DomainError("unknown map format: " + format);
}

}  // namespace blossom
