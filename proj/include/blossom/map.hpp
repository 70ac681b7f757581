#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "blossom/common.hpp"

namespace blossom {

using HalfEdgeId = std::int32_t;
inline constexpr HalfEdgeId kFrontier = -1;

struct HalfEdge {
  VertexId vertex = -1;
  int pos = 0;
  HalfEdgeId twin = kFrontier;
};

struct MapVertex {
  Color color = Color::black;
  std::vector<HalfEdgeId> rot;  // clockwise
};

struct Corner {
  VertexId vertex = 0;
  int pos = 0;  // corner just before rot[pos]
  bool operator==(const Corner&) const = default;
};

// Rotation system. Half-edges with twin == kFrontier are unmatched stubs of a
// partial map. The face of half-edge h contains the corner just before h; the
// face permutation is h -> rot_next(twin(h)).
struct PlanarMap {
  int d = 3;
  std::vector<MapVertex> vertices;
  std::vector<HalfEdge> half_edges;
  Corner root;
  std::optional<HalfEdgeId> marked_face;

  VertexId add_vertex(Color c, int degree);
  void link(HalfEdgeId a, HalfEdgeId b);
  HalfEdgeId half_edge_at(VertexId v, int pos) const { return vertices[v].rot[pos]; }
  HalfEdgeId rot_next(HalfEdgeId h) const;
  HalfEdgeId face_next(HalfEdgeId h) const { return rot_next(half_edges[h].twin); }
  std::size_t edge_count() const;
  std::vector<HalfEdgeId> frontier() const;
  bool complete() const { return frontier().empty(); }
};

struct PartialMapError : StructuralError {
  using StructuralError::StructuralError;
};

// Raised by lazy providers when a neighbourhood cannot be revealed within the
// current realization.
struct NeedsDeepening : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dart {
  VertexId vertex;
  int pos;
};

// Neighbourhoods revealed on demand. follow() returns nullopt for a frontier
// half-edge and may throw NeedsDeepening.
class MapProvider {
 public:
  virtual ~MapProvider() = default;
  virtual Dart root() = 0;
  virtual Color color(VertexId v) = 0;
  virtual int degree(VertexId v) = 0;
  virtual std::optional<Dart> follow(VertexId v, int pos) = 0;
};

class PlanarMapProvider : public MapProvider {
 public:
  explicit PlanarMapProvider(const PlanarMap& m) : m_(m) {}
  Dart root() override { return {m_.root.vertex, m_.root.pos}; }
  Color color(VertexId v) override { return m_.vertices[v].color; }
  int degree(VertexId v) override { return static_cast<int>(m_.vertices[v].rot.size()); }
  std::optional<Dart> follow(VertexId v, int pos) override;

 private:
  const PlanarMap& m_;
};

struct MapReport {
  bool rotation_consistent = true;
  bool twins_involutive = true;
  bool regular = true;
  bool bipartite = true;
  bool connected = true;
  long long V = 0, E = 0;
  std::optional<long long> F;
  std::optional<long long> euler;
  std::string problem;
  bool ok() const {
    return rotation_consistent && twins_involutive && regular && bipartite && connected && (!euler || *euler == 2);
  }
};

MapReport validate_map(const PlanarMap& m, int d);

std::vector<std::vector<HalfEdgeId>> faces(const PlanarMap& m);
// Face index of every half-edge, -1 for frontier stubs. Complete maps only.
std::vector<int> face_index(const PlanarMap& m);

struct MapBall {
  PlanarMap ball;
  int R = 0;
  std::vector<int> distance;  // per ball vertex
};

// Vertices within distance R of the root and every edge with an endpoint at
// distance <= R-1. Half-edges of ball vertices outside those edges stay as
// frontier stubs. nullopt means the provider could not reveal the ball.
std::optional<MapBall> map_ball(MapProvider& p, int R);
std::optional<MapBall> map_ball(const PlanarMap& m, int R);

CanonicalCode canonical_code(const PlanarMap& m, bool with_marked_face = false);
mpq_class local_distance(const PlanarMap& a, const PlanarMap& b);

PlanarMap forget_marked_face(PlanarMap m);

std::vector<int> bfs_distances(const PlanarMap& m);

struct WalkSummary {
  std::vector<long long> visits;  // per vertex
  long long returns = 0;
  int max_distance = 0;
  long long steps_taken = 0;
  bool truncated = false;
};

// Uniform half-edge at every step, so multi-edges count with multiplicity.
// Stepping onto a frontier stub stops the walk and sets truncated.
WalkSummary simple_random_walk(const PlanarMap& m, long long steps, Rng& rng);

nlohmann::json to_json(const PlanarMap& m);
PlanarMap map_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MapBall& b);
std::string to_dot(const PlanarMap& m);
std::string export_map(const PlanarMap& m, const std::string& format);

}  // namespace blossom
