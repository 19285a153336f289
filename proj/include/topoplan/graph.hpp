#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "topoplan/homology.hpp"
#include "topoplan/steering.hpp"

namespace topoplan {

// Shrinking connection radius of the r-disk graph.
double radius(std::size_t n, double gamma, int d);

// Default gamma for the batch planner: a disk-graph connectivity
// constant derived from the bounding-box area, times a user multiplier.
double default_gamma_batch(const Rect& bounds, int d, double multiplier);

// Default gamma for the incremental planner (rewiring-radius flavor).
double default_gamma_incremental(const Rect& bounds, int d, double multiplier);

// Configuration-space dimension of a steering system (Dubins poses carry
// a heading).
inline int system_dimension(SystemKind system) {
  return system == SystemKind::kDubins ? 3 : 2;
}

struct Node;
using NodePtr = std::shared_ptr<Node>;

// One (state, homology class) pair: cost-to-come plus the tree parent.
struct Node {
  HSig hsig;
  double cost = 0.0;
  NodePtr parent;
  int vertex_id = -1;
  SigKey key;
  // Cache key of the edge from parent's vertex; -1 for the root.
  int parent_from = -1;
  int parent_to = -1;
  bool open = true;   // batch planner bookkeeping
  bool alive = true;  // false once pruned by dominance
  // Planner iteration stamps, useful when auditing search order.
  std::uint64_t created_iter = 0;
  std::uint64_t closed_iter = 0;
};

struct Vertex {
  int id = -1;
  State state;
  // One node per quantized class, ordered for deterministic iteration.
  std::map<SigKey, NodePtr> nodes;
};

enum class Collision : std::uint8_t { kUnknown, kFree, kBlocked };

struct CachedEdge {
  int from = -1;
  int to = -1;
  SteerResult steer;
  HSig hsig_increment;
  // False when the trace runs through a representative point; such an
  // edge is blocked by construction and must never propagate.
  bool hsig_valid = true;
  Collision collision = Collision::kUnknown;
};

struct Metrics {
  std::uint64_t edges_computed = 0;
  std::uint64_t collision_checks = 0;
  std::uint64_t node_count = 0;
  std::uint64_t vertex_count = 0;
};

struct GraphConfig {
  double trace_resolution = 0.05;
  double key_tol = kSigKeyTol;
  double rho = 1.0;
};

enum class AppendOutcome : std::uint8_t { kAccepted, kDominated };

// Shared r-disk graph: geometry lives here once; planners project trees
// through it. Edges and collision results are computed at most once per
// ordered vertex pair regardless of how many homology layers use them.
class Graph {
 public:
  Graph(const Workspace& w, SystemKind system, GraphConfig config = {});

  const Workspace& workspace() const { return *workspace_; }
  SystemKind system() const { return system_; }
  const GraphConfig& config() const { return config_; }

  Vertex& add_vertex(const State& x);
  Vertex& vertex(int id) { return vertices_[static_cast<std::size_t>(id)]; }
  const Vertex& vertex(int id) const {
    return vertices_[static_cast<std::size_t>(id)];
  }
  std::size_t vertex_count() const { return vertices_.size(); }
  const std::deque<Vertex>& vertices() const { return vertices_; }

  // Cached steering edge between two stored vertices; computes, caches
  // and counts on first use.
  CachedEdge& edge(int from, int to);
  CachedEdge* find_edge(int from, int to);
  const CachedEdge* find_edge(int from, int to) const;

  // Registers an edge whose steering solution, winding increment and
  // collision status were already computed (and counted) by the caller.
  CachedEdge& insert_resolved_edge(int from, int to, SteerResult steer,
                                   HSig increment, bool hsig_valid,
                                   Collision status);

  // Vertices reachable from x within steering cost r, paired with the
  // cached edges x -> v; excludes x itself. Sorted by vertex id.
  std::vector<std::pair<Vertex*, CachedEdge*>> near_forward(int from_id,
                                                            double r);
  // Mirror image with edges v -> x.
  std::vector<std::pair<Vertex*, CachedEdge*>> near_backward(int to_id,
                                                             double r);

  // Nearest stored vertex to x by steering cost (exact; Euclidean lower
  // bound prunes the asymmetric case). Returns -1 on empty graph.
  int nearest(const State& x) const;

  // Resolves (once) and memoizes the collision status of a cached edge.
  Collision check_collision(CachedEdge& e);

  // Dominance-filtered insertion. A candidate losing to an equal-
  // class node of lower-or-tied cost is rejected; a strictly cheaper
  // candidate replaces (prunes) the incumbent.
  AppendOutcome append_node(Vertex& v, NodePtr candidate);

  // Directed adjacency of collision-free edges registered by a planner.
  void add_adjacency(CachedEdge& e);
  const std::vector<CachedEdge*>& forward_edges(int vid) const;
  std::vector<const CachedEdge*> all_adjacency() const;

  // Dense polyline of an edge (recomputed on demand; traces are not
  // stored to bound memory).
  std::vector<Point2> edge_trace(const CachedEdge& e) const;

  Metrics& metrics() { return metrics_; }
  const Metrics& metrics() const { return metrics_; }

 private:
  static std::uint64_t edge_key(int from, int to) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from))
            << 32) |
           static_cast<std::uint32_t>(to);
  }

  std::vector<int> candidates_within(const Point2& center, double r) const;
  CachedEdge& compute_edge(int from, int to);

  const Workspace* workspace_;
  SystemKind system_;
  GraphConfig config_;
  std::deque<Vertex> vertices_;
  std::unordered_map<std::uint64_t, CachedEdge> edges_;
  std::vector<std::vector<CachedEdge*>> adjacency_;
  Metrics metrics_;

  // Uniform grid over positions for near queries.
  double cell_size_;
  std::unordered_map<std::uint64_t, std::vector<int>> grid_;
  std::uint64_t grid_cell(const Point2& p) const;
};

}  // namespace topoplan
