#include "topoplan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace topoplan {

double radius(std::size_t n, double gamma, int d) {
  if (n < 2) throw Error("radius: need at least 2 vertices");
  const double nn = static_cast<double>(n);
  return gamma * std::pow(std::log(nn) / nn, 1.0 / d);
}

namespace {

// Free-space measure proxy and unit-ball volume for the connection
// radius. d = 3 adds the heading dimension (volume 2*pi).
double space_measure(const Rect& bounds, int d) {
  return d == 3 ? bounds.area() * 2.0 * std::numbers::pi : bounds.area();
}

double unit_ball_volume(int d) {
  return d == 3 ? 4.0 * std::numbers::pi / 3.0 : std::numbers::pi;
}

}  // namespace

double default_gamma_batch(const Rect& bounds, int d, double multiplier) {
  return multiplier * 2.0 *
         std::pow((1.0 / d) * space_measure(bounds, d) / unit_ball_volume(d),
                  1.0 / d);
}

double default_gamma_incremental(const Rect& bounds, int d,
                                 double multiplier) {
  return multiplier *
         std::pow(2.0 * (1.0 + 1.0 / d) * space_measure(bounds, d) /
                      unit_ball_volume(d),
                  1.0 / d);
}

Graph::Graph(const Workspace& w, SystemKind system, GraphConfig config)
    : workspace_(&w), system_(system), config_(config) {
  cell_size_ = std::max(w.bounds.diagonal() / 64.0, 1e-9);
}

std::uint64_t Graph::grid_cell(const Point2& p) const {
  const auto ix = static_cast<std::int64_t>(
      std::floor((p.x - workspace_->bounds.min.x) / cell_size_));
  const auto iy = static_cast<std::int64_t>(
      std::floor((p.y - workspace_->bounds.min.y) / cell_size_));
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint32_t>(iy);
}

Vertex& Graph::add_vertex(const State& x) {
  for (const Vertex& v : vertices_) {
    if (v.state.same_as(x))
      throw Error("add_vertex: duplicate state");
  }
  Vertex v;
  v.id = static_cast<int>(vertices_.size());
  v.state = x;
  vertices_.push_back(std::move(v));
  adjacency_.emplace_back();
  grid_[grid_cell(x.position)].push_back(vertices_.back().id);
  metrics_.vertex_count++;
  return vertices_.back();
}

CachedEdge& Graph::compute_edge(int from, int to) {
  const Vertex& a = vertex(from);
  const Vertex& b = vertex(to);
  CachedEdge e;
  e.from = from;
  e.to = to;
  e.steer = connect(a.state, b.state, system_, config_.rho);
  try {
    if (system_ == SystemKind::kHolonomic) {
      // Exact for a straight chord; the swept angle from any off-chord
      // point stays below pi.
      e.hsig_increment =
          segment_hsig(a.state.position, b.state.position, *workspace_);
    } else {
      const auto pts = adaptive_trace(e.steer, config_.trace_resolution,
                                      workspace_->representative_points);
      e.hsig_increment = polyline_hsig(pts, *workspace_);
    }
  } catch (const DegenerateSegment&) {
    // Trace runs through a representative point, which sits inside an
    // obstacle: the edge is blocked and carries no usable winding.
    e.hsig_increment = zero_hsig(workspace_->obstacle_count());
    e.hsig_valid = false;
    e.collision = Collision::kBlocked;
  }
  metrics_.edges_computed++;
  auto [it, inserted] = edges_.emplace(edge_key(from, to), std::move(e));
  return it->second;
}

CachedEdge& Graph::edge(int from, int to) {
  auto it = edges_.find(edge_key(from, to));
  if (it != edges_.end()) return it->second;
  return compute_edge(from, to);
}

CachedEdge* Graph::find_edge(int from, int to) {
  auto it = edges_.find(edge_key(from, to));
  return it == edges_.end() ? nullptr : &it->second;
}

const CachedEdge* Graph::find_edge(int from, int to) const {
  auto it = edges_.find(edge_key(from, to));
  return it == edges_.end() ? nullptr : &it->second;
}

CachedEdge& Graph::insert_resolved_edge(int from, int to, SteerResult steer,
                                        HSig increment, bool hsig_valid,
                                        Collision status) {
  CachedEdge e;
  e.from = from;
  e.to = to;
  e.steer = std::move(steer);
  e.hsig_increment = std::move(increment);
  e.hsig_valid = hsig_valid;
  e.collision = status;
  auto [it, inserted] = edges_.emplace(edge_key(from, to), std::move(e));
  return it->second;
}

std::vector<int> Graph::candidates_within(const Point2& center,
                                          double r) const {
  std::vector<int> ids;
  const auto lo_x = static_cast<std::int64_t>(
      std::floor((center.x - r - workspace_->bounds.min.x) / cell_size_));
  const auto hi_x = static_cast<std::int64_t>(
      std::floor((center.x + r - workspace_->bounds.min.x) / cell_size_));
  const auto lo_y = static_cast<std::int64_t>(
      std::floor((center.y - r - workspace_->bounds.min.y) / cell_size_));
  const auto hi_y = static_cast<std::int64_t>(
      std::floor((center.y + r - workspace_->bounds.min.y) / cell_size_));
  for (std::int64_t ix = lo_x; ix <= hi_x; ++ix) {
    for (std::int64_t iy = lo_y; iy <= hi_y; ++iy) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
          static_cast<std::uint32_t>(iy);
      auto it = grid_.find(key);
      if (it == grid_.end()) continue;
      for (int id : it->second) {
        if (vertex(id).state.position.dist(center) <= r) ids.push_back(id);
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::pair<Vertex*, CachedEdge*>> Graph::near_forward(int from_id,
                                                                 double r) {
  std::vector<std::pair<Vertex*, CachedEdge*>> out;
  const Point2 center = vertex(from_id).state.position;
  // Euclidean distance lower-bounds the steering cost for both systems,
  // so the grid prefilter is exact-complete.
  for (int id : candidates_within(center, r)) {
    if (id == from_id) continue;
    CachedEdge& e = edge(from_id, id);
    if (e.steer.cost <= r) out.emplace_back(&vertex(id), &e);
  }
  return out;
}

std::vector<std::pair<Vertex*, CachedEdge*>> Graph::near_backward(int to_id,
                                                                  double r) {
  std::vector<std::pair<Vertex*, CachedEdge*>> out;
  const Point2 center = vertex(to_id).state.position;
  for (int id : candidates_within(center, r)) {
    if (id == to_id) continue;
    CachedEdge& e = edge(id, to_id);
    if (e.steer.cost <= r) out.emplace_back(&vertex(id), &e);
  }
  return out;
}

int Graph::nearest(const State& x) const {
  if (vertices_.empty()) return -1;
  if (system_ == SystemKind::kHolonomic) {
    int best = -1;
    double best_d = 0.0;
    for (const Vertex& v : vertices_) {
      const double d = v.state.position.dist(x.position);
      if (best < 0 || d < best_d) {
        best = v.id;
        best_d = d;
      }
    }
    return best;
  }
  // Dubins: evaluate in ascending Euclidean order and stop once the
  // lower bound exceeds the incumbent.
  std::vector<std::pair<double, int>> order;
  order.reserve(vertices_.size());
  for (const Vertex& v : vertices_) {
    order.emplace_back(v.state.position.dist(x.position), v.id);
  }
  std::sort(order.begin(), order.end());
  int best = -1;
  double best_cost = 0.0;
  for (const auto& [lb, id] : order) {
    if (best >= 0 && lb >= best_cost) break;
    const double c =
        connect(vertex(id).state, x, system_, config_.rho).cost;
    if (best < 0 || c < best_cost) {
      best = id;
      best_cost = c;
    }
  }
  return best;
}

Collision Graph::check_collision(CachedEdge& e) {
  if (e.collision == Collision::kUnknown) {
    bool free;
    if (system_ == SystemKind::kHolonomic) {
      // The chord is the exact geometry; no need to walk the trace.
      free = segment_collision_free(vertex(e.from).state.position,
                                    vertex(e.to).state.position, *workspace_);
    } else {
      free = polyline_collision_free(edge_trace(e), *workspace_);
    }
    e.collision = free ? Collision::kFree : Collision::kBlocked;
    metrics_.collision_checks++;
  }
  return e.collision;
}

AppendOutcome Graph::append_node(Vertex& v, NodePtr candidate) {
  auto it = v.nodes.find(candidate->key);
  if (it != v.nodes.end()) {
    // Keep the incumbent on ties (within 1e-12) for determinism.
    if (it->second->cost <= candidate->cost + 1e-12)
      return AppendOutcome::kDominated;
    it->second->alive = false;
    it->second = std::move(candidate);
    return AppendOutcome::kAccepted;
  }
  v.nodes.emplace(candidate->key, std::move(candidate));
  metrics_.node_count++;
  return AppendOutcome::kAccepted;
}

void Graph::add_adjacency(CachedEdge& e) {
  auto& lst = adjacency_[static_cast<std::size_t>(e.from)];
  for (const CachedEdge* existing : lst) {
    if (existing->to == e.to) return;
  }
  lst.push_back(&e);
  std::sort(lst.begin(), lst.end(),
            [](const CachedEdge* a, const CachedEdge* b) {
              return a->to < b->to;
            });
}

const std::vector<CachedEdge*>& Graph::forward_edges(int vid) const {
  return adjacency_[static_cast<std::size_t>(vid)];
}

std::vector<const CachedEdge*> Graph::all_adjacency() const {
  std::vector<const CachedEdge*> out;
  for (const auto& lst : adjacency_) {
    out.insert(out.end(), lst.begin(), lst.end());
  }
  return out;
}

std::vector<Point2> Graph::edge_trace(const CachedEdge& e) const {
  return adaptive_trace(e.steer, config_.trace_resolution,
                        workspace_->representative_points);
}

}  // namespace topoplan
