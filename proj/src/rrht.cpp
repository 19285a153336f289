#include "topoplan/rrht.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace topoplan {

std::vector<NodePtr> propagate_edge(const CachedEdge& e,
                                    const std::vector<NodePtr>& nodes,
                                    const SignaturePolicy& policy,
                                    double key_tol) {
  std::vector<NodePtr> out;
  if (!e.hsig_valid) return out;
  for (const NodePtr& n : nodes) {
    HSig sig = add(n->hsig, e.hsig_increment);
    if (!is_allowed(sig, policy)) continue;
    auto child = std::make_shared<Node>();
    child->hsig = std::move(sig);
    child->cost = n->cost + e.steer.cost;
    child->parent = n;
    child->vertex_id = e.to;
    child->key = quantize_key(child->hsig, key_tol);
    child->parent_from = e.from;
    child->parent_to = e.to;
    out.push_back(std::move(child));
  }
  return out;
}

RrhtPlanner::RrhtPlanner(const Workspace& w, SystemKind system,
                         const State& start, const GoalRegion& goal,
                         const SignaturePolicy& policy,
                         const RrhtConfig& config)
    : workspace_(w),
      system_(system),
      start_(start),
      goal_(goal),
      policy_(policy),
      config_(config),
      graph_(w, system,
             GraphConfig{config.trace_resolution, config.key_tol, config.rho}) {
  if (point_in_obstacle(start.position, w) ||
      !w.bounds.contains(start.position))
    throw Error("rrht: start state is not in free space");
  eta_ = config.eta.value_or(0.1 * w.bounds.diagonal());
  gamma_ = config.gamma.value_or(default_gamma_incremental(
      w.bounds, system_dimension(system), config.gamma_multiplier));

  Vertex& root_vertex = graph_.add_vertex(start_);
  auto root = std::make_shared<Node>();
  root->hsig = zero_hsig(w.obstacle_count());
  root->cost = 0.0;
  root->vertex_id = root_vertex.id;
  root->key = quantize_key(root->hsig, config.key_tol);
  graph_.append_node(root_vertex, root);
  if (goal_.contains(root_vertex.state.position)) {
    goal_vertex_ids_.push_back(root_vertex.id);
    goal_inc_.push_back(zero_hsig(w.obstacle_count()));
  }
}

double RrhtPlanner::current_radius() const {
  const std::size_t n = graph_.vertex_count();
  if (n < 2) return eta_;
  return std::min(radius(n, gamma_, system_dimension(system_)), eta_);
}

RrhtPlanner::ExtendOutcome RrhtPlanner::extend(const State& x_rand) {
  const int nearest_id = graph_.nearest(x_rand);
  if (nearest_id < 0) return {false, -1, "empty_graph"};
  Vertex& v_nearest = graph_.vertex(nearest_id);
  if (v_nearest.state.same_as(x_rand)) return {false, -1, "duplicate_sample"};

  const SteerResult steered =
      steer(v_nearest.state, x_rand, eta_, system_, config_.rho);
  const State x_new = steered.end_state;

  if (!workspace_.bounds.contains(x_new.position))
    return {false, -1, "out_of_bounds"};
  if (point_in_obstacle(x_new.position, workspace_))
    return {false, -1, "state_in_collision"};
  for (const Vertex& v : graph_.vertices()) {
    if (v.state.same_as(x_new)) return {false, -1, "duplicate_state"};
  }

  // The extension edge is a computed steering solution whether or not
  // the vertex is eventually kept; count it and its collision check.
  Metrics& m = graph_.metrics();
  HSig inc;
  bool degenerate = false;
  std::vector<Point2> pts;
  try {
    if (system_ == SystemKind::kHolonomic) {
      inc = segment_hsig(v_nearest.state.position, x_new.position, workspace_);
    } else {
      pts = adaptive_trace(steered, config_.trace_resolution,
                           workspace_.representative_points);
      inc = polyline_hsig(pts, workspace_);
    }
  } catch (const DegenerateSegment&) {
    degenerate = true;  // runs through a representative point: blocked
  }
  m.edges_computed++;
  if (degenerate) return {false, -1, "edge_in_collision"};
  const bool free =
      system_ == SystemKind::kHolonomic
          ? segment_collision_free(v_nearest.state.position, x_new.position,
                                   workspace_)
          : polyline_collision_free(pts, workspace_);
  m.collision_checks++;
  if (!free) return {false, -1, "edge_in_collision"};

  // Propagate the nearest vertex's classes across the new edge; the
  // vertex is only worth keeping if at least one class survives.
  std::vector<NodePtr> parents;
  parents.reserve(v_nearest.nodes.size());
  for (const auto& [key, n] : v_nearest.nodes) parents.push_back(n);

  CachedEdge probe;
  probe.from = v_nearest.id;
  probe.to = static_cast<int>(graph_.vertex_count());  // id the vertex will get
  probe.steer = steered;
  probe.hsig_increment = inc;
  auto children = propagate_edge(probe, parents, policy_, config_.key_tol);
  if (children.empty()) return {false, -1, "all_classes_blocked"};

  Vertex& v_new = graph_.add_vertex(x_new);
  CachedEdge& e = graph_.insert_resolved_edge(
      v_nearest.id, v_new.id, steered, std::move(inc), true, Collision::kFree);
  graph_.add_adjacency(e);
  for (NodePtr& child : children) graph_.append_node(v_new, child);

  if (goal_.contains(x_new.position)) {
    goal_vertex_ids_.push_back(v_new.id);
    try {
      goal_inc_.push_back(
          x_new.position.dist(goal_.representative) <= kGeomEps
              ? zero_hsig(workspace_.obstacle_count())
              : segment_hsig(x_new.position, goal_.representative, workspace_));
    } catch (const DegenerateSegment&) {
      goal_inc_.push_back(std::nullopt);
    }
  }
  return {true, v_new.id, ""};
}

void RrhtPlanner::choose_parent(
    Vertex& v_new, std::vector<std::pair<Vertex*, CachedEdge*>>& backward) {
  for (auto& [u, e] : backward) {
    if (!e->hsig_valid) continue;
    if (graph_.check_collision(*e) == Collision::kBlocked) continue;
    graph_.add_adjacency(*e);
    std::vector<NodePtr> parents;
    parents.reserve(u->nodes.size());
    for (const auto& [key, n] : u->nodes) parents.push_back(n);
    for (NodePtr& child : propagate_edge(*e, parents, policy_, config_.key_tol))
      graph_.append_node(v_new, child);
  }
}

void RrhtPlanner::rewire(
    Vertex& v_new, std::vector<std::pair<Vertex*, CachedEdge*>>& forward) {
  for (auto& [u, e] : forward) {
    if (!e->hsig_valid) continue;
    if (graph_.check_collision(*e) == Collision::kBlocked) continue;
    graph_.add_adjacency(*e);
  }

  // Exhaustive uniform-cost search seeded with the new vertex's nodes:
  // pops in cost order, relaxes every cached collision-free forward edge
  // of the popped vertex, re-queues accepted improvements.
  struct QueueKey {
    double cost;
    int vertex_id;
    SigKey key;
    std::uint64_t seq;
    bool operator<(const QueueKey& o) const {
      if (cost != o.cost) return cost < o.cost;
      if (vertex_id != o.vertex_id) return vertex_id < o.vertex_id;
      if (key != o.key) return key < o.key;
      return seq < o.seq;
    }
  };
  std::map<QueueKey, NodePtr> queue;
  std::uint64_t seq = 0;
  for (const auto& [key, n] : v_new.nodes) {
    queue.emplace(QueueKey{n->cost, n->vertex_id, key, seq++}, n);
  }

  while (!queue.empty()) {
    NodePtr n = queue.begin()->second;
    queue.erase(queue.begin());
    if (!n->alive) continue;  // pruned while queued

    for (CachedEdge* e : graph_.forward_edges(n->vertex_id)) {
      HSig sig = add(n->hsig, e->hsig_increment);
      if (!is_allowed(sig, policy_)) continue;
      const double cost = n->cost + e->steer.cost;
      Vertex& target = graph_.vertex(e->to);
      SigKey key = quantize_key(sig, config_.key_tol);
      auto it = target.nodes.find(key);
      if (it != target.nodes.end() && it->second->cost <= cost + 1e-12)
        continue;
      auto child = std::make_shared<Node>();
      child->hsig = std::move(sig);
      child->cost = cost;
      child->parent = n;
      child->vertex_id = e->to;
      child->key = std::move(key);
      child->parent_from = e->from;
      child->parent_to = e->to;
      if (graph_.append_node(target, child) == AppendOutcome::kAccepted) {
        queue.emplace(QueueKey{child->cost, child->vertex_id, child->key, seq++},
                      child);
      }
    }
  }
}

std::map<SigKey, std::pair<NodePtr, HSig>> RrhtPlanner::goal_incumbents()
    const {
  std::map<SigKey, std::pair<NodePtr, HSig>> best;
  for (std::size_t i = 0; i < goal_vertex_ids_.size(); ++i) {
    if (!goal_inc_[i]) continue;
    const Vertex& v = graph_.vertex(goal_vertex_ids_[i]);
    for (const auto& [key, n] : v.nodes) {
      HSig propagated = add(n->hsig, *goal_inc_[i]);
      SigKey pkey = quantize_key(propagated, config_.key_tol);
      auto it = best.find(pkey);
      if (it == best.end() || n->cost < it->second.first->cost) {
        best[pkey] = {n, std::move(propagated)};
      }
    }
  }
  return best;
}

void RrhtPlanner::refresh_goal_events() {
  for (const auto& [pkey, entry] : goal_incumbents()) {
    auto it = incumbent_cost_.find(pkey);
    if (it == incumbent_cost_.end() ||
        entry.first->cost < it->second - 1e-12) {
      incumbent_cost_[pkey] = entry.first->cost;
      if (result_.goal_events.empty())
        result_.first_goal_iteration = iteration_;
      result_.goal_events.push_back({iteration_, pkey, entry.first->cost});
    }
  }
}

void RrhtPlanner::snapshot() {
  const Metrics& m = graph_.metrics();
  result_.snapshots.push_back({iteration_, m.node_count, m.vertex_count,
                               m.edges_computed, m.collision_checks});
}

PlanResult RrhtPlanner::run() {
  result_ = PlanResult{};
  Rng rng(config_.seed);
  const auto t0 = std::chrono::steady_clock::now();
  std::string termination = "iterations_exhausted";

  for (std::size_t i = 1; i <= config_.iterations; ++i) {
    iteration_ = i;
    State x_rand{Point2{rng.uniform(workspace_.bounds.min.x,
                                    workspace_.bounds.max.x),
                        rng.uniform(workspace_.bounds.min.y,
                                    workspace_.bounds.max.y)},
                 std::nullopt};
    if (system_ == SystemKind::kDubins)
      x_rand.heading =
          normalize_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));

    const ExtendOutcome outcome = extend(x_rand);
    if (outcome.accepted) {
      Vertex& v_new = graph_.vertex(outcome.new_vertex);
      const double r = current_radius();
      auto backward = graph_.near_backward(v_new.id, r);
      auto forward = graph_.near_forward(v_new.id, r);
      choose_parent(v_new, backward);
      rewire(v_new, forward);
      refresh_goal_events();
    }
    snapshot();

    if (config_.stop_class_count &&
        incumbent_cost_.size() >= *config_.stop_class_count) {
      termination = "class_count_reached";
      break;
    }
    if (config_.wall_clock_seconds) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      if (elapsed >= *config_.wall_clock_seconds) {
        termination = "wall_clock";
        break;
      }
    }
  }

  for (const auto& [pkey, entry] : goal_incumbents()) {
    result_.classes.push_back(
        extract_path(graph_, entry.first, pkey, entry.second));
  }
  result_.termination = termination;
  result_.metrics = graph_.metrics();
  result_.iterations = iteration_;
  result_.feasible = !result_.classes.empty();
  return result_;
}

PlanResult rrht_plan(const Workspace& w, SystemKind system, const State& start,
                     const GoalRegion& goal, const SignaturePolicy& policy,
                     const RrhtConfig& config) {
  RrhtPlanner planner(w, system, start, goal, policy, config);
  return planner.run();
}

}  // namespace topoplan
