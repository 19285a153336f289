#include "topoplan/fmht.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace topoplan {

namespace {

NodePtr make_root(std::size_t dims, double key_tol) {
  auto n = std::make_shared<Node>();
  n->hsig = zero_hsig(dims);
  n->cost = 0.0;
  n->vertex_id = 0;
  n->key = quantize_key(n->hsig, key_tol);
  return n;
}

}  // namespace

std::vector<ForwardCandidate> fmht_propagate_forward(
    const Node& z, std::vector<std::pair<Vertex*, CachedEdge*>>& forward,
    const SignaturePolicy& policy, double key_tol) {
  std::vector<ForwardCandidate> out;
  for (auto& [v, e] : forward) {
    if (!e->hsig_valid) continue;
    HSig sig = add(z.hsig, e->hsig_increment);
    if (!is_allowed(sig, policy)) continue;
    SigKey key = quantize_key(sig, key_tol);
    out.push_back({v, e, std::move(sig), std::move(key)});
  }
  return out;
}

std::optional<BackwardConnection> fmht_optimal_backward_connect(
    const SigKey& candidate_key,
    std::vector<std::pair<Vertex*, CachedEdge*>>& backward, double key_tol) {
  std::optional<BackwardConnection> best;
  for (auto& [u, eb] : backward) {
    if (!eb->hsig_valid) continue;
    for (const auto& [ukey, y] : u->nodes) {
      if (!y->open) continue;
      if (quantize_key(add(y->hsig, eb->hsig_increment), key_tol) !=
          candidate_key)
        continue;
      const double total = y->cost + eb->steer.cost;
      if (!best || total < best->total) best = BackwardConnection{y, eb, total};
    }
  }
  return best;
}

FmhtPlanner::FmhtPlanner(const Workspace& w, SystemKind system,
                         const State& start, const GoalRegion& goal,
                         const SignaturePolicy& policy,
                         const TerminationRule& rule, const FmhtConfig& config)
    : workspace_(w),
      system_(system),
      start_(start),
      goal_(goal),
      policy_(policy),
      rule_(rule),
      config_(config),
      graph_(w, system,
             GraphConfig{config.trace_resolution, config.key_tol, config.rho}) {
  if (point_in_obstacle(start.position, w) ||
      !w.bounds.contains(start.position))
    throw Error("fmht: start state is not in free space");
}

void FmhtPlanner::snapshot() {
  const Metrics& m = graph_.metrics();
  result_.snapshots.push_back({iteration_, m.node_count, m.vertex_count,
                               m.edges_computed, m.collision_checks});
}

bool FmhtPlanner::rule_satisfied() const {
  if (rule_.target_signature &&
      goal_set_.count(quantize_key(*rule_.target_signature, config_.key_tol)))
    return true;
  if (rule_.class_count && goal_set_.size() >= *rule_.class_count) return true;
  return false;
}

void FmhtPlanner::append_goal(const NodePtr& z) {
  const Point2 pos = graph_.vertex(z->vertex_id).state.position;
  HSig inc = zero_hsig(workspace_.obstacle_count());
  if (pos.dist(goal_.representative) > kGeomEps)
    inc = segment_hsig(pos, goal_.representative, workspace_);
  const HSig propagated = add(z->hsig, inc);
  const SigKey key = quantize_key(propagated, config_.key_tol);
  if (goal_set_.count(key)) return;
  goal_set_.emplace(key, GoalEntry{z, propagated});
  if (result_.goal_events.empty()) result_.first_goal_iteration = iteration_;
  result_.goal_events.push_back({iteration_, key, z->cost});
}

void FmhtPlanner::expand_lazy(const NodePtr& z, std::vector<NodePtr>& staged) {
  auto forward = graph_.near_forward(z->vertex_id, radius_);
  auto candidates =
      fmht_propagate_forward(*z, forward, policy_, config_.key_tol);
  for (ForwardCandidate& cand : candidates) {
    if (cand.vertex->nodes.count(cand.key)) continue;  // already in the tree

    auto backward = graph_.near_backward(cand.vertex->id, radius_);
    auto best =
        fmht_optimal_backward_connect(cand.key, backward, config_.key_tol);
    if (!best) continue;  // deferred: no open predecessor in this class

    // Lazy collision checking: only the optimal connection is resolved;
    // a blocked result defers the candidate to a later expansion.
    if (graph_.check_collision(*best->edge) == Collision::kBlocked) continue;

    auto n = std::make_shared<Node>();
    n->hsig = add(best->parent->hsig, best->edge->hsig_increment);
    n->cost = best->total;
    n->parent = best->parent;
    n->vertex_id = cand.vertex->id;
    n->key = quantize_key(n->hsig, config_.key_tol);
    n->parent_from = best->edge->from;
    n->parent_to = best->edge->to;
    n->created_iter = iteration_;
    if (cand.vertex->nodes.count(n->key)) continue;  // boundary guard
    staged.push_back(std::move(n));
  }
}

void FmhtPlanner::expand_eager(const NodePtr& z) {
  auto forward = graph_.near_forward(z->vertex_id, radius_);
  for (auto& [v, e] : forward) {
    if (!e->hsig_valid) continue;
    if (graph_.check_collision(*e) == Collision::kBlocked) continue;
    const HSig sig = add(z->hsig, e->hsig_increment);
    if (!is_allowed(sig, policy_)) continue;
    const SigKey key = quantize_key(sig, config_.key_tol);
    const double cost = z->cost + e->steer.cost;
    auto it = v->nodes.find(key);
    if (it != v->nodes.end()) {
      NodePtr existing = it->second;
      if (!existing->open) continue;
      if (existing->cost <= cost + 1e-12) continue;
      open_.erase(OpenKey{existing->cost, v->id, key});
      existing->cost = cost;
      existing->hsig = sig;
      existing->parent = z;
      existing->parent_from = e->from;
      existing->parent_to = e->to;
      open_.emplace(OpenKey{cost, v->id, key}, existing);
    } else {
      auto n = std::make_shared<Node>();
      n->hsig = sig;
      n->cost = cost;
      n->parent = z;
      n->vertex_id = v->id;
      n->key = key;
      n->parent_from = e->from;
      n->parent_to = e->to;
      graph_.append_node(*v, n);
      open_.emplace(OpenKey{cost, v->id, key}, n);
    }
  }
}

PlanResult FmhtPlanner::run() {
  result_ = PlanResult{};

  if (rule_.target_signature && !is_allowed(*rule_.target_signature, policy_)) {
    result_.termination = "target_signature_blocked";
    result_.feasible = false;
    result_.metrics = graph_.metrics();
    return result_;
  }

  Vertex& root_vertex = graph_.add_vertex(start_);
  Rng rng(config_.seed);
  const auto samples = sample_free(config_.samples, workspace_, rng);
  for (const Point2& p : samples) {
    State s{p, std::nullopt};
    if (system_ == SystemKind::kDubins)
      s.heading =
          normalize_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
    try {
      graph_.add_vertex(s);
    } catch (const Error&) {
      // Duplicate draw; measure zero, simply skipped.
    }
  }

  const int d = system_dimension(system_);
  const double gamma = config_.gamma.value_or(
      default_gamma_batch(workspace_.bounds, d, config_.gamma_multiplier));
  radius_ = radius(graph_.vertex_count(), gamma, d);

  NodePtr root = make_root(workspace_.obstacle_count(), config_.key_tol);
  graph_.append_node(root_vertex, root);
  open_.emplace(OpenKey{0.0, root->vertex_id, root->key}, root);
  NodePtr z = root;
  if (goal_.contains(root_vertex.state.position)) append_goal(z);

  while (true) {
    if (rule_satisfied()) {
      result_.termination =
          rule_.target_signature &&
                  goal_set_.count(quantize_key(*rule_.target_signature,
                                               config_.key_tol))
              ? "target_signature_found"
              : "class_count_reached";
      break;
    }

    if (config_.lazy) {
      std::vector<NodePtr> staged;
      expand_lazy(z, staged);
      z->open = false;
      z->closed_iter = iteration_;
      open_.erase(OpenKey{z->cost, z->vertex_id, z->key});
      for (NodePtr& n : staged) {
        Vertex& v = graph_.vertex(n->vertex_id);
        const OpenKey ok{n->cost, n->vertex_id, n->key};
        if (graph_.append_node(v, n) == AppendOutcome::kAccepted)
          open_.emplace(ok, n);
      }
    } else {
      expand_eager(z);
      z->open = false;
      z->closed_iter = iteration_;
      open_.erase(OpenKey{z->cost, z->vertex_id, z->key});
    }

    ++iteration_;
    snapshot();

    if (open_.empty()) {
      result_.termination = "open_set_exhausted";
      break;
    }
    z = open_.begin()->second;
    if (goal_.contains(graph_.vertex(z->vertex_id).state.position))
      append_goal(z);
  }

  for (const auto& [key, entry] : goal_set_) {
    result_.classes.push_back(
        extract_path(graph_, entry.node, key, entry.propagated));
  }
  result_.metrics = graph_.metrics();
  result_.iterations = iteration_;
  if (rule_.target_signature) {
    result_.feasible =
        goal_set_.count(
            quantize_key(*rule_.target_signature, config_.key_tol)) > 0;
  } else if (rule_.class_count) {
    result_.feasible = goal_set_.size() >= *rule_.class_count;
  } else {
    result_.feasible = !result_.classes.empty();
  }
  return result_;
}

PlanResult fmht_plan(const Workspace& w, SystemKind system, const State& start,
                     const GoalRegion& goal, const SignaturePolicy& policy,
                     const TerminationRule& rule, const FmhtConfig& config) {
  FmhtPlanner planner(w, system, start, goal, policy, rule, config);
  return planner.run();
}

}  // namespace topoplan
