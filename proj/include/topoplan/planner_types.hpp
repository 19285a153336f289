#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topoplan/graph.hpp"

namespace topoplan {

struct GoalRegion {
  Point2 center;
  double radius = 0.0;
  // Winding reference all goal classes are propagated to; defaults to
  // the center.
  Point2 representative;

  bool contains(const Point2& p) const {
    return p.dist(center) <= radius;
  }
};

struct TerminationRule {
  std::optional<std::size_t> class_count;
  std::optional<HSig> target_signature;
  // Always terminates when nothing is left to explore; kept explicit so
  // scenario files can state intent.
  bool exhaust = true;
};

// One optimal path per discovered homology class.
struct ClassPath {
  SigKey key;        // propagated-to-goal-representative class key
  HSig signature;    // real-valued signature of the same
  double cost = 0.0;
  std::vector<State> states;
  std::vector<Point2> trace;
};

struct MetricsSnapshot {
  std::uint64_t iteration = 0;
  std::uint64_t node_count = 0;
  std::uint64_t vertex_count = 0;
  std::uint64_t edges_computed = 0;
  std::uint64_t collision_checks = 0;
};

struct GoalEvent {
  std::uint64_t iteration = 0;
  SigKey key;
  double cost = 0.0;
};

struct PlanResult {
  bool feasible = false;
  std::string termination;
  std::vector<ClassPath> classes;  // sorted by key
  Metrics metrics;
  std::vector<MetricsSnapshot> snapshots;
  std::vector<GoalEvent> goal_events;
  std::uint64_t iterations = 0;
  // Iteration index at which the first goal class appeared (planner
  // specific meaning: pops for the batch planner, samples for the
  // incremental one). 0 when no goal was found.
  std::uint64_t first_goal_iteration = 0;
};

// Walks parent links to the root and assembles states plus the dense
// geometric trace. Verifies tree consistency, collision freedom and
// signature agreement on the way; throws on violation.
ClassPath extract_path(const Graph& g, const NodePtr& goal_node,
                       const SigKey& propagated_key,
                       const HSig& propagated_sig);

}  // namespace topoplan
