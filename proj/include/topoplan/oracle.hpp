#pragma once

#include <map>

#include "topoplan/planner_types.hpp"

namespace topoplan {

// Directed edge of the explicit product graph used by the reference
// search; built independently of the planners' caches.
struct OracleArc {
  int from = -1;
  int to = -1;
  double cost = 0.0;
  HSig increment;
};

// All collision-free steering connections with cost <= r between the
// given states, recomputed from scratch (steering + winding + geometry).
std::vector<OracleArc> disk_graph_arcs(const std::vector<State>& states,
                                       double r, SystemKind system,
                                       const Workspace& w, double resolution,
                                       double rho = 1.0);

// The collision-free directed edges a planner registered, with cost and
// winding recomputed from the underlying primitives.
std::vector<OracleArc> arcs_from_graph(const Graph& g);

struct AugmentedCosts {
  // Exact cost-to-come per (vertex, class key) product state.
  std::map<std::pair<int, SigKey>, double> state_cost;
  // Minimum cost per goal class, labeled by propagation to the goal
  // representative exactly as the planners label theirs.
  std::map<SigKey, double> goal_class_cost;
};

// Multi-class Dijkstra over the explicit product graph from
// (root, zero signature); the brute-force reference the planners are
// checked against.
AugmentedCosts augmented_dijkstra(const std::vector<State>& states,
                                  const std::vector<OracleArc>& arcs,
                                  int root_id, const SignaturePolicy& policy,
                                  const GoalRegion& goal, const Workspace& w,
                                  double key_tol = kSigKeyTol);

struct DiskScenario {
  Point2 start;
  Point2 goal;
  Point2 center;
  double radius = 1.0;
};

enum class DiskSide { kUpper, kLower };

struct DiskShortest {
  double length = 0.0;
  bool blocked = false;  // false: straight segment clears the disk
};

// Analytic tangent-arc-tangent optimum around a disk obstacle.
DiskShortest disk_shortest(const DiskScenario& ds, DiskSide side);

// Signed crossing count of a rightward ray from zeta: the winding number
// of the closed trace, independent of any angle arithmetic.
int crossing_winding(const std::vector<Point2>& closed_trace,
                     const Point2& zeta);

}  // namespace topoplan
