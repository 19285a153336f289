#pragma once

#include "topoplan/planner_types.hpp"

namespace topoplan {

struct RrhtConfig {
  std::size_t iterations = 1000;
  std::optional<double> eta;  // one-step limit; default 10% of the diagonal
  double gamma_multiplier = 1.1;
  std::optional<double> gamma;
  std::optional<std::size_t> stop_class_count;
  std::optional<double> wall_clock_seconds;
  double trace_resolution = 0.05;
  double key_tol = kSigKeyTol;
  std::uint64_t seed = 0;
  double rho = 1.0;
};

// Propagates every node across a collision-free edge: summed signature,
// summed cost, parent set; blocked-signature results are dropped.
std::vector<NodePtr> propagate_edge(const CachedEdge& e,
                                    const std::vector<NodePtr>& nodes,
                                    const SignaturePolicy& policy,
                                    double key_tol);

// Incremental anytime planner: extend toward samples under the one-step
// limit, connect new vertices optimally per class, then push improvements
// through the cached graph with an exhaustive uniform-cost rewire.
class RrhtPlanner {
 public:
  RrhtPlanner(const Workspace& w, SystemKind system, const State& start,
              const GoalRegion& goal, const SignaturePolicy& policy,
              const RrhtConfig& config);

  PlanResult run();

  // Single extension attempt toward a given sample; exposed so the
  // extend/choose-parent/rewire pipeline can be driven directly.
  struct ExtendOutcome {
    bool accepted = false;
    int new_vertex = -1;
    std::string reason;  // set when rejected
  };
  ExtendOutcome extend(const State& x_rand);

  // Connects every class at the sources of collision-free backward edges
  // into the new vertex, dominance-filtered.
  void choose_parent(Vertex& v_new,
                     std::vector<std::pair<Vertex*, CachedEdge*>>& backward);
  // Exhaustive uniform-cost push of the new vertex's nodes through the
  // cached collision-free graph.
  void rewire(Vertex& v_new,
              std::vector<std::pair<Vertex*, CachedEdge*>>& forward);

  Graph& graph() { return graph_; }
  const Graph& graph() const { return graph_; }
  double eta() const { return eta_; }
  double current_radius() const;

  // Best-per-class over goal-region vertices right now.
  std::map<SigKey, std::pair<NodePtr, HSig>> goal_incumbents() const;

 private:
  void refresh_goal_events();
  void snapshot();

  const Workspace& workspace_;
  SystemKind system_;
  State start_;
  GoalRegion goal_;
  SignaturePolicy policy_;
  RrhtConfig config_;
  Graph graph_;
  double eta_ = 0.0;
  double gamma_ = 0.0;

  std::vector<int> goal_vertex_ids_;
  // Winding increment from each goal vertex to the goal representative;
  // nullopt when the propagation segment is degenerate.
  std::vector<std::optional<HSig>> goal_inc_;
  std::map<SigKey, double> incumbent_cost_;
  PlanResult result_;
  std::uint64_t iteration_ = 0;
};

PlanResult rrht_plan(const Workspace& w, SystemKind system, const State& start,
                     const GoalRegion& goal, const SignaturePolicy& policy,
                     const RrhtConfig& config);

}  // namespace topoplan
