#pragma once

#include <set>

#include "topoplan/planner_types.hpp"

namespace topoplan {

struct FmhtConfig {
  std::size_t samples = 500;
  double gamma_multiplier = 1.1;
  std::optional<double> gamma;  // overrides the derived default
  // Lazy collision checking per the batch algorithm; eager mode resolves
  // edges at expansion time and relaxes like uniform-cost search, which
  // makes the result exactly graph-optimal (used for verification).
  bool lazy = true;
  double trace_resolution = 0.05;
  double key_tol = kSigKeyTol;
  std::uint64_t seed = 0;
  double rho = 1.0;
};

// Candidate node produced by propagating an open node along its cached
// forward edges; carries no cost or parent yet.
struct ForwardCandidate {
  Vertex* vertex = nullptr;
  CachedEdge* via = nullptr;
  HSig hsig;
  SigKey key;
};

std::vector<ForwardCandidate> fmht_propagate_forward(
    const Node& z, std::vector<std::pair<Vertex*, CachedEdge*>>& forward,
    const SignaturePolicy& policy, double key_tol);

struct BackwardConnection {
  NodePtr parent;
  CachedEdge* edge = nullptr;
  double total = 0.0;
};

// Minimum-cost connection to the candidate class over open backward
// nodes, obstacles ignored; nullopt when no open node propagates into
// the class.
std::optional<BackwardConnection> fmht_optimal_backward_connect(
    const SigKey& candidate_key,
    std::vector<std::pair<Vertex*, CachedEdge*>>& backward, double key_tol);

// Batch planner: samples once, then runs the dynamic-programming
// recursion over the r-disk graph, projecting the tree into the
// signature-augmented space in cost-to-arrive order.
class FmhtPlanner {
 public:
  FmhtPlanner(const Workspace& w, SystemKind system, const State& start,
              const GoalRegion& goal, const SignaturePolicy& policy,
              const TerminationRule& rule, const FmhtConfig& config);

  PlanResult run();

  Graph& graph() { return graph_; }
  const Graph& graph() const { return graph_; }
  double connection_radius() const { return radius_; }

 private:
  struct OpenKey {
    double cost;
    int vertex_id;
    SigKey key;
    bool operator<(const OpenKey& o) const {
      if (cost != o.cost) return cost < o.cost;
      if (vertex_id != o.vertex_id) return vertex_id < o.vertex_id;
      return key < o.key;
    }
  };

  void expand_lazy(const NodePtr& z, std::vector<NodePtr>& staged);
  void expand_eager(const NodePtr& z);
  void append_goal(const NodePtr& z);
  bool rule_satisfied() const;
  void snapshot();

  const Workspace& workspace_;
  SystemKind system_;
  State start_;
  GoalRegion goal_;
  SignaturePolicy policy_;
  TerminationRule rule_;
  FmhtConfig config_;
  Graph graph_;
  double radius_ = 0.0;

  std::map<OpenKey, NodePtr> open_;
  struct GoalEntry {
    NodePtr node;
    HSig propagated;
  };
  std::map<SigKey, GoalEntry> goal_set_;
  PlanResult result_;
  std::uint64_t iteration_ = 0;
};

PlanResult fmht_plan(const Workspace& w, SystemKind system, const State& start,
                     const GoalRegion& goal, const SignaturePolicy& policy,
                     const TerminationRule& rule, const FmhtConfig& config);

}  // namespace topoplan
