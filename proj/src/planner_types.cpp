#include "topoplan/planner_types.hpp"

#include <algorithm>
#include <cmath>

namespace topoplan {

ClassPath extract_path(const Graph& g, const NodePtr& goal_node,
                       const SigKey& propagated_key,
                       const HSig& propagated_sig) {
  // Collect the chain root..goal.
  std::vector<const Node*> chain;
  for (const Node* n = goal_node.get(); n != nullptr; n = n->parent.get()) {
    chain.push_back(n);
  }
  std::reverse(chain.begin(), chain.end());

  ClassPath out;
  out.key = propagated_key;
  out.signature = propagated_sig;
  out.cost = goal_node->cost;

  const std::size_t dims = g.workspace().obstacle_count();
  if (chain.front()->parent != nullptr)
    throw Error("extract_path: chain does not end at a root");

  out.states.push_back(g.vertex(chain.front()->vertex_id).state);
  out.trace.push_back(g.vertex(chain.front()->vertex_id).state.position);

  for (std::size_t i = 1; i < chain.size(); ++i) {
    const Node* n = chain[i];
    const Node* p = chain[i - 1];
    const CachedEdge* e = g.find_edge(n->parent_from, n->parent_to);
    if (e == nullptr || e->from != p->vertex_id || e->to != n->vertex_id)
      throw Error("extract_path: missing tree edge");
    if (std::abs(n->cost - (p->cost + e->steer.cost)) > 1e-9)
      throw Error("extract_path: cost does not telescope");
    for (std::size_t l = 0; l < dims; ++l) {
      if (std::abs(n->hsig[l] - (p->hsig[l] + e->hsig_increment[l])) > 1e-9)
        throw Error("extract_path: signature does not telescope");
    }
    out.states.push_back(g.vertex(n->vertex_id).state);
    const auto pts = g.edge_trace(*e);
    out.trace.insert(out.trace.end(), pts.begin() + 1, pts.end());
  }

  // Final validation of the emitted path: collision-free, signature
  // recomputation matches, cost matches trace length.
  if (out.trace.size() >= 2) {
    if (!polyline_collision_free(out.trace, g.workspace()))
      throw Error("extract_path: emitted path is not collision-free");
    const HSig recomputed = polyline_hsig(out.trace, g.workspace());
    for (std::size_t l = 0; l < dims; ++l) {
      if (std::abs(recomputed[l] - goal_node->hsig[l]) > 1e-6)
        throw Error("extract_path: signature recomputation mismatch");
    }
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < out.trace.size(); ++i) {
      len += out.trace[i].dist(out.trace[i + 1]);
    }
    if (std::abs(len - out.cost) > 1e-3 * std::max(1.0, out.cost))
      throw Error("extract_path: trace length disagrees with cost");
  }
  return out;
}

}  // namespace topoplan
