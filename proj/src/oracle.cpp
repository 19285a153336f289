#include "topoplan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>

namespace topoplan {

namespace {

// Cost and winding of a single directed connection, or nullopt when it
// is blocked; shares only the low-level primitives with the planners.
std::optional<OracleArc> make_arc(const std::vector<State>& states, int from,
                                  int to, SystemKind system,
                                  const Workspace& w, double resolution,
                                  double rho) {
  const SteerResult s = connect(states[from], states[to], system, rho);
  std::vector<Point2> pts;
  HSig inc;
  try {
    pts = adaptive_trace(s, resolution, w.representative_points);
    inc = polyline_hsig(pts, w);
  } catch (const DegenerateSegment&) {
    return std::nullopt;
  }
  if (!polyline_collision_free(pts, w)) return std::nullopt;
  return OracleArc{from, to, s.cost, std::move(inc)};
}

}  // namespace

std::vector<OracleArc> disk_graph_arcs(const std::vector<State>& states,
                                       double r, SystemKind system,
                                       const Workspace& w, double resolution,
                                       double rho) {
  std::vector<OracleArc> arcs;
  const int n = static_cast<int>(states.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      // Euclidean lower bound prunes before the steering solve.
      if (states[i].position.dist(states[j].position) > r) continue;
      const SteerResult s = connect(states[i], states[j], system, rho);
      if (s.cost > r) continue;
      if (auto arc = make_arc(states, i, j, system, w, resolution, rho))
        arcs.push_back(std::move(*arc));
    }
  }
  return arcs;
}

std::vector<OracleArc> arcs_from_graph(const Graph& g) {
  std::vector<State> states;
  states.reserve(g.vertex_count());
  for (const Vertex& v : g.vertices()) states.push_back(v.state);
  std::vector<OracleArc> arcs;
  for (const CachedEdge* e : g.all_adjacency()) {
    if (auto arc = make_arc(states, e->from, e->to, g.system(), g.workspace(),
                            g.config().trace_resolution, g.config().rho))
      arcs.push_back(std::move(*arc));
  }
  return arcs;
}

AugmentedCosts augmented_dijkstra(const std::vector<State>& states,
                                  const std::vector<OracleArc>& arcs,
                                  int root_id, const SignaturePolicy& policy,
                                  const GoalRegion& goal, const Workspace& w,
                                  double key_tol) {
  std::vector<std::vector<const OracleArc*>> out(states.size());
  for (const OracleArc& a : arcs) {
    out[static_cast<std::size_t>(a.from)].push_back(&a);
  }
  for (auto& lst : out) {
    std::sort(lst.begin(), lst.end(),
              [](const OracleArc* a, const OracleArc* b) {
                return a->to < b->to;
              });
  }

  using ProductState = std::pair<int, SigKey>;
  struct Label {
    double cost;
    HSig sig;
    bool closed = false;
  };
  std::map<ProductState, Label> labels;
  // Deterministic priority: (cost, vertex, class key).
  std::set<std::tuple<double, int, SigKey>> frontier;

  const HSig zero = zero_hsig(w.obstacle_count());
  const ProductState root{root_id, quantize_key(zero, key_tol)};
  labels[root] = Label{0.0, zero};
  frontier.insert({0.0, root_id, root.second});

  while (!frontier.empty()) {
    auto [cost, vid, key] = *frontier.begin();
    frontier.erase(frontier.begin());
    Label& cur = labels[{vid, key}];
    if (cur.closed) continue;
    cur.closed = true;
    const HSig cur_sig = cur.sig;

    for (const OracleArc* a : out[static_cast<std::size_t>(vid)]) {
      HSig sig = add(cur_sig, a->increment);
      if (!is_allowed(sig, policy)) continue;
      const double next_cost = cost + a->cost;
      const ProductState next{a->to, quantize_key(sig, key_tol)};
      auto it = labels.find(next);
      if (it == labels.end()) {
        labels[next] = Label{next_cost, std::move(sig)};
        frontier.insert({next_cost, next.first, next.second});
      } else if (!it->second.closed && next_cost < it->second.cost) {
        frontier.erase({it->second.cost, next.first, next.second});
        it->second.cost = next_cost;
        it->second.sig = std::move(sig);
        frontier.insert({next_cost, next.first, next.second});
      }
    }
  }

  AugmentedCosts result;
  for (const auto& [ps, label] : labels) {
    result.state_cost[ps] = label.cost;
    const Point2 pos = states[static_cast<std::size_t>(ps.first)].position;
    if (!goal.contains(pos)) continue;
    HSig propagated = label.sig;
    if (pos.dist(goal.representative) > kGeomEps) {
      try {
        propagated = add(label.sig, segment_hsig(pos, goal.representative, w));
      } catch (const DegenerateSegment&) {
        continue;
      }
    }
    const SigKey pkey = quantize_key(propagated, key_tol);
    auto it = result.goal_class_cost.find(pkey);
    if (it == result.goal_class_cost.end() || label.cost < it->second)
      result.goal_class_cost[pkey] = label.cost;
  }
  return result;
}

DiskShortest disk_shortest(const DiskScenario& ds, DiskSide side) {
  const double straight = ds.start.dist(ds.goal);
  if (point_segment_distance(ds.center, ds.start, ds.goal) >= ds.radius) {
    return {straight, false};
  }
  const double d1 = ds.start.dist(ds.center);
  const double d2 = ds.goal.dist(ds.center);
  if (d1 <= ds.radius || d2 <= ds.radius)
    throw Error("disk_shortest: endpoint inside the disk");

  const double phi1 = std::atan2(ds.start.y - ds.center.y,
                                 ds.start.x - ds.center.x);
  const double phi2 = std::atan2(ds.goal.y - ds.center.y,
                                 ds.goal.x - ds.center.x);
  const double a1 = std::acos(ds.radius / d1);
  const double a2 = std::acos(ds.radius / d2);
  const double tangent = std::sqrt(d1 * d1 - ds.radius * ds.radius) +
                         std::sqrt(d2 * d2 - ds.radius * ds.radius);

  auto mod_two_pi = [](double a) {
    double r = std::fmod(a, 2.0 * std::numbers::pi);
    if (r < 0.0) r += 2.0 * std::numbers::pi;
    return r;
  };
  // One side hugs the disk clockwise, the other counter-clockwise.
  double arc;
  if (side == DiskSide::kUpper) {
    arc = mod_two_pi((phi1 - a1) - (phi2 + a2));
  } else {
    arc = mod_two_pi((phi2 - a2) - (phi1 + a1));
  }
  return {tangent + ds.radius * arc, true};
}

int crossing_winding(const std::vector<Point2>& closed_trace,
                     const Point2& zeta) {
  if (closed_trace.size() < 3)
    throw Error("crossing_winding: need a closed trace");
  if (closed_trace.front().dist(closed_trace.back()) > 1e-9)
    throw Error("crossing_winding: trace is not closed");

  // Retry with a slightly rotated frame whenever a vertex lands exactly
  // on the reference ray.
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double rot = 1e-9 * attempt;
    const double c = std::cos(rot);
    const double s = std::sin(rot);
    auto tx = [&](const Point2& p) {
      const Point2 d = p - zeta;
      return Point2{c * d.x + s * d.y, -s * d.x + c * d.y};
    };

    bool degenerate = false;
    for (std::size_t i = 0; i + 1 < closed_trace.size(); ++i) {
      const Point2 p = tx(closed_trace[i]);
      if (std::abs(p.y) < 1e-14 && p.x > 0.0) {
        degenerate = true;
        break;
      }
    }
    if (degenerate) continue;

    int winding = 0;
    for (std::size_t i = 0; i + 1 < closed_trace.size(); ++i) {
      const Point2 p = tx(closed_trace[i]);
      const Point2 q = tx(closed_trace[i + 1]);
      if (p.y <= 0.0 && q.y > 0.0) {
        // Upward crossing; counts when it happens right of the origin.
        const double x_at = p.x + (q.x - p.x) * (-p.y) / (q.y - p.y);
        if (x_at > 0.0) ++winding;
      } else if (p.y > 0.0 && q.y <= 0.0) {
        const double x_at = p.x + (q.x - p.x) * (p.y) / (p.y - q.y);
        if (x_at > 0.0) --winding;
      }
    }
    return winding;
  }
  throw Error("crossing_winding: could not find a non-degenerate ray");
}

}  // namespace topoplan
