// Acceptance suite: end-to-end checks of the planning stack at fixed
// tolerances. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "topoplan/fmht.hpp"
#include "topoplan/oracle.hpp"
#include "topoplan/rrht.hpp"
#include "topoplan/scenario.hpp"

using namespace topoplan;
using namespace topoplan::testing;

namespace {

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
};

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------
// 1. Winding integrality of closed collision-free polylines.
bool winding_integrality(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  int loops_checked = 0;
  int attempts = 0;
  while (loops_checked < 200 && attempts < 20000) {
    ++attempts;
    const int n_obs = 1 + static_cast<int>(rng.uniform(0, 5));
    Workspace w;
    try {
      w = random_instance(static_cast<std::uint64_t>(attempts), n_obs);
    } catch (const Error&) {
      continue;
    }
    const Point2 center{rng.uniform(2, 8), rng.uniform(2, 8)};
    const int m = 6 + static_cast<int>(rng.uniform(0, 10));
    std::vector<Point2> loop;
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * kPi * i / m;
      const double r = rng.uniform(0.5, 4.5);
      loop.push_back({center.x + r * std::cos(a),
                      center.y + r * std::sin(a)});
    }
    loop.push_back(loop.front());
    bool in_bounds = true;
    for (const Point2& p : loop) in_bounds = in_bounds && w.bounds.contains(p);
    if (!in_bounds || !polyline_collision_free(loop, w)) continue;

    const HSig h = polyline_hsig(loop, w);
    for (std::size_t l = 0; l < h.size(); ++l) {
      if (std::abs(h[l] - std::round(h[l])) > 1e-9) {
        detail = "non-integral winding component";
        return false;
      }
      const int cw = crossing_winding(loop, w.representative_points[l]);
      if (cw != static_cast<int>(std::llround(h[l]))) {
        detail = "winding disagrees with the crossing count";
        return false;
      }
    }
    ++loops_checked;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ostringstream os;
  os << loops_checked << " loops verified";
  detail = os.str();
  return loops_checked == 200 && secs < 5.0;
}

// ---------------------------------------------------------------------
// 2. Per-segment winding against numerical integration.
bool segment_winding_integral(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(202);
  int checked = 0;
  double worst = 0.0;
  while (checked < 500) {
    const int n_obs = 1 + static_cast<int>(rng.uniform(0, 3));
    Workspace w;
    try {
      w = random_instance(1000 + checked, n_obs);
    } catch (const Error&) {
      continue;
    }
    const Point2 a{rng.uniform(0.2, 9.8), rng.uniform(0.2, 9.8)};
    const Point2 b{rng.uniform(0.2, 9.8), rng.uniform(0.2, 9.8)};
    if (!segment_collision_free(a, b, w)) continue;
    const HSig h = segment_hsig(a, b, w);
    for (std::size_t l = 0; l < h.size(); ++l) {
      const double ref =
          integrate_segment_winding(a, b, w.representative_points[l], 100000);
      worst = std::max(worst, std::abs(h[l] - ref));
      if (std::abs(h[l] - ref) > 1e-6) {
        detail = "analytic winding deviates from the integral";
        return false;
      }
    }
    ++checked;
  }
  std::ostringstream os;
  os << checked << " segments, max deviation " << worst;
  detail = os.str();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       t0)
             .count() < 30.0;
}

// ---------------------------------------------------------------------
// Shared instance battery for criteria 3 and 4.
struct Instance {
  Workspace w;
  State start{{1, 5}, {}};
  GoalRegion goal{{9, 5}, 0.6, {9, 5}};
};

std::vector<Instance> instance_battery() {
  std::vector<Instance> out;
  for (int seed = 0; seed < 50; ++seed) {
    Instance inst;
    inst.w = random_instance(static_cast<std::uint64_t>(seed),
                             seed < 25 ? 1 : 3);
    out.push_back(std::move(inst));
  }
  return out;
}

// 3. Incremental planner exactly matches the product-graph reference.
bool rrht_oracle_equivalence(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto instances = instance_battery();
  std::size_t nodes_checked = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    RrhtConfig cfg;
    cfg.iterations = 280;
    cfg.seed = i;
    RrhtPlanner planner(inst.w, SystemKind::kHolonomic, inst.start, inst.goal,
                        {}, cfg);
    planner.run();
    if (planner.graph().vertex_count() > 300) {
      detail = "instance exceeded the vertex budget";
      return false;
    }
    std::vector<State> states;
    for (const Vertex& v : planner.graph().vertices())
      states.push_back(v.state);
    const auto oracle =
        augmented_dijkstra(states, arcs_from_graph(planner.graph()), 0, {},
                           inst.goal, inst.w);
    for (const Vertex& v : planner.graph().vertices()) {
      for (const auto& [key, n] : v.nodes) {
        auto it = oracle.state_cost.find({v.id, key});
        if (it == oracle.state_cost.end() ||
            std::abs(it->second - n->cost) > 1e-9) {
          std::ostringstream os;
          os << "instance " << i << " vertex " << v.id << " cost mismatch";
          detail = os.str();
          return false;
        }
        ++nodes_checked;
      }
    }
  }
  std::ostringstream os;
  os << "50 instances, " << nodes_checked << " (vertex,class) labels equal";
  detail = os.str();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       t0)
             .count() < 60.0;
}

// 4. Batch planner: eager mode exact, lazy mode never better and almost
// always equal.
//
// Calibration note for the lazy-equality threshold. The 45/50 bound
// assumes deferred-connection suboptimality is negligible at this
// scale. Measured rates on this battery: k=250 -> 38/50, k=400 -> 44,
// k=600 -> 41, k=800 -> 43, k=1500 -> 36 (singles ~22/25, triples
// ~15/25); the rate is flat in k because the per-class staining
// probability is set by the obstacle geometry, not the sample count.
// Each miss was traced to a candidate deferred past its optimal
// parent's closing (the documented lazy mechanism), never to a cache or
// dominance fault; eager mode is exact on every instance. The assertion
// below keeps the stated threshold; the shortfall is expected.
bool fmht_oracle_equivalence(std::string& detail) {
  const auto instances = instance_battery();
  int eager_equal = 0;
  int lazy_equal = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    TerminationRule rule;  // run to exhaustion
    FmhtConfig cfg;
    cfg.samples = 250;
    cfg.seed = i;

    cfg.lazy = false;
    FmhtPlanner eager(inst.w, SystemKind::kHolonomic, inst.start, inst.goal,
                      {}, rule, cfg);
    const PlanResult re = eager.run();
    std::vector<State> states;
    for (const Vertex& v : eager.graph().vertices()) states.push_back(v.state);
    const auto arcs = disk_graph_arcs(states, eager.connection_radius(),
                                      SystemKind::kHolonomic, inst.w, 0.05);
    const auto oracle = augmented_dijkstra(states, arcs, 0, {}, inst.goal,
                                           inst.w);

    bool eq = re.classes.size() == oracle.goal_class_cost.size();
    for (const ClassPath& c : re.classes) {
      auto it = oracle.goal_class_cost.find(c.key);
      eq = eq && it != oracle.goal_class_cost.end() &&
           std::abs(it->second - c.cost) <= 1e-9;
    }
    if (!eq) {
      std::ostringstream os;
      os << "eager mode diverged from the reference on instance " << i;
      detail = os.str();
      return false;
    }
    ++eager_equal;

    cfg.lazy = true;
    FmhtPlanner lazy(inst.w, SystemKind::kHolonomic, inst.start, inst.goal,
                     {}, rule, cfg);
    const PlanResult rl = lazy.run();
    bool all_equal = true;
    for (const ClassPath& c : rl.classes) {
      auto it = oracle.goal_class_cost.find(c.key);
      if (it == oracle.goal_class_cost.end()) {
        all_equal = false;
        continue;
      }
      if (c.cost < it->second - 1e-9) {
        std::ostringstream os;
        os << "lazy mode beat the reference on instance " << i;
        detail = os.str();
        return false;  // impossible if labels are valid path costs
      }
      if (std::abs(c.cost - it->second) > 1e-9) all_equal = false;
    }
    lazy_equal += all_equal;
  }
  std::ostringstream os;
  os << "eager equal on " << eager_equal
     << "/50, lazy never better on 50/50, lazy exactly equal on "
     << lazy_equal << "/50 vs threshold 45";
  if (lazy_equal < 45)
    os << " (deferred-connection suboptimality; see the calibration note "
          "in this test)";
  detail = os.str();
  return eager_equal == 50 && lazy_equal >= 45;
}

// ---------------------------------------------------------------------
// 5. Edge and collision work is shared across signature layers.
bool layer_sharing(std::string& detail) {
  const Workspace w = reference_workspace();
  const State start = reference_start();
  const GoalRegion goal = reference_goal();

  // Incremental planner: the collision work is attached to edges, never
  // to signature layers, so both counters must be byte-identical.
  Metrics r1, r2;
  std::vector<MetricsSnapshot> snaps;
  for (double h_limit : {1.0, 2.0}) {
    SignaturePolicy policy;
    policy.h_limit = h_limit;
    RrhtConfig cfg;
    cfg.iterations = 800;
    cfg.seed = 1;
    RrhtPlanner planner(w, SystemKind::kHolonomic, start, goal, policy, cfg);
    const PlanResult r = planner.run();
    if (h_limit == 1.0) {
      r1 = r.metrics;
    } else {
      r2 = r.metrics;
      snaps = r.snapshots;
    }
  }
  if (r1.edges_computed != r2.edges_computed ||
      r1.collision_checks != r2.collision_checks) {
    detail = "incremental counters diverged across h limits";
    return false;
  }
  if (r2.node_count <= r1.node_count) {
    detail = "wider limit did not grow the node count";
    return false;
  }

  // Batch planner, eager checking: resolution is driven by the popped
  // vertex set, also layer-independent.
  Metrics f1, f2;
  for (double h_limit : {1.0, 2.0}) {
    SignaturePolicy policy;
    policy.h_limit = h_limit;
    TerminationRule rule;
    FmhtConfig cfg;
    cfg.samples = 400;
    cfg.seed = 1;
    cfg.lazy = false;
    FmhtPlanner planner(w, SystemKind::kHolonomic, start, goal, policy, rule,
                        cfg);
    (h_limit == 1.0 ? f1 : f2) = planner.run().metrics;
  }
  if (f1.edges_computed != f2.edges_computed ||
      f1.collision_checks != f2.collision_checks ||
      f2.node_count <= f1.node_count) {
    detail = "batch eager counters diverged across h limits";
    return false;
  }

  // Batch planner, lazy checking: edge computation is still shared
  // one-to-one; checks are per connection attempt, so only report them.
  Metrics l1, l2;
  for (double h_limit : {1.0, 2.0}) {
    SignaturePolicy policy;
    policy.h_limit = h_limit;
    TerminationRule rule;
    FmhtConfig cfg;
    cfg.samples = 400;
    cfg.seed = 1;
    FmhtPlanner planner(w, SystemKind::kHolonomic, start, goal, policy, rule,
                        cfg);
    (h_limit == 1.0 ? l1 : l2) = planner.run().metrics;
  }
  if (l1.edges_computed != l2.edges_computed) {
    detail = "batch lazy edge counters diverged across h limits";
    return false;
  }

  // Node curve outruns the vertex curve once layers multiply.
  bool crossed = false;
  for (const MetricsSnapshot& s : snaps) {
    if (s.node_count >= 1000) {
      crossed = s.node_count > s.vertex_count;
      break;
    }
  }
  if (!crossed) {
    detail = "node count did not exceed vertex count at 1000 nodes";
    return false;
  }

  std::ostringstream os;
  os << "incremental " << r1.edges_computed << " edges/"
     << r1.collision_checks << " checks identical; batch eager "
     << f1.edges_computed << "/" << f1.collision_checks
     << " identical; batch lazy edges identical (checks " << l1.collision_checks
     << " vs " << l2.collision_checks << " attempt-driven); nodes "
     << r1.node_count << " -> " << r2.node_count;
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------------
// 6. Convergence to the analytic optimum around a disk.
bool disk_convergence(std::string& detail) {
  Workspace w;
  w.bounds = {{-5, -5}, {5, 5}};
  w.obstacles = {regular_ngon({0, 0}, 1.0, 32, kPi / 32.0)};
  w.representative_points = {{0, 0}};
  w.validate();
  const State start{{-3, 0}, {}};
  const GoalRegion goal{{3, 0}, 0.25, {3, 0}};
  const double reference = 6.33653;

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };

  std::vector<double> fmht_upper, fmht_lower, rrht_upper, rrht_lower;
  double slowest_run = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TerminationRule rule;
    rule.class_count = 2;
    FmhtConfig fc;
    fc.samples = 2000;
    fc.seed = seed;
    const auto tf = std::chrono::steady_clock::now();
    const PlanResult rf = fmht_plan(w, SystemKind::kHolonomic, start, goal, {},
                                    rule, fc);
    slowest_run = std::max(
        slowest_run,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tf)
            .count());
    if (rf.classes.size() != 2) {
      detail = "batch run missed a class";
      return false;
    }
    for (const ClassPath& c : rf.classes) {
      (c.signature[0] > 0 ? fmht_upper : fmht_lower).push_back(c.cost);
    }

    RrhtConfig rc;
    rc.iterations = 3000;
    rc.seed = seed;
    const auto tr = std::chrono::steady_clock::now();
    const PlanResult rr =
        rrht_plan(w, SystemKind::kHolonomic, start, goal, {}, rc);
    slowest_run = std::max(
        slowest_run,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tr)
            .count());
    if (rr.classes.size() != 2) {
      detail = "incremental run missed a class";
      return false;
    }
    for (const ClassPath& c : rr.classes) {
      (c.signature[0] > 0 ? rrht_upper : rrht_lower).push_back(c.cost);
    }
  }
  const double tol = 0.05 * reference;
  std::ostringstream os;
  os << "medians fmht " << median(fmht_upper) << "/" << median(fmht_lower)
     << " rrht " << median(rrht_upper) << "/" << median(rrht_lower)
     << " vs " << reference << " (5%), slowest run " << slowest_run << "s";
  detail = os.str();
  for (double v : {median(fmht_upper), median(fmht_lower),
                   median(rrht_upper), median(rrht_lower)}) {
    if (std::abs(v - reference) > tol) return false;
  }
  return slowest_run < 60.0;
}

// ---------------------------------------------------------------------
// 7. Dubins steering against the independent closed forms.
bool dubins_validation(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(707);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const State a{{rng.uniform(-4, 4), rng.uniform(-4, 4)},
                  normalize_angle(rng.uniform(-kPi, kPi))};
    const State b{{rng.uniform(-4, 4), rng.uniform(-4, 4)},
                  normalize_angle(rng.uniform(-kPi, kPi))};
    const double got = connect(a, b, SystemKind::kDubins).cost;
    const double want = dubins_reference_cost(a, b);
    worst = std::max(worst, std::abs(got - want));
    if (std::abs(got - want) > 1e-9) {
      detail = "word enumeration mismatch";
      return false;
    }
  }
  const double quarter =
      connect(State{{0, 0}, 0.0}, State{{1, 1}, kPi / 2}, SystemKind::kDubins)
          .cost;
  if (std::abs(quarter - kPi / 2) > 1e-12) {
    detail = "quarter arc not exact";
    return false;
  }
  std::ostringstream os;
  os << "1000 pose pairs, max deviation " << worst << "; quarter arc exact";
  detail = os.str();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       t0)
             .count() < 5.0;
}

// ---------------------------------------------------------------------
// 8. Replanning from stored class-distinct paths.
bool replanning_speed(std::string& detail) {
  Scenario s;
  s.system = SystemKind::kHolonomic;
  s.bounds = {{0, 0}, {10, 10}};
  s.obstacles = {box(4, 3.5, 6, 6.5)};
  s.rep_overrides = {std::nullopt};
  s.start = reference_start();
  s.goal = reference_goal();
  s.planner.algo = "fmht";
  s.planner.samples = 800;
  s.planner.seed = 2;
  s.planner.class_count = 2;
  s.validate();
  const PlanResult prior_result = run_scenario(s);
  if (prior_result.classes.size() != 2) {
    detail = "prior run did not produce two classes";
    return false;
  }
  StoredResult prior;
  prior.scenario = s;
  prior.classes = prior_result.classes;

  const ClassPath& cheap = prior.classes[0].cost <= prior.classes[1].cost
                               ? prior.classes[0]
                               : prior.classes[1];
  const ClassPath& other = prior.classes[0].cost <= prior.classes[1].cost
                               ? prior.classes[1]
                               : prior.classes[0];
  const Point2 mid = cheap.trace[cheap.trace.size() / 2];
  const Polygon blocker =
      box(mid.x - 0.3, mid.y - 0.3, mid.x + 0.3, mid.y + 0.3);

  std::uint64_t segments = 0;
  for (const ClassPath& c : prior.classes) segments += c.trace.size() - 1;

  const auto t0 = std::chrono::steady_clock::now();
  const ReplanOutcome out = replan(prior, blocker);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();

  if (!out.feasible || out.classes.front().key.size() != other.key.size() + 1 ||
      std::abs(out.classes.front().cost - other.cost) > 1e-12) {
    detail = "replan did not return the alternative class";
    return false;
  }
  if (out.steering_evaluations != 0) {
    detail = "replan performed steering computations";
    return false;
  }
  if (out.new_obstacle_checks > segments) {
    detail = "replan checked more segments than stored";
    return false;
  }
  if (ms >= 10.0) {
    std::ostringstream os;
    os << "replan took " << ms << " ms";
    detail = os.str();
    return false;
  }
  std::ostringstream os;
  os << "alternative class in " << ms << " ms, " << out.new_obstacle_checks
     << " checks against the new obstacle only, zero steering";
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------------
// 9. Anytime behavior: early feasible paths, monotone refinement.
bool anytime_behavior(std::string& detail) {
  const Workspace w = reference_workspace();
  const State start = reference_start();
  const GoalRegion goal = reference_goal();
  int rrht_earlier = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RrhtConfig rc;
    rc.iterations = 1000;
    rc.seed = seed;
    const PlanResult rr = rrht_plan(w, SystemKind::kHolonomic, start, goal, {},
                                    rc);
    if (rr.goal_events.empty()) {
      detail = "incremental run never reached the goal";
      return false;
    }
    // Per-class incumbents must be non-increasing on every seed.
    std::map<SigKey, double> best;
    for (const GoalEvent& e : rr.goal_events) {
      auto it = best.find(e.key);
      if (it != best.end() && e.cost >= it->second - 1e-12) {
        detail = "incumbent cost increased";
        return false;
      }
      best[e.key] = e.cost;
    }

    TerminationRule rule;
    rule.class_count = 1;
    FmhtConfig fc;
    fc.samples = 1000;
    fc.seed = seed;
    const PlanResult rf = fmht_plan(w, SystemKind::kHolonomic, start, goal, {},
                                    rule, fc);
    if (rf.goal_events.empty()) {
      detail = "batch run never reached the goal";
      return false;
    }
    if (rr.first_goal_iteration < rf.first_goal_iteration) ++rrht_earlier;
  }
  std::ostringstream os;
  os << "incremental planner first on " << rrht_earlier
     << "/10 seeds (threshold 8)";
  detail = os.str();
  return rrht_earlier >= 8;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"winding integrality on closed loops", winding_integrality},
      {"per-segment winding matches numerical integration",
       segment_winding_integral},
      {"incremental planner equals the product-graph reference",
       rrht_oracle_equivalence},
      {"batch planner equals the reference (eager exact, lazy bounded)",
       fmht_oracle_equivalence},
      {"edge and collision work shared across signature layers",
       layer_sharing},
      {"convergence to the analytic disk optimum", disk_convergence},
      {"dubins steering against closed-form enumeration", dubins_validation},
      {"replanning from stored classes", replanning_speed},
      {"anytime behavior and monotone refinement", anytime_behavior},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] criterion %zu: %s (%s; %.2fs)\n", ok ? "PASS" : "FAIL",
                i + 1, criteria[i].name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
