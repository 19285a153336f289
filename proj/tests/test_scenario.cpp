#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "topoplan/oracle.hpp"
#include "topoplan/scenario.hpp"

using namespace topoplan;
using namespace topoplan::testing;
using nlohmann::json;

namespace {

json minimal_scenario_json() {
  return json::parse(R"({
    "schema_version": 1,
    "system": "holonomic",
    "bounds": {"min": [0, 0], "max": [10, 10]},
    "obstacles": [{"vertices": [[4, 3.5], [6, 3.5], [6, 6.5], [4, 6.5]]}],
    "start": {"position": [1, 5]},
    "goal": {"center": [9, 5], "radius": 0.5},
    "planner": {"algo": "fmht", "samples": 300, "seed": 1},
    "termination": {"class_count": 2}
  })");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal scenario loads with defaults resolved") {
  const Scenario s = scenario_from_json(minimal_scenario_json());
  CHECK(s.system == SystemKind::kHolonomic);
  CHECK(s.planner.algo == "fmht");
  CHECK(s.planner.samples == 300);
  CHECK(s.planner.trace_resolution == 0.05);
  CHECK(s.policy.h_limit == 1.0);
  CHECK(s.planner.class_count.has_value());
  // Representative point defaulted to the centroid.
  const Workspace w = s.workspace();
  CHECK(w.representative_points[0].x == doctest::Approx(5.0));
  CHECK(w.representative_points[0].y == doctest::Approx(5.0));
}

TEST_CASE("validation failures name the offending field") {
  json bad = minimal_scenario_json();
  bad["start"]["position"] = {5, 5};  // inside the obstacle
  try {
    scenario_from_json(bad);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("start") != std::string::npos);
  }
}

TEST_CASE("unknown fields are rejected") {
  json bad = minimal_scenario_json();
  bad["unknown_knob"] = 3;
  CHECK_THROWS_AS(scenario_from_json(bad), Error);

  json bad2 = minimal_scenario_json();
  bad2["planner"]["typo"] = true;
  try {
    scenario_from_json(bad2);
    FAIL("expected an unknown-field error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("typo") != std::string::npos);
  }
}

TEST_CASE("scenario round-trips through json") {
  const Scenario s = scenario_from_json(minimal_scenario_json());
  const json j = scenario_to_json(s);
  const Scenario s2 = scenario_from_json(j);
  CHECK(scenario_to_json(s2) == j);
}

TEST_CASE("run is deterministic: byte-identical outputs") {
  Scenario s = scenario_from_json(minimal_scenario_json());
  s.planner.samples = 250;
  const auto dir = std::filesystem::temp_directory_path() / "topoplan_det";
  std::filesystem::create_directories(dir);

  std::string json_a, json_b, csv_a, csv_b;
  for (int round = 0; round < 2; ++round) {
    const PlanResult r = run_scenario(s);
    const auto jpath = dir / ("result" + std::to_string(round) + ".json");
    const auto cpath = dir / ("metrics" + std::to_string(round) + ".csv");
    std::ofstream(jpath) << result_to_json(r, s).dump(2);
    write_metrics_csv(r, cpath);
    (round == 0 ? json_a : json_b) = slurp(jpath);
    (round == 0 ? csv_a : csv_b) = slurp(cpath);
  }
  CHECK(json_a == json_b);
  CHECK(csv_a == csv_b);
  CHECK_FALSE(json_a.empty());
}

TEST_CASE("metrics csv columns are non-decreasing") {
  Scenario s = scenario_from_json(minimal_scenario_json());
  s.planner.algo = "rrht";
  s.planner.iterations = 300;
  const PlanResult r = run_scenario(s);
  const auto path = std::filesystem::temp_directory_path() / "topoplan_m.csv";
  write_metrics_csv(r, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("iteration,node_count,vertex_count,edges_computed,"
                     "collision_checks",
                     0) == 0);
  long long prev[5] = {-1, -1, -1, -1, -1};
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 5; ++c) {
      REQUIRE(std::getline(ls, cell, ','));
      const long long v = std::stoll(cell);
      CHECK(v >= prev[c]);
      prev[c] = v;
    }
    ++rows;
  }
  CHECK(rows == r.snapshots.size());
}

TEST_CASE("seed changes costs but not the class count") {
  Scenario s = scenario_from_json(minimal_scenario_json());
  s.planner.samples = 1000;
  std::vector<double> costs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    s.planner.seed = seed;
    const PlanResult r = run_scenario(s);
    REQUIRE(r.classes.size() == 2);
    costs.push_back(r.classes[0].cost);
  }
  // Not all equal across seeds.
  bool varied = false;
  for (double c : costs) varied = varied || c != costs[0];
  CHECK(varied);
}

TEST_CASE("requesting more classes than exist exhausts the open set") {
  Scenario s = scenario_from_json(minimal_scenario_json());
  s.planner.samples = 500;
  s.planner.class_count = 3;  // only two classes satisfy |h| <= 1
  const Workspace w = s.workspace();
  TerminationRule rule;
  rule.class_count = 3;
  FmhtConfig cfg;
  cfg.samples = 500;
  cfg.seed = 1;
  FmhtPlanner planner(w, SystemKind::kHolonomic, s.start, s.goal, s.policy,
                      rule, cfg);
  const PlanResult r = planner.run();
  CHECK_FALSE(r.feasible);
  CHECK(r.termination == "open_set_exhausted");
  CHECK(r.classes.size() == 2);

  // The exhaustive reference search over the same disk graph enumerates
  // exactly two reachable goal classes within the winding limit.
  std::vector<State> states;
  for (const Vertex& v : planner.graph().vertices()) states.push_back(v.state);
  const auto arcs = disk_graph_arcs(states, planner.connection_radius(),
                                    SystemKind::kHolonomic, w, 0.05);
  const auto oracle = augmented_dijkstra(states, arcs, 0, s.policy, s.goal, w);
  CHECK(oracle.goal_class_cost.size() == 2);
}

TEST_CASE("result json round-trips for replanning") {
  Scenario s = scenario_from_json(minimal_scenario_json());
  s.planner.samples = 400;
  const PlanResult r = run_scenario(s);
  REQUIRE(r.classes.size() == 2);
  const json j = result_to_json(r, s);
  const StoredResult stored = result_from_json(j);
  REQUIRE(stored.classes.size() == 2);
  CHECK(stored.classes[0].cost == r.classes[0].cost);
  CHECK(stored.classes[0].trace.size() == r.classes[0].trace.size());
}

TEST_CASE("replan switches to the surviving class") {
  Scenario s = scenario_from_json(minimal_scenario_json());
  s.planner.samples = 800;
  const PlanResult r = run_scenario(s);
  REQUIRE(r.classes.size() == 2);
  StoredResult stored;
  stored.scenario = s;
  stored.classes = r.classes;

  // Identify the cheaper class and blockade its path midpoint.
  const ClassPath& cheap =
      r.classes[0].cost <= r.classes[1].cost ? r.classes[0] : r.classes[1];
  const ClassPath& other =
      r.classes[0].cost <= r.classes[1].cost ? r.classes[1] : r.classes[0];
  const Point2 mid = cheap.trace[cheap.trace.size() / 2];
  const Polygon blocker = box(mid.x - 0.3, mid.y - 0.3, mid.x + 0.3,
                              mid.y + 0.3);

  const ReplanOutcome out = replan(stored, blocker);
  REQUIRE(out.feasible);
  CHECK(out.steering_evaluations == 0);
  CHECK(out.invalidated.size() >= 1);
  CHECK(out.classes.front().cost == doctest::Approx(other.cost));
  // Signature extended by the new obstacle's coordinate.
  CHECK(out.classes.front().signature.size() == other.signature.size() + 1);

  // An obstacle touching no stored path invalidates nothing.
  const Polygon harmless = box(0.2, 0.2, 0.8, 0.8);
  const ReplanOutcome none = replan(stored, harmless);
  CHECK(none.feasible);
  CHECK(none.invalidated.empty());
  CHECK(none.classes.size() == 2);
  std::uint64_t segments = 0;
  for (const ClassPath& c : stored.classes) segments += c.trace.size() - 1;
  CHECK(none.new_obstacle_checks <= segments);

  // Blocking everything reports infeasible.
  const Polygon wall = box(7.2, 0.5, 7.8, 9.5);
  const ReplanOutcome dead = replan(stored, wall);
  CHECK_FALSE(dead.feasible);
  CHECK(dead.classes.empty());
}

TEST_CASE("svg rendering writes layered output") {
  Scenario s = scenario_from_json(minimal_scenario_json());
  s.planner.samples = 300;
  const PlanResult r = run_scenario(s);
  const auto path = std::filesystem::temp_directory_path() / "topoplan.svg";
  render_svg(r, s, path);
  const std::string svg = slurp(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polygon") != std::string::npos);   // obstacle
  CHECK(svg.find("<polyline") != std::string::npos);  // paths

  // Empty result: workspace and obstacles only.
  PlanResult empty;
  const auto path2 = std::filesystem::temp_directory_path() / "topoplan0.svg";
  render_svg(empty, s, path2);
  const std::string svg2 = slurp(path2);
  CHECK(svg2.find("<svg") != std::string::npos);
  CHECK(svg2.find("<polygon") != std::string::npos);
  CHECK(svg2.find("<polyline") == std::string::npos);
}

TEST_CASE("dubins scenario plans end to end") {
  json j = minimal_scenario_json();
  j["system"] = "dubins";
  j["start"]["heading"] = 0.0;
  j["planner"]["algo"] = "rrht";
  j["planner"]["iterations"] = 600;
  j["termination"] = {{"class_count", 1}};
  const Scenario s = scenario_from_json(j);
  const PlanResult r = run_scenario(s);
  CHECK(r.feasible);
  REQUIRE(r.classes.size() >= 1);
  // Dubins cost at least the Euclidean straight distance to the region.
  CHECK(r.classes[0].cost >= 7.5 - 1e-9);
}
