#include "topoplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace topoplan {

using nlohmann::json;

namespace {

// Strict parsing: any key outside the schema is an error with its path.
void require_keys(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end())
      throw Error(path + ": unknown field '" + key + "'");
  }
}

Point2 point_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    throw Error(path + ": expected [x, y]");
  Point2 p{j[0].get<double>(), j[1].get<double>()};
  if (!p.finite()) throw Error(path + ": non-finite coordinate");
  return p;
}

json point_to_json(const Point2& p) { return json::array({p.x, p.y}); }

HSig hsig_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw Error(path + ": expected an array of reals");
  HSig h;
  for (const auto& v : j) h.push_back(v.get<double>());
  return h;
}

json state_to_json(const State& s) {
  json out = json::array({s.position.x, s.position.y});
  if (s.heading) out.push_back(*s.heading);
  return out;
}

}  // namespace

Workspace Scenario::workspace() const {
  Workspace w;
  w.bounds = bounds;
  w.obstacles = obstacles;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (i < rep_overrides.size() && rep_overrides[i]) {
      w.representative_points.push_back(*rep_overrides[i]);
    } else {
      w.representative_points.push_back(centroid(obstacles[i]));
    }
  }
  return w;
}

void Scenario::validate() const {
  if (schema_version != 1) throw Error("schema_version: expected 1");
  const Workspace w = workspace();
  w.validate();
  if (!w.bounds.contains(start.position) ||
      point_in_obstacle(start.position, w))
    throw Error("start: not in free space");
  if (system == SystemKind::kDubins && !start.heading)
    throw Error("start: dubins systems require a heading");
  if (system == SystemKind::kHolonomic && start.heading)
    throw Error("start: holonomic systems take no heading");
  if (goal.radius <= 0.0) throw Error("goal.radius: must be positive");
  if (!w.bounds.contains(goal.center))
    throw Error("goal.center: outside bounds");
  if (point_in_obstacle(goal.center, w))
    throw Error("goal.center: inside an obstacle");
  if (policy.h_limit <= 0.0) throw Error("policy.h_limit: must be positive");
  if (planner.algo != "fmht" && planner.algo != "rrht")
    throw Error("planner.algo: expected 'fmht' or 'rrht'");
  if (planner.trace_resolution <= 0.0)
    throw Error("planner.trace_resolution: must be positive");
  if (planner.target_signature &&
      planner.target_signature->size() != obstacles.size())
    throw Error("termination.target_signature: length must equal the "
                "obstacle count");
}

Scenario scenario_from_json(const json& j) {
  require_keys(j, "$",
               {"schema_version", "system", "bounds", "obstacles", "start",
                "goal", "policy", "planner", "termination"});
  Scenario s;
  s.schema_version = j.at("schema_version").get<int>();

  const std::string system = j.at("system").get<std::string>();
  if (system == "holonomic") {
    s.system = SystemKind::kHolonomic;
  } else if (system == "dubins") {
    s.system = SystemKind::kDubins;
  } else {
    throw Error("system: expected 'holonomic' or 'dubins'");
  }

  const json& jb = j.at("bounds");
  require_keys(jb, "bounds", {"min", "max"});
  s.bounds.min = point_from_json(jb.at("min"), "bounds.min");
  s.bounds.max = point_from_json(jb.at("max"), "bounds.max");

  const json& jo = j.at("obstacles");
  if (!jo.is_array()) throw Error("obstacles: expected an array");
  for (std::size_t i = 0; i < jo.size(); ++i) {
    const std::string path = "obstacles[" + std::to_string(i) + "]";
    require_keys(jo[i], path, {"vertices", "representative_point"});
    Polygon poly;
    for (std::size_t k = 0; k < jo[i].at("vertices").size(); ++k) {
      poly.vertices.push_back(point_from_json(
          jo[i].at("vertices")[k], path + ".vertices[" + std::to_string(k) +
                                       "]"));
    }
    s.obstacles.push_back(std::move(poly));
    if (jo[i].contains("representative_point")) {
      s.rep_overrides.push_back(point_from_json(
          jo[i].at("representative_point"), path + ".representative_point"));
    } else {
      s.rep_overrides.push_back(std::nullopt);
    }
  }

  const json& js = j.at("start");
  require_keys(js, "start", {"position", "heading"});
  s.start.position = point_from_json(js.at("position"), "start.position");
  if (js.contains("heading"))
    s.start.heading = normalize_angle(js.at("heading").get<double>());

  const json& jg = j.at("goal");
  require_keys(jg, "goal", {"center", "radius", "representative_point"});
  s.goal.center = point_from_json(jg.at("center"), "goal.center");
  s.goal.radius = jg.at("radius").get<double>();
  s.goal.representative =
      jg.contains("representative_point")
          ? point_from_json(jg.at("representative_point"),
                            "goal.representative_point")
          : s.goal.center;

  if (j.contains("policy")) {
    const json& jp = j.at("policy");
    require_keys(jp, "policy", {"h_limit", "blocked"});
    if (jp.contains("h_limit"))
      s.policy.h_limit = jp.at("h_limit").get<double>();
    if (jp.contains("blocked")) {
      for (std::size_t i = 0; i < jp.at("blocked").size(); ++i) {
        const HSig sig = hsig_from_json(
            jp.at("blocked")[i], "policy.blocked[" + std::to_string(i) + "]");
        s.policy.blocked.insert(quantize_key(sig, s.planner.key_tol));
      }
    }
  }

  if (j.contains("planner")) {
    const json& jpl = j.at("planner");
    require_keys(jpl, "planner",
                 {"algo", "samples", "iterations", "gamma_multiplier", "gamma",
                  "eta", "seed", "trace_resolution", "key_tol", "rho",
                  "collision_checking"});
    if (jpl.contains("algo")) s.planner.algo = jpl.at("algo").get<std::string>();
    if (jpl.contains("samples"))
      s.planner.samples = jpl.at("samples").get<std::size_t>();
    if (jpl.contains("iterations"))
      s.planner.iterations = jpl.at("iterations").get<std::size_t>();
    if (jpl.contains("gamma_multiplier"))
      s.planner.gamma_multiplier = jpl.at("gamma_multiplier").get<double>();
    if (jpl.contains("gamma")) s.planner.gamma = jpl.at("gamma").get<double>();
    if (jpl.contains("eta")) s.planner.eta = jpl.at("eta").get<double>();
    if (jpl.contains("seed"))
      s.planner.seed = jpl.at("seed").get<std::uint64_t>();
    if (jpl.contains("trace_resolution"))
      s.planner.trace_resolution = jpl.at("trace_resolution").get<double>();
    if (jpl.contains("key_tol"))
      s.planner.key_tol = jpl.at("key_tol").get<double>();
    if (jpl.contains("rho")) s.planner.rho = jpl.at("rho").get<double>();
    if (jpl.contains("collision_checking")) {
      const std::string mode = jpl.at("collision_checking").get<std::string>();
      if (mode == "lazy") {
        s.planner.lazy = true;
      } else if (mode == "eager") {
        s.planner.lazy = false;
      } else {
        throw Error("planner.collision_checking: expected 'lazy' or 'eager'");
      }
    }
  }

  if (j.contains("termination")) {
    const json& jt = j.at("termination");
    require_keys(jt, "termination",
                 {"class_count", "target_signature", "wall_clock_seconds"});
    if (jt.contains("class_count"))
      s.planner.class_count = jt.at("class_count").get<std::size_t>();
    if (jt.contains("target_signature"))
      s.planner.target_signature = hsig_from_json(
          jt.at("target_signature"), "termination.target_signature");
    if (jt.contains("wall_clock_seconds"))
      s.planner.wall_clock_seconds =
          jt.at("wall_clock_seconds").get<double>();
  }

  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["system"] = s.system == SystemKind::kDubins ? "dubins" : "holonomic";
  j["bounds"] = {{"min", point_to_json(s.bounds.min)},
                 {"max", point_to_json(s.bounds.max)}};
  j["obstacles"] = json::array();
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    json o;
    o["vertices"] = json::array();
    for (const Point2& v : s.obstacles[i].vertices)
      o["vertices"].push_back(point_to_json(v));
    if (i < s.rep_overrides.size() && s.rep_overrides[i])
      o["representative_point"] = point_to_json(*s.rep_overrides[i]);
    j["obstacles"].push_back(std::move(o));
  }
  j["start"]["position"] = point_to_json(s.start.position);
  if (s.start.heading) j["start"]["heading"] = *s.start.heading;
  j["goal"]["center"] = point_to_json(s.goal.center);
  j["goal"]["radius"] = s.goal.radius;
  if (s.goal.representative.dist(s.goal.center) > 0.0)
    j["goal"]["representative_point"] = point_to_json(s.goal.representative);
  j["policy"]["h_limit"] = s.policy.h_limit;
  if (!s.policy.blocked.empty()) {
    j["policy"]["blocked"] = json::array();
    for (const SigKey& key : s.policy.blocked) {
      json sig = json::array();
      for (std::int64_t v : key) sig.push_back(v * s.planner.key_tol);
      j["policy"]["blocked"].push_back(std::move(sig));
    }
  }
  json& jp = j["planner"];
  jp["algo"] = s.planner.algo;
  jp["samples"] = s.planner.samples;
  jp["iterations"] = s.planner.iterations;
  jp["gamma_multiplier"] = s.planner.gamma_multiplier;
  if (s.planner.gamma) jp["gamma"] = *s.planner.gamma;
  if (s.planner.eta) jp["eta"] = *s.planner.eta;
  jp["seed"] = s.planner.seed;
  jp["trace_resolution"] = s.planner.trace_resolution;
  jp["key_tol"] = s.planner.key_tol;
  jp["rho"] = s.planner.rho;
  jp["collision_checking"] = s.planner.lazy ? "lazy" : "eager";
  if (s.planner.class_count || s.planner.target_signature ||
      s.planner.wall_clock_seconds) {
    json jt;
    if (s.planner.class_count) jt["class_count"] = *s.planner.class_count;
    if (s.planner.target_signature)
      jt["target_signature"] = *s.planner.target_signature;
    if (s.planner.wall_clock_seconds)
      jt["wall_clock_seconds"] = *s.planner.wall_clock_seconds;
    j["termination"] = std::move(jt);
  }
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("scenario parse error: " + std::string(e.what()));
  }
  return scenario_from_json(j);
}

PlanResult run_scenario(const Scenario& s) {
  const Workspace w = s.workspace();
  TerminationRule rule;
  rule.class_count = s.planner.class_count;
  rule.target_signature = s.planner.target_signature;

  if (s.planner.algo == "fmht") {
    FmhtConfig cfg;
    cfg.samples = s.planner.samples;
    cfg.gamma_multiplier = s.planner.gamma_multiplier;
    cfg.gamma = s.planner.gamma;
    cfg.lazy = s.planner.lazy;
    cfg.trace_resolution = s.planner.trace_resolution;
    cfg.key_tol = s.planner.key_tol;
    cfg.seed = s.planner.seed;
    cfg.rho = s.planner.rho;
    return fmht_plan(w, s.system, s.start, s.goal, s.policy, rule, cfg);
  }
  RrhtConfig cfg;
  cfg.iterations = s.planner.iterations;
  cfg.eta = s.planner.eta;
  cfg.gamma_multiplier = s.planner.gamma_multiplier;
  cfg.gamma = s.planner.gamma;
  cfg.stop_class_count = s.planner.class_count;
  cfg.wall_clock_seconds = s.planner.wall_clock_seconds;
  cfg.trace_resolution = s.planner.trace_resolution;
  cfg.key_tol = s.planner.key_tol;
  cfg.seed = s.planner.seed;
  cfg.rho = s.planner.rho;
  return rrht_plan(w, s.system, s.start, s.goal, s.policy, cfg);
}

json result_to_json(const PlanResult& r, const Scenario& s) {
  json j;
  j["schema_version"] = 1;
  j["scenario"] = scenario_to_json(s);
  j["feasible"] = r.feasible;
  j["termination"] = r.termination;
  j["iterations"] = r.iterations;
  j["first_goal_iteration"] = r.first_goal_iteration;
  j["classes"] = json::array();
  for (const ClassPath& c : r.classes) {
    json jc;
    jc["key"] = c.key;
    jc["signature"] = c.signature;
    jc["cost"] = c.cost;
    jc["states"] = json::array();
    for (const State& st : c.states) jc["states"].push_back(state_to_json(st));
    jc["trace"] = json::array();
    for (const Point2& p : c.trace) jc["trace"].push_back(point_to_json(p));
    j["classes"].push_back(std::move(jc));
  }
  j["metrics"] = {{"edges_computed", r.metrics.edges_computed},
                  {"collision_checks", r.metrics.collision_checks},
                  {"node_count", r.metrics.node_count},
                  {"vertex_count", r.metrics.vertex_count}};
  return j;
}

StoredResult result_from_json(const json& j) {
  StoredResult out;
  out.scenario = scenario_from_json(j.at("scenario"));
  for (const json& jc : j.at("classes")) {
    ClassPath c;
    c.key = jc.at("key").get<SigKey>();
    c.signature = jc.at("signature").get<HSig>();
    c.cost = jc.at("cost").get<double>();
    for (const json& js : jc.at("states")) {
      State st;
      st.position = {js[0].get<double>(), js[1].get<double>()};
      if (js.size() > 2) st.heading = js[2].get<double>();
      c.states.push_back(st);
    }
    for (const json& jp : jc.at("trace"))
      c.trace.push_back(point_from_json(jp, "trace"));
    out.classes.push_back(std::move(c));
  }
  return out;
}

ReplanOutcome replan(const StoredResult& prior, const Polygon& new_obstacle,
                     std::optional<Point2> new_rep) {
  if (prior.classes.empty())
    throw Error("replan: stored result has no classes");
  const std::uint64_t steer_before = steering_evaluations();
  new_obstacle.validate("new_obstacle");

  // A workspace holding only the new obstacle: winding and collision are
  // evaluated against it alone.
  Workspace delta;
  delta.bounds = prior.scenario.bounds;
  delta.obstacles = {new_obstacle};
  delta.representative_points = {new_rep ? *new_rep : centroid(new_obstacle)};
  delta.validate();

  ReplanOutcome out;
  for (const ClassPath& c : prior.classes) {
    bool blocked = false;
    for (std::size_t i = 0; i + 1 < c.trace.size(); ++i) {
      out.new_obstacle_checks++;
      if (!segment_collision_free(c.trace[i], c.trace[i + 1], delta)) {
        blocked = true;
        break;
      }
    }
    if (blocked) {
      out.invalidated.push_back(c.key);
      continue;
    }
    ClassPath extended = c;
    const HSig extra = polyline_hsig(c.trace, delta);
    extended.signature.push_back(extra[0]);
    extended.key.push_back(
        quantize_key(extra, prior.scenario.planner.key_tol)[0]);
    out.classes.push_back(std::move(extended));
  }
  std::sort(out.classes.begin(), out.classes.end(),
            [](const ClassPath& a, const ClassPath& b) {
              return a.cost < b.cost;
            });
  out.feasible = !out.classes.empty();
  out.steering_evaluations = steering_evaluations() - steer_before;
  return out;
}

json replan_to_json(const ReplanOutcome& r, const StoredResult& prior,
                    const Polygon& new_obstacle) {
  json j;
  j["schema_version"] = 1;
  j["feasible"] = r.feasible;
  j["classes"] = json::array();
  for (const ClassPath& c : r.classes) {
    json jc;
    jc["key"] = c.key;
    jc["signature"] = c.signature;
    jc["cost"] = c.cost;
    jc["states"] = json::array();
    for (const State& st : c.states) jc["states"].push_back(state_to_json(st));
    jc["trace"] = json::array();
    for (const Point2& p : c.trace) jc["trace"].push_back(point_to_json(p));
    j["classes"].push_back(std::move(jc));
  }
  j["invalidated"] = json::array();
  for (const SigKey& key : r.invalidated) j["invalidated"].push_back(key);
  j["new_obstacle"] = json::array();
  for (const Point2& v : new_obstacle.vertices)
    j["new_obstacle"].push_back(point_to_json(v));
  j["new_obstacle_checks"] = r.new_obstacle_checks;
  j["steering_evaluations"] = r.steering_evaluations;
  j["source_classes"] = prior.classes.size();
  return j;
}

void write_metrics_csv(const PlanResult& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open metrics file: " + path.string());

  // Class columns in the final result's (sorted) order.
  std::vector<SigKey> class_keys;
  for (const ClassPath& c : r.classes) class_keys.push_back(c.key);

  out << "iteration,node_count,vertex_count,edges_computed,collision_checks";
  for (std::size_t i = 0; i < class_keys.size(); ++i) {
    out << ",best_cost_" << i;
  }
  out << "\n";

  std::vector<double> best(class_keys.size(),
                           std::numeric_limits<double>::infinity());
  std::size_t event = 0;
  char buf[64];
  for (const MetricsSnapshot& snap : r.snapshots) {
    while (event < r.goal_events.size() &&
           r.goal_events[event].iteration <= snap.iteration) {
      for (std::size_t i = 0; i < class_keys.size(); ++i) {
        if (class_keys[i] == r.goal_events[event].key)
          best[i] = r.goal_events[event].cost;
      }
      ++event;
    }
    out << snap.iteration << "," << snap.node_count << ","
        << snap.vertex_count << "," << snap.edges_computed << ","
        << snap.collision_checks;
    for (double b : best) {
      out << ",";
      if (std::isfinite(b)) {
        std::snprintf(buf, sizeof(buf), "%.17g", b);
        out << buf;
      }
    }
    out << "\n";
  }
}

}  // namespace topoplan
