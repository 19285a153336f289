#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "topoplan/oracle.hpp"
#include "topoplan/scenario.hpp"

namespace {

using namespace topoplan;

int g_verbosity = 1;  // 0 quiet, 1 normal, 2 debug

void init_verbosity() {
  if (const char* env = std::getenv("TOPOPLAN_LOG")) {
    const std::string v(env);
    if (v == "quiet" || v == "0") g_verbosity = 0;
    if (v == "debug" || v == "2") g_verbosity = 2;
  }
}

void info(const std::string& msg) {
  if (g_verbosity >= 1) std::cerr << msg << "\n";
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path.string());
  out << j.dump(2) << "\n";
}

void apply_overrides(Scenario& s, const std::string& algo,
                     std::int64_t seed, std::int64_t samples,
                     std::int64_t iterations) {
  if (!algo.empty()) s.planner.algo = algo;
  if (seed >= 0) s.planner.seed = static_cast<std::uint64_t>(seed);
  if (samples >= 0) s.planner.samples = static_cast<std::size_t>(samples);
  if (iterations >= 0)
    s.planner.iterations = static_cast<std::size_t>(iterations);
  s.validate();
}

int cmd_plan(const std::string& scenario_path, const std::string& out_dir,
             const std::string& algo, std::int64_t seed, std::int64_t samples,
             std::int64_t iterations) {
  Scenario s = load_scenario(scenario_path);
  apply_overrides(s, algo, seed, samples, iterations);
  std::filesystem::create_directories(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const Workspace w = s.workspace();
  TerminationRule rule;
  rule.class_count = s.planner.class_count;
  rule.target_signature = s.planner.target_signature;

  PlanResult result;
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
    FmhtPlanner planner(w, s.system, s.start, s.goal, s.policy, rule, cfg);
    result = planner.run();
    render_svg(result, s, std::filesystem::path(out_dir) / "plan.svg",
               &planner.graph());
  } else {
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
    RrhtPlanner planner(w, s.system, s.start, s.goal, s.policy, cfg);
    result = planner.run();
    render_svg(result, s, std::filesystem::path(out_dir) / "plan.svg",
               &planner.graph());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  write_json(result_to_json(result, s),
             std::filesystem::path(out_dir) / "result.json");
  write_metrics_csv(result, std::filesystem::path(out_dir) / "metrics.csv");

  std::cout << "algo=" << s.planner.algo << " seed=" << s.planner.seed
            << " termination=" << result.termination
            << " classes=" << result.classes.size() << " elapsed="
            << elapsed << "s\n";
  for (const ClassPath& c : result.classes) {
    std::cout << "  class " << key_to_string(c.key) << " cost=" << c.cost
              << "\n";
  }
  info("outputs written to " + out_dir);
  return result.classes.empty() ? 2 : 0;
}

int cmd_replan(const std::string& result_path, const std::string& obstacle_path,
               const std::string& out_dir) {
  std::ifstream in(result_path);
  if (!in) throw Error("cannot open result file: " + result_path);
  nlohmann::json jr;
  in >> jr;
  const StoredResult prior = result_from_json(jr);

  std::ifstream obs_in(obstacle_path);
  if (!obs_in) throw Error("cannot open obstacle file: " + obstacle_path);
  nlohmann::json jo;
  obs_in >> jo;
  Polygon obstacle;
  for (const auto& v : jo.at("vertices")) {
    obstacle.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  std::optional<Point2> rep;
  if (jo.contains("representative_point")) {
    rep = Point2{jo["representative_point"][0].get<double>(),
                 jo["representative_point"][1].get<double>()};
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ReplanOutcome outcome = replan(prior, obstacle, rep);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::filesystem::create_directories(out_dir);
  write_json(replan_to_json(outcome, prior, obstacle),
             std::filesystem::path(out_dir) / "replan.json");

  std::cout << "replan feasible=" << (outcome.feasible ? "yes" : "no")
            << " surviving=" << outcome.classes.size() << " invalidated="
            << outcome.invalidated.size() << " checks="
            << outcome.new_obstacle_checks << " elapsed=" << elapsed << "s\n";
  if (outcome.feasible) {
    std::cout << "  best class " << key_to_string(outcome.classes[0].key)
              << " cost=" << outcome.classes[0].cost << "\n";
  }
  return outcome.feasible ? 0 : 2;
}

int cmd_gap(const std::string& scenario_path, std::int64_t seed) {
  Scenario s = load_scenario(scenario_path);
  if (seed >= 0) s.planner.seed = static_cast<std::uint64_t>(seed);
  const Workspace w = s.workspace();
  TerminationRule rule;
  rule.class_count = s.planner.class_count;
  rule.target_signature = s.planner.target_signature;

  PlanResult result;
  std::vector<State> states;
  std::vector<OracleArc> arcs;
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
    FmhtPlanner planner(w, s.system, s.start, s.goal, s.policy, rule, cfg);
    result = planner.run();
    for (const Vertex& v : planner.graph().vertices())
      states.push_back(v.state);
    arcs = disk_graph_arcs(states, planner.connection_radius(), s.system, w,
                           s.planner.trace_resolution, s.planner.rho);
  } else {
    RrhtConfig cfg;
    cfg.iterations = s.planner.iterations;
    cfg.eta = s.planner.eta;
    cfg.gamma_multiplier = s.planner.gamma_multiplier;
    cfg.gamma = s.planner.gamma;
    cfg.stop_class_count = s.planner.class_count;
    cfg.trace_resolution = s.planner.trace_resolution;
    cfg.key_tol = s.planner.key_tol;
    cfg.seed = s.planner.seed;
    cfg.rho = s.planner.rho;
    RrhtPlanner planner(w, s.system, s.start, s.goal, s.policy, cfg);
    result = planner.run();
    for (const Vertex& v : planner.graph().vertices())
      states.push_back(v.state);
    arcs = arcs_from_graph(planner.graph());
  }

  const AugmentedCosts oracle = augmented_dijkstra(
      states, arcs, 0, s.policy, s.goal, w, s.planner.key_tol);

  std::cout << "class, planner_cost, oracle_cost, ratio\n";
  for (const ClassPath& c : result.classes) {
    auto it = oracle.goal_class_cost.find(c.key);
    if (it == oracle.goal_class_cost.end()) {
      std::cout << key_to_string(c.key) << ", " << c.cost << ", n/a, n/a\n";
    } else {
      std::cout << key_to_string(c.key) << ", " << c.cost << ", " << it->second
                << ", " << c.cost / it->second << "\n";
    }
  }
  return 0;
}

int cmd_render(const std::string& result_path, const std::string& out_file) {
  std::ifstream in(result_path);
  if (!in) throw Error("cannot open result file: " + result_path);
  nlohmann::json jr;
  in >> jr;
  const StoredResult prior = result_from_json(jr);
  PlanResult r;
  r.classes = prior.classes;
  r.feasible = !r.classes.empty();
  render_svg(r, prior.scenario, out_file);
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_verbosity();
  CLI::App app{"Topological motion planning with shared-edge graphs"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::string algo;
  std::int64_t seed = -1;
  std::int64_t samples = -1;
  std::int64_t iterations = -1;

  CLI::App* plan = app.add_subcommand("plan", "Plan on a scenario file");
  plan->add_option("scenario", scenario_path, "Scenario JSON file")
      ->required();
  plan->add_option("--out", out_dir, "Output directory");
  plan->add_option("--algo", algo, "Planner: fmht or rrht");
  plan->add_option("--seed", seed, "Random seed override");
  plan->add_option("--samples", samples, "Batch sample count override");
  plan->add_option("--iters", iterations, "Iteration budget override");

  std::string result_path;
  std::string obstacle_path;
  CLI::App* rep = app.add_subcommand("replan",
                                     "Replan a stored result around a new "
                                     "obstacle");
  rep->add_option("result", result_path, "result.json from a plan run")
      ->required();
  rep->add_option("--obstacle", obstacle_path, "New obstacle JSON file")
      ->required();
  rep->add_option("--out", out_dir, "Output directory");

  CLI::App* gap = app.add_subcommand("gap",
                                     "Compare planner costs against the "
                                     "graph-optimal reference");
  gap->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  gap->add_option("--seed", seed, "Random seed override");

  std::string svg_out = "plan.svg";
  CLI::App* render = app.add_subcommand("render", "Render a stored result");
  render->add_option("result", result_path, "result.json from a plan run")
      ->required();
  render->add_option("--out", svg_out, "Output SVG file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed())
      return cmd_plan(scenario_path, out_dir, algo, seed, samples, iterations);
    if (rep->parsed()) return cmd_replan(result_path, obstacle_path, out_dir);
    if (gap->parsed()) return cmd_gap(scenario_path, seed);
    if (render->parsed()) return cmd_render(result_path, svg_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
