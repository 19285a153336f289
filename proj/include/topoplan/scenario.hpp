#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "topoplan/fmht.hpp"
#include "topoplan/rrht.hpp"

namespace topoplan {

struct PlannerConfig {
  std::string algo = "fmht";  // "fmht" | "rrht"
  std::size_t samples = 500;
  std::size_t iterations = 1000;
  double gamma_multiplier = 1.1;
  std::optional<double> gamma;
  std::optional<double> eta;
  std::uint64_t seed = 0;
  double trace_resolution = 0.05;
  double key_tol = kSigKeyTol;
  double rho = 1.0;
  bool lazy = true;
  std::optional<std::size_t> class_count;
  std::optional<HSig> target_signature;
  std::optional<double> wall_clock_seconds;
};

struct Scenario {
  int schema_version = 1;
  SystemKind system = SystemKind::kHolonomic;
  Rect bounds;
  std::vector<Polygon> obstacles;
  // Explicit representative points; filled from centroids when absent.
  std::vector<std::optional<Point2>> rep_overrides;
  State start;
  GoalRegion goal;
  SignaturePolicy policy;
  PlannerConfig planner;

  Workspace workspace() const;
  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

// Runs the configured planner; deterministic for a fixed seed.
PlanResult run_scenario(const Scenario& s);

nlohmann::json result_to_json(const PlanResult& r, const Scenario& s);

// The parts of a stored result replanning needs.
struct StoredResult {
  Scenario scenario;
  std::vector<ClassPath> classes;
};
StoredResult result_from_json(const nlohmann::json& j);

struct ReplanOutcome {
  bool feasible = false;
  // Surviving classes with signatures extended by the new obstacle's
  // coordinate, cheapest first.
  std::vector<ClassPath> classes;
  std::vector<SigKey> invalidated;  // original keys of blocked classes
  std::uint64_t new_obstacle_checks = 0;
  std::uint64_t steering_evaluations = 0;
};

// Re-labels and re-validates the stored class paths against one new
// obstacle only: no sampling, no steering, and collision checks against
// the new obstacle alone.
ReplanOutcome replan(const StoredResult& prior, const Polygon& new_obstacle,
                     std::optional<Point2> new_rep = std::nullopt);

nlohmann::json replan_to_json(const ReplanOutcome& r, const StoredResult& prior,
                              const Polygon& new_obstacle);

void write_metrics_csv(const PlanResult& r, const std::filesystem::path& path);

// Flattened 2D rendering: obstacles, graph edges, per-class tree edges,
// best paths, legend. Graph/tree layers are drawn when a planner graph
// is supplied.
void render_svg(const PlanResult& r, const Scenario& s,
                const std::filesystem::path& path,
                const Graph* graph = nullptr);

}  // namespace topoplan
