#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "topoplan/geometry.hpp"

namespace topoplan {

enum class SystemKind { kHolonomic, kDubins };

// Normalize an angle into [-pi, pi).
double normalize_angle(double a);

struct State {
  Point2 position;
  std::optional<double> heading;  // radians, Dubins only

  bool same_as(const State& o, double eps = kGeomEps) const;
};

// The six canonical Dubins words; L/R are unit-turn-rate arcs, S straight.
enum class DubinsWord : std::uint8_t { kLSL, kRSR, kLSR, kRSL, kRLR, kLRL };

// Three-segment Dubins path with per-segment arc lengths (true lengths,
// not angles). Supports evaluation at any arc length.
struct DubinsPath {
  State start;
  DubinsWord word = DubinsWord::kLSL;
  std::array<double, 3> seg_len{0.0, 0.0, 0.0};
  double rho = 1.0;

  double length() const { return seg_len[0] + seg_len[1] + seg_len[2]; }
  State at(double s) const;
};

// Local optimal connection between two states.
struct SteerResult {
  SystemKind system = SystemKind::kHolonomic;
  State start;
  State end_state;
  double cost = 0.0;
  std::optional<DubinsPath> dubins;  // present iff system == kDubins

  State state_at(double s) const;
  Point2 point_at(double s) const { return state_at(s).position; }
};

// Optimal obstacle-free connection a -> b. Holonomic: straight segment,
// Euclidean cost. Dubins: shortest of the six words, cost = path length.
SteerResult connect(const State& a, const State& b, SystemKind system,
                    double rho = 1.0);

// Truncates connect(a, target) at arc length eta; returns target when it
// is within reach.
SteerResult steer(const State& a, const State& target, double eta,
                  SystemKind system, double rho = 1.0);

// Polyline sampling of the path at arc-length steps <= resolution;
// endpoints exact.
std::vector<Point2> trace(const SteerResult& result, double resolution);

// Like trace(), but additionally splits any chord that sweeps an angle
// >= pi/2 as seen from one of the winding centers, so piecewise-linear
// winding sums stay faithful to the underlying curve.
std::vector<Point2> adaptive_trace(const SteerResult& result,
                                   double resolution,
                                   const std::vector<Point2>& winding_centers);

// Number of connect() evaluations since process start. Diagnostic used
// by the replanning path to demonstrate that no steering happens there.
std::uint64_t steering_evaluations();

}  // namespace topoplan
