#include "topoplan/steering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

namespace topoplan {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::atomic<std::uint64_t> g_steering_evals{0};

double mod_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

Point2 unit_vec(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Center of the turning circle for a pose; dir +1 = left, -1 = right.
Point2 turn_center(const Point2& p, double theta, int dir, double rho) {
  return p + unit_vec(theta + dir * kPi / 2.0) * rho;
}

struct WordSpec {
  DubinsWord word;
  std::array<int, 3> dirs;  // +1 L, -1 R, 0 S
};

constexpr std::array<WordSpec, 6> kWords{{
    {DubinsWord::kLSL, {+1, 0, +1}},
    {DubinsWord::kRSR, {-1, 0, -1}},
    {DubinsWord::kLSR, {+1, 0, -1}},
    {DubinsWord::kRSL, {-1, 0, +1}},
    {DubinsWord::kRLR, {-1, +1, -1}},
    {DubinsWord::kLRL, {+1, -1, +1}},
}};

const WordSpec& word_spec(DubinsWord w) {
  return kWords[static_cast<std::size_t>(w)];
}

// Arc length (in angle units, rho = 1) turning from angle `from` to
// angle `to` in direction dir. A hair-below-zero difference would wrap
// to a full circle; both end at the same pose, so take the zero arc.
double arc_angle(double from, double to, int dir) {
  double a = dir > 0 ? mod_two_pi(to - from) : mod_two_pi(from - to);
  if (a > kTwoPi - 1e-9) a = 0.0;
  return a;
}

struct Candidate {
  DubinsWord word;
  std::array<double, 3> lens;  // unit-rho arc lengths
  double total() const { return lens[0] + lens[1] + lens[2]; }
};

// Enumerates feasible parameterizations of all six words for unit rho.
// CSC words via tangent-line geometry, CCC words via the third-circle
// construction (both placements tried; reconstruction filters them).
std::vector<Candidate> dubins_candidates(const Point2& pa, double ta,
                                         const Point2& pb, double tb) {
  std::vector<Candidate> out;

  auto push_csc = [&](DubinsWord w) {
    const auto& spec = word_spec(w);
    const int d1 = spec.dirs[0];
    const int d3 = spec.dirs[2];
    const Point2 c1 = turn_center(pa, ta, d1, 1.0);
    const Point2 c2 = turn_center(pb, tb, d3, 1.0);
    const Point2 delta = c2 - c1;
    const double dist = delta.norm();
    if (d1 == d3) {
      if (dist < kGeomEps) {
        // Same circle: a single arc does it.
        out.push_back({w, {arc_angle(ta, tb, d1), 0.0, 0.0}});
        return;
      }
      const double psi = std::atan2(delta.y, delta.x);
      out.push_back({w, {arc_angle(ta, psi, d1), dist, arc_angle(psi, tb, d3)}});
    } else {
      if (dist < 2.0) return;  // inner tangent requires separation
      const double p = std::sqrt(std::max(0.0, dist * dist - 4.0));
      const double base = std::atan2(delta.y, delta.x);
      const double psi = base + d1 * std::atan2(2.0, p);
      out.push_back({w, {arc_angle(ta, psi, d1), p, arc_angle(psi, tb, d3)}});
    }
  };

  auto push_ccc = [&](DubinsWord w) {
    const auto& spec = word_spec(w);
    const int d1 = spec.dirs[0];
    const int d2 = spec.dirs[1];
    const Point2 c1 = turn_center(pa, ta, d1, 1.0);
    const Point2 c2 = turn_center(pb, tb, d1, 1.0);
    const Point2 delta = c2 - c1;
    const double dist = delta.norm();
    if (dist > 4.0 || dist < kGeomEps) return;
    const double h = std::sqrt(std::max(0.0, 4.0 - 0.25 * dist * dist));
    const Point2 mid = (c1 + c2) * 0.5;
    const Point2 perp{-delta.y / dist, delta.x / dist};
    for (int side : {+1, -1}) {
      const Point2 c3 = mid + perp * (side * h);
      const Point2 m1 = (c1 + c3) * 0.5;
      const Point2 m2 = (c2 + c3) * 0.5;
      auto ang = [](const Point2& c, const Point2& p) {
        return std::atan2(p.y - c.y, p.x - c.x);
      };
      const double t = arc_angle(ang(c1, pa), ang(c1, m1), d1);
      const double m = arc_angle(ang(c3, m1), ang(c3, m2), d2);
      const double q = arc_angle(ang(c2, m2), ang(c2, pb), d1);
      // Heading continuity at the tangency points: position angles must
      // convert to the same heading for both circles, which the shared
      // tangency point guarantees. The middle arc of a true CCC optimum
      // exceeds pi; shorter ones are never optimal but reconstruction
      // filtering keeps only consistent ones anyway.
      out.push_back({w, {t, m, q}});
    }
  };

  push_csc(DubinsWord::kLSL);
  push_csc(DubinsWord::kRSR);
  push_csc(DubinsWord::kLSR);
  push_csc(DubinsWord::kRSL);
  push_ccc(DubinsWord::kRLR);
  push_ccc(DubinsWord::kLRL);
  return out;
}

State dubins_eval(const State& start, DubinsWord word,
                  const std::array<double, 3>& lens, double rho, double s);

}  // namespace

double normalize_angle(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

bool State::same_as(const State& o, double eps) const {
  if (position.dist(o.position) > eps) return false;
  if (heading.has_value() != o.heading.has_value()) return false;
  if (heading &&
      std::abs(normalize_angle(*heading - *o.heading)) > eps)
    return false;
  return true;
}

namespace {

State dubins_eval(const State& start, DubinsWord word,
                  const std::array<double, 3>& lens, double rho, double s) {
  const auto& spec = word_spec(word);
  Point2 p = start.position;
  double theta = start.heading.value_or(0.0);
  double remaining = s;
  for (int i = 0; i < 3; ++i) {
    const double seg = lens[i];
    const double adv = std::min(remaining, seg);
    if (adv > 0.0) {
      if (spec.dirs[i] == 0) {
        p = p + unit_vec(theta) * adv;
      } else {
        const int dir = spec.dirs[i];
        const Point2 c = turn_center(p, theta, dir, rho);
        const double a0 = std::atan2(p.y - c.y, p.x - c.x);
        const double a1 = a0 + dir * adv / rho;
        p = c + unit_vec(a1) * rho;
        theta = normalize_angle(theta + dir * adv / rho);
      }
    }
    remaining -= adv;
    if (remaining <= 0.0) break;
  }
  return State{p, normalize_angle(theta)};
}

}  // namespace

State DubinsPath::at(double s) const {
  s = std::clamp(s, 0.0, length());
  return dubins_eval(start, word, seg_len, rho, s);
}

State SteerResult::state_at(double s) const {
  s = std::clamp(s, 0.0, cost);
  if (system == SystemKind::kDubins) {
    if (!dubins) throw Error("SteerResult: missing dubins path");
    return dubins->at(s);
  }
  if (cost <= 0.0) return start;
  const double t = s / cost;
  return State{start.position + (end_state.position - start.position) * t,
               std::nullopt};
}

SteerResult connect(const State& a, const State& b, SystemKind system,
                    double rho) {
  g_steering_evals.fetch_add(1, std::memory_order_relaxed);
  if (system == SystemKind::kHolonomic) {
    SteerResult r;
    r.system = system;
    r.start = State{a.position, std::nullopt};
    r.end_state = State{b.position, std::nullopt};
    r.cost = a.position.dist(b.position);
    return r;
  }

  if (!a.heading || !b.heading)
    throw Error("connect: dubins states require headings");
  const double ta = *a.heading;
  const double tb = *b.heading;
  // Solve in unit-rho coordinates, then scale lengths back.
  const Point2 pa{a.position.x / rho, a.position.y / rho};
  const Point2 pb{b.position.x / rho, b.position.y / rho};

  const auto candidates = dubins_candidates(pa, ta, pb, tb);
  bool found = false;
  Candidate best{};
  double best_total = 0.0;
  for (const Candidate& c : candidates) {
    // Reconstruction check: discard parameterizations that do not land
    // on the target pose.
    const State end = dubins_eval(State{pa, ta}, c.word, c.lens, 1.0,
                                  c.total());
    if (end.position.dist(pb) > 1e-6 ||
        std::abs(normalize_angle(*end.heading - tb)) > 1e-6)
      continue;
    if (!found || c.total() < best_total) {
      found = true;
      best = c;
      best_total = c.total();
    }
  }
  if (!found) throw Error("connect: no feasible dubins word (unexpected)");

  DubinsPath path;
  path.start = State{a.position, normalize_angle(ta)};
  path.word = best.word;
  path.seg_len = {best.lens[0] * rho, best.lens[1] * rho, best.lens[2] * rho};
  path.rho = rho;

  SteerResult r;
  r.system = system;
  r.start = path.start;
  r.cost = path.length();
  r.dubins = path;
  r.end_state = State{b.position, normalize_angle(tb)};
  return r;
}

SteerResult steer(const State& a, const State& target, double eta,
                  SystemKind system, double rho) {
  if (eta <= 0.0) throw Error("steer: eta must be positive");
  SteerResult full = connect(a, target, system, rho);
  if (full.cost <= eta) return full;

  if (system == SystemKind::kHolonomic) {
    SteerResult r;
    r.system = system;
    r.start = full.start;
    r.end_state = full.state_at(eta);
    r.cost = eta;
    return r;
  }

  // Truncate the optimal word at arc length eta.
  DubinsPath truncated = *full.dubins;
  double remaining = eta;
  for (int i = 0; i < 3; ++i) {
    const double seg = truncated.seg_len[i];
    const double keep = std::min(remaining, seg);
    truncated.seg_len[i] = keep;
    remaining -= keep;
  }
  SteerResult r;
  r.system = system;
  r.start = full.start;
  r.dubins = truncated;
  r.cost = truncated.length();
  r.end_state = truncated.at(r.cost);
  return r;
}

std::vector<Point2> trace(const SteerResult& result, double resolution) {
  if (resolution <= 0.0) throw Error("trace: resolution must be positive");
  if (result.cost <= kGeomEps)
    return {result.start.position, result.end_state.position};
  const int n =
      std::max(1, static_cast<int>(std::ceil(result.cost / resolution - 1e-12)));
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  pts.push_back(result.start.position);
  for (int i = 1; i < n; ++i) {
    pts.push_back(result.point_at(result.cost * i / n));
  }
  pts.push_back(result.end_state.position);
  return pts;
}

std::vector<Point2> adaptive_trace(const SteerResult& result,
                                   double resolution,
                                   const std::vector<Point2>& winding_centers) {
  if (winding_centers.empty()) return trace(result, resolution);
  if (result.cost <= kGeomEps)
    return {result.start.position, result.end_state.position};

  const double half_pi = kPi / 2.0;
  auto needs_split = [&](const Point2& p, const Point2& q) {
    for (const Point2& zeta : winding_centers) {
      const Point2 v1 = p - zeta;
      const Point2 v2 = q - zeta;
      if (v1.norm() < kGeomEps || v2.norm() < kGeomEps) return true;
      if (std::abs(std::atan2(v1.cross(v2), v1.dot(v2))) >= half_pi)
        return true;
    }
    return false;
  };

  std::vector<Point2> pts;
  pts.push_back(result.start.position);
  // Depth-limited bisection by arc-length parameter; paths through a
  // winding center bottom out at the cap and are caught downstream as
  // degenerate segments.
  const int max_depth = 48;
  auto refine = [&](auto&& self, double s0, const Point2& p0, double s1,
                    const Point2& p1, int depth) -> void {
    if (depth < max_depth && needs_split(p0, p1)) {
      const double sm = 0.5 * (s0 + s1);
      const Point2 pm = result.point_at(sm);
      self(self, s0, p0, sm, pm, depth + 1);
      self(self, sm, pm, s1, p1, depth + 1);
    } else {
      pts.push_back(p1);
    }
  };

  const int n =
      std::max(1, static_cast<int>(std::ceil(result.cost / resolution - 1e-12)));
  Point2 prev = result.start.position;
  double prev_s = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double s = result.cost * i / n;
    const Point2 p =
        (i == n) ? result.end_state.position : result.point_at(s);
    refine(refine, prev_s, prev, s, p, 0);
    prev = p;
    prev_s = s;
  }
  return pts;
}

std::uint64_t steering_evaluations() {
  return g_steering_evals.load(std::memory_order_relaxed);
}

}  // namespace topoplan
