#include "topoplan/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace topoplan {

namespace {

bool within_box(const Point2& p, const Point2& a, const Point2& b,
                double eps) {
  return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
         p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

}  // namespace

int orientation(const Point2& a, const Point2& b, const Point2& c,
                double eps) {
  const double v = (b - a).cross(c - a);
  if (std::abs(v) <= eps) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c,
                        const Point2& d, double eps) {
  const int o1 = orientation(a, b, c, eps);
  const int o2 = orientation(a, b, d, eps);
  const int o3 = orientation(c, d, a, eps);
  const int o4 = orientation(c, d, b, eps);

  if (o1 != o2 && o3 != o4) return true;

  // Collinear touch or overlap.
  if (o1 == 0 && within_box(c, a, b, eps)) return true;
  if (o2 == 0 && within_box(d, a, b, eps)) return true;
  if (o3 == 0 && within_box(a, c, d, eps)) return true;
  if (o4 == 0 && within_box(b, c, d, eps)) return true;
  return false;
}

double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b) {
  const Point2 ab = b - a;
  const double l2 = ab.dot(ab);
  if (l2 <= 0.0) return p.dist(a);
  double t = (p - a).dot(ab) / l2;
  t = std::clamp(t, 0.0, 1.0);
  return p.dist(a + ab * t);
}

double Polygon::signed_area() const {
  double s = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    s += vertices[i].cross(vertices[(i + 1) % n]);
  }
  return 0.5 * s;
}

bool Polygon::is_simple() const {
  const std::size_t n = vertices.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share an endpoint by construction).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Point2& c = vertices[j];
      const Point2& d = vertices[(j + 1) % n];
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

bool Polygon::on_boundary(const Point2& p, double eps) const {
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= eps)
      return true;
  }
  return false;
}

bool Polygon::contains(const Point2& p) const {
  if (on_boundary(p)) return true;
  // Even-odd crossing with a half-open rule so vertices are not counted
  // twice.
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double t = (p.y - a.y) / (b.y - a.y);
      if (p.x < a.x + t * (b.x - a.x)) inside = !inside;
    }
  }
  return inside;
}

void Polygon::validate(const std::string& label) const {
  if (vertices.size() < 3)
    throw Error(label + ": polygon needs at least 3 vertices");
  for (const Point2& v : vertices) {
    if (!v.finite()) throw Error(label + ": non-finite vertex");
  }
  if (signed_area() <= 0.0)
    throw Error(label + ": vertices must be counter-clockwise");
  if (!is_simple()) throw Error(label + ": polygon is self-intersecting");
}

void Workspace::validate() const {
  if (!(bounds.max.x > bounds.min.x && bounds.max.y > bounds.min.y))
    throw Error("bounds: empty or inverted rectangle");
  if (representative_points.size() != obstacles.size())
    throw Error("workspace: one representative point per obstacle required");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    std::ostringstream label;
    label << "obstacles[" << i << "]";
    obstacles[i].validate(label.str());
    for (const Point2& v : obstacles[i].vertices) {
      if (!bounds.contains(v))
        throw Error(label.str() + ": vertex outside bounds");
    }
    const Point2& zeta = representative_points[i];
    if (!obstacles[i].contains(zeta) || obstacles[i].on_boundary(zeta, 1e-9))
      throw Error(label.str() +
                  ": representative point is not strictly interior");
  }
  // Pairwise disjoint: no edge crossings, no containment.
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    for (std::size_t j = i + 1; j < obstacles.size(); ++j) {
      const auto& pi = obstacles[i].vertices;
      const auto& pj = obstacles[j].vertices;
      for (std::size_t a = 0; a < pi.size(); ++a) {
        for (std::size_t b = 0; b < pj.size(); ++b) {
          if (segments_intersect(pi[a], pi[(a + 1) % pi.size()], pj[b],
                                 pj[(b + 1) % pj.size()])) {
            throw Error("workspace: obstacles " + std::to_string(i) + " and " +
                        std::to_string(j) + " intersect");
          }
        }
      }
      if (obstacles[i].contains(pj[0]) || obstacles[j].contains(pi[0]))
        throw Error("workspace: obstacle contained in another");
    }
  }
}

bool point_in_obstacle(const Point2& p, const Workspace& w) {
  for (const Polygon& poly : w.obstacles) {
    if (poly.contains(p)) return true;
  }
  return false;
}

bool segment_collision_free(const Point2& a, const Point2& b,
                            const Workspace& w) {
  if (!w.bounds.contains(a) || !w.bounds.contains(b)) return false;
  for (const Polygon& poly : w.obstacles) {
    if (poly.contains(a) || poly.contains(b)) return false;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (segments_intersect(a, b, poly.vertices[i],
                             poly.vertices[(i + 1) % n]))
        return false;
    }
  }
  return true;
}

bool polyline_collision_free(const std::vector<Point2>& trace,
                             const Workspace& w) {
  if (trace.size() < 2) throw Error("polyline_collision_free: need >= 2 points");
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    if (!segment_collision_free(trace[i], trace[i + 1], w)) return false;
  }
  return true;
}

std::vector<Point2> sample_free(std::size_t k, const Workspace& w, Rng& rng,
                                std::size_t budget_per_point) {
  std::vector<Point2> out;
  out.reserve(k);
  std::size_t attempts = 0;
  const std::size_t budget = budget_per_point * std::max<std::size_t>(k, 1);
  while (out.size() < k) {
    if (attempts++ >= budget)
      throw Error("sample_free: rejection budget exhausted; free space "
                  "appears empty");
    Point2 p{rng.uniform(w.bounds.min.x, w.bounds.max.x),
             rng.uniform(w.bounds.min.y, w.bounds.max.y)};
    if (!point_in_obstacle(p, w)) out.push_back(p);
  }
  return out;
}

Point2 centroid(const Polygon& poly) {
  const std::size_t n = poly.vertices.size();
  if (n < 3) throw Error("centroid: polygon needs at least 3 vertices");
  double a2 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly.vertices[i];
    const Point2& q = poly.vertices[(i + 1) % n];
    const double c = p.cross(q);
    a2 += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  if (std::abs(a2) < kGeomEps) throw Error("centroid: degenerate polygon");
  Point2 c{cx / (3.0 * a2), cy / (3.0 * a2)};
  if (!poly.contains(c) || poly.on_boundary(c, 1e-9))
    throw Error("centroid: lies outside the polygon; supply an explicit "
                "representative point");
  return c;
}

}  // namespace topoplan
