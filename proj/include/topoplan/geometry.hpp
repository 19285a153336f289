#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace topoplan {

// Base error type for precondition and validation failures.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tolerance for degenerate geometric predicates (collinear touches,
// duplicate points). Collinear grazing counts as collision.
inline constexpr double kGeomEps = 1e-12;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Point2& o) const { return x * o.x + y * o.y; }
  double cross(const Point2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double dist(const Point2& o) const { return std::hypot(x - o.x, y - o.y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

struct Rect {
  Point2 min;
  Point2 max;

  bool contains(const Point2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }
};

// Simple polygon, vertices in counter-clockwise order.
struct Polygon {
  std::vector<Point2> vertices;

  double signed_area() const;
  bool is_simple() const;
  // Boundary counts as inside (obstacles are closed sets).
  bool contains(const Point2& p) const;
  bool on_boundary(const Point2& p, double eps = kGeomEps) const;
  void validate(const std::string& label) const;
};

struct Workspace {
  Rect bounds;
  std::vector<Polygon> obstacles;
  // One winding center per obstacle, strictly interior.
  std::vector<Point2> representative_points;

  std::size_t obstacle_count() const { return obstacles.size(); }
  void validate() const;
};

// Deterministic random stream; all randomness in the library flows
// through an explicit instance of this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Uniform in [0, 1) with 53-bit resolution, stable across platforms.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

// Orientation of the ordered triple (a, b, c): +1 counter-clockwise,
// -1 clockwise, 0 collinear within eps.
int orientation(const Point2& a, const Point2& b, const Point2& c,
                double eps = kGeomEps);

// Closed-segment intersection test; collinear overlap and endpoint
// touches count as intersecting.
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c,
                        const Point2& d, double eps = kGeomEps);

double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b);

bool point_in_obstacle(const Point2& p, const Workspace& w);

bool segment_collision_free(const Point2& a, const Point2& b,
                            const Workspace& w);

bool polyline_collision_free(const std::vector<Point2>& trace,
                             const Workspace& w);

// k uniform samples from the free space by rejection. Throws after
// budget_per_point * k failed draws in total.
std::vector<Point2> sample_free(std::size_t k, const Workspace& w, Rng& rng,
                                std::size_t budget_per_point = 1000);

// Area centroid. Throws if the centroid is not strictly interior
// (non-convex polygons); the caller must then supply a representative
// point explicitly.
Point2 centroid(const Polygon& poly);

}  // namespace topoplan
