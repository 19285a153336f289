#include "topoplan/homology.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace topoplan {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

HSig add(const HSig& a, const HSig& b) {
  if (a.size() != b.size()) throw Error("hsig add: length mismatch");
  HSig out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

HSig reverse(const HSig& h) {
  HSig out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = -h[i];
  return out;
}

HSig segment_hsig(const Point2& z1, const Point2& z2, const Workspace& w) {
  const std::size_t n = w.obstacle_count();
  HSig out(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const Point2& zeta = w.representative_points[l];
    const Point2 v1 = z1 - zeta;
    const Point2 v2 = z2 - zeta;
    if (v1.norm() < kGeomEps || v2.norm() < kGeomEps)
      throw DegenerateSegment(
          "segment_hsig: endpoint coincides with a representative point");
    // Signed angle between the two rays, already the minimum-magnitude
    // branch of arg(z2-zeta) - arg(z1-zeta) + 2k*pi.
    const double d = std::atan2(v1.cross(v2), v1.dot(v2));
    if (std::numbers::pi - std::abs(d) < kGeomEps)
      throw DegenerateSegment(
          "segment_hsig: segment passes through a representative point "
          "(winding branch ambiguous)");
    out[l] = d / kTwoPi;
  }
  return out;
}

HSig polyline_hsig(const std::vector<Point2>& trace, const Workspace& w) {
  if (trace.size() < 2) throw Error("polyline_hsig: need >= 2 points");
  HSig out = zero_hsig(w.obstacle_count());
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const HSig seg = segment_hsig(trace[i], trace[i + 1], w);
    for (std::size_t l = 0; l < out.size(); ++l) out[l] += seg[l];
  }
  return out;
}

bool hsig_equal(const HSig& a, const HSig& b, double tol) {
  if (a.size() != b.size()) throw Error("hsig_equal: length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

SigKey quantize_key(const HSig& h, double tol) {
  SigKey key(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    key[i] = static_cast<std::int64_t>(std::llround(h[i] / tol));
  }
  return key;
}

bool is_allowed(const HSig& h, const SignaturePolicy& policy) {
  for (double v : h) {
    // Small slack so exact integer windings sit inside the bound.
    if (std::abs(v) > policy.h_limit + 1e-9) return false;
  }
  if (!policy.blocked.empty() &&
      policy.blocked.count(quantize_key(h, policy.key_tol)) > 0)
    return false;
  return true;
}

std::string key_to_string(const SigKey& key) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) os << ",";
    os << key[i];
  }
  os << "]";
  return os.str();
}

}  // namespace topoplan
