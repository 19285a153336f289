#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "topoplan/geometry.hpp"

namespace topoplan {

// Per-obstacle winding fractions of a trajectory. Component l is the
// net angle swept around representative point l divided by 2*pi.
using HSig = std::vector<double>;

// Quantized class key used wherever signatures act as map keys.
using SigKey = std::vector<std::int64_t>;

// Default quantization step for class identity. Accumulated float error
// over realistic trajectories stays orders of magnitude below this.
inline constexpr double kSigKeyTol = 1e-6;

// Raised when a segment's winding is branch-ambiguous (the segment
// passes through a representative point, angle change +-pi).
struct DegenerateSegment : Error {
  using Error::Error;
};

struct SignaturePolicy {
  double h_limit = 1.0;
  std::set<SigKey> blocked;
  double key_tol = kSigKeyTol;
};

inline HSig zero_hsig(std::size_t n) { return HSig(n, 0.0); }

HSig add(const HSig& a, const HSig& b);
HSig reverse(const HSig& h);

// Winding of the straight segment z1 -> z2, one component per obstacle.
// Exact for straight segments: the swept angle of a segment seen from
// any off-segment point is within (-pi, pi).
HSig segment_hsig(const Point2& z1, const Point2& z2, const Workspace& w);

// Componentwise sum of segment windings over consecutive pairs.
HSig polyline_hsig(const std::vector<Point2>& trace, const Workspace& w);

// Max-norm comparison; throws on length mismatch.
bool hsig_equal(const HSig& a, const HSig& b, double tol = 1e-6);

SigKey quantize_key(const HSig& h, double tol = kSigKeyTol);

bool is_allowed(const HSig& h, const SignaturePolicy& policy);

std::string key_to_string(const SigKey& key);

}  // namespace topoplan
