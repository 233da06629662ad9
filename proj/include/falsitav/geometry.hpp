#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace falsitav {

struct Vec2 {
  double x = 0, y = 0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

// Oriented rectangle: center, heading (radians), half extents.
struct OBB {
  Vec2 center;
  double heading = 0;
  double half_len = 0;   // along heading
  double half_wid = 0;

  std::array<Vec2, 4> corners() const {
    double c = std::cos(heading), s = std::sin(heading);
    Vec2 u{c, s}, v{-s, c};
    std::array<Vec2, 4> out;
    out[0] = center + u * half_len + v * half_wid;
    out[1] = center + u * half_len - v * half_wid;
    out[2] = center - u * half_len - v * half_wid;
    out[3] = center - u * half_len + v * half_wid;
    return out;
  }

  // Signed distance from a point: negative inside (depth to nearest edge).
  double signed_distance(Vec2 p) const {
    double c = std::cos(heading), s = std::sin(heading);
    Vec2 d = p - center;
    double lx = d.x * c + d.y * s;
    double ly = -d.x * s + d.y * c;
    double qx = std::abs(lx) - half_len;
    double qy = std::abs(ly) - half_wid;
    if (qx > 0 || qy > 0) {
      double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
      return std::sqrt(ox * ox + oy * oy);
    }
    return std::max(qx, qy);  // negative: penetration depth
  }
};

inline double segment_point_distance(Vec2 a, Vec2 b, Vec2 p) {
  Vec2 ab = b - a;
  double len2 = ab.dot(ab);
  double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + ab * t)).norm();
}

// Minimum distance from segment [a,b] to the box; negative when the segment
// penetrates (depth at the deepest sampled point).
inline double segment_obb_distance(Vec2 a, Vec2 b, const OBB& box) {
  constexpr int kSamples = 24;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) {
    double t = static_cast<double>(i) / kSamples;
    best = std::min(best, box.signed_distance(a + (b - a) * t));
  }
  if (best > 0) {
    // refine positive case against box edges for accuracy
    auto cs = box.corners();
    for (int e = 0; e < 4; ++e) {
      Vec2 c0 = cs[e], c1 = cs[(e + 1) % 4];
      // closest pair of points between two segments, sampled endpoints +
      // projections
      best = std::min(best, segment_point_distance(a, b, c0));
      best = std::min(best, segment_point_distance(a, b, c1));
      best = std::min(best, segment_point_distance(c0, c1, a));
      best = std::min(best, segment_point_distance(c0, c1, b));
    }
  }
  return best;
}

// Separating-axis overlap test for two oriented rectangles.
inline bool obb_overlap(const OBB& a, const OBB& b) {
  auto ca = a.corners(), cb = b.corners();
  auto axes = [](const OBB& o) {
    double c = std::cos(o.heading), s = std::sin(o.heading);
    return std::array<Vec2, 2>{Vec2{c, s}, Vec2{-s, c}};
  };
  for (const auto& axset : {axes(a), axes(b)}) {
    for (const Vec2& ax : axset) {
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const Vec2& p : ca) {
        double v = p.dot(ax);
        amin = std::min(amin, v);
        amax = std::max(amax, v);
      }
      for (const Vec2& p : cb) {
        double v = p.dot(ax);
        bmin = std::min(bmin, v);
        bmax = std::max(bmax, v);
      }
      if (amax < bmin || bmax < amin) return false;
    }
  }
  return true;
}

inline bool disc_obb_overlap(Vec2 center, double radius, const OBB& box) {
  return box.signed_distance(center) <= radius;
}

}  // namespace falsitav
