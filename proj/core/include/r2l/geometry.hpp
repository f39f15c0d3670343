#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace r2l {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
};

// Sensor pose in world coordinates. heading is the direction of the sensor
// boresight, measured counterclockwise from +x, wrapped to (-pi, pi].
struct Pose {
  Vec2 pos;
  double heading = 0.0;
};

inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct Segment {
  Vec2 p0, p1;

  Vec2 dir() const { return p1 - p0; }
  double length() const { return dir().norm(); }
  // Unit normal; which of the two faces it points toward is unspecified.
  Vec2 normal() const {
    Vec2 d = dir().normalized();
    return {-d.y, d.x};
  }
};

// First intersection of the ray origin + t*dir (t >= 0, dir need not be unit)
// with the segment. Returns the parameter t, or nullopt if they miss.
inline std::optional<double> ray_segment(Vec2 origin, Vec2 dir, const Segment& s) {
  Vec2 e = s.p1 - s.p0;
  double denom = dir.cross(e);
  if (std::abs(denom) < 1e-12) return std::nullopt;  // parallel
  Vec2 q = s.p0 - origin;
  double t = q.cross(e) / denom;
  double u = q.cross(dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

inline double point_segment_distance(Vec2 p, const Segment& s) {
  Vec2 e = s.p1 - s.p0;
  double len2 = e.norm2();
  if (len2 == 0.0) return (p - s.p0).norm();
  double u = (p - s.p0).dot(e) / len2;
  u = std::clamp(u, 0.0, 1.0);
  return (p - (s.p0 + e * u)).norm();
}

// Mirror image of a point across the infinite line through the segment.
inline Vec2 reflect_point(Vec2 p, const Segment& s) {
  Vec2 d = s.dir().normalized();
  Vec2 rel = p - s.p0;
  Vec2 along = d * rel.dot(d);
  Vec2 perp = rel - along;
  return s.p0 + along - perp;
}

struct Aabb {
  Vec2 lo, hi;

  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  Vec2 extent() const { return hi - lo; }
};

}  // namespace r2l
