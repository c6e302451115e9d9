#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "trajmine/errors.hpp"

namespace trajmine {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Planar polyline; consecutive points closer than 1e-9 m are collapsed.
class Polyline {
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  Vec2 front() const { return pts_.front(); }
  Vec2 back() const { return pts_.back(); }

  /// Total arc length in meters (0 for a single point).
  double length() const;

private:
  std::vector<Vec2> pts_;
};

struct IntersectionHit {
  Vec2 point;
  double arc_a = 0.0;  // arc length of the hit along polyline a
  double arc_b = 0.0;  // arc length of the hit along polyline b
};

/// Earliest (by arc length along `a`) intersection of any segment pair of the
/// two polylines. Collinear overlap yields the first point of overlap along
/// `a`; ties across `b` break toward smaller arc_b. none if disjoint.
std::optional<IntersectionHit> first_intersection(const Polyline& a,
                                                  const Polyline& b);

/// Euclidean distance from `p` to the nearest point of `line`.
double min_distance_to_polyline(Vec2 p, const Polyline& line);

/// True iff some point of `moving` (segments sampled at <= 0.1 m pitch) lies
/// within distance `n` of `corridor`. Distance exactly n counts as inside.
bool enters_buffer(const Polyline& moving, const Polyline& corridor, double n);

/// True iff the first point of `moving` is strictly farther than `n` from
/// `corridor`. Excludes same-corridor following.
bool starts_outside_buffer(const Polyline& moving, const Polyline& corridor,
                           double n);

/// Cumulative arc length from the first vertex to `p`, which must lie within
/// 1e-6 m of the polyline. Smallest arc wins if `p` occurs more than once.
double arc_length_to_point(const Polyline& line, Vec2 p);

/// Unit tangent at the given arc length: the direction of the segment
/// containing it (the final segment's direction past the end). Zero vector
/// when the polyline has fewer than two points.
Vec2 direction_at_arc(const Polyline& line, double arc);

}  // namespace trajmine
