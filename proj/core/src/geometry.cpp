#include "trajmine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trajmine {

namespace {

constexpr double kDuplicateEps = 1e-9;   // consecutive-point collapse
constexpr double kOnLineEps = 1e-6;      // membership for arc_length_to_point
constexpr double kParamEps = 1e-12;      // segment-parameter inclusion
constexpr double kSamplePitch = 0.1;     // buffer membership sampling, meters

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

}  // namespace

Polyline::Polyline(std::vector<Vec2> points) {
  pts_.reserve(points.size());
  for (const Vec2& p : points) {
    if (pts_.empty() || norm(p - pts_.back()) > kDuplicateEps) {
      pts_.push_back(p);
    }
  }
}

double Polyline::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    total += norm(pts_[i] - pts_[i - 1]);
  }
  return total;
}

std::optional<IntersectionHit> first_intersection(const Polyline& a,
                                                  const Polyline& b) {
  const auto& pa = a.points();
  const auto& pb = b.points();
  if (pa.empty() || pb.empty()) return std::nullopt;

  // Cumulative arc offsets along b, reused per a-segment.
  std::vector<double> cum_b(pb.size(), 0.0);
  for (std::size_t j = 1; j < pb.size(); ++j) {
    cum_b[j] = cum_b[j - 1] + norm(pb[j] - pb[j - 1]);
  }

  // Degenerate single-point inputs: treat as zero-length "segments".
  const std::size_t na = pa.size() > 1 ? pa.size() - 1 : 1;
  const std::size_t nb = pb.size() > 1 ? pb.size() - 1 : 1;

  double cum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const Vec2 p0 = pa[i];
    const Vec2 p1 = pa[std::min(i + 1, pa.size() - 1)];
    const Vec2 r = p1 - p0;
    const double len_a = norm(r);

    // Best hit within this a-segment: smallest local t, then smallest arc_b.
    bool found = false;
    double best_t = 0.0, best_arc_b = 0.0;
    Vec2 best_pt{};

    for (std::size_t j = 0; j < nb; ++j) {
      const Vec2 q0 = pb[j];
      const Vec2 q1 = pb[std::min(j + 1, pb.size() - 1)];
      const Vec2 s = q1 - q0;
      const double len_b = norm(s);
      const Vec2 qp = q0 - p0;
      const double denom = cross(r, s);
      const double scale = std::max({len_a, len_b, 1.0});

      double t, u;  // params on a-seg and b-seg, in [0,1]
      if (std::abs(denom) > kParamEps * scale * scale) {
        t = cross(qp, s) / denom;
        u = cross(qp, r) / denom;
        if (t < -kParamEps || t > 1.0 + kParamEps || u < -kParamEps ||
            u > 1.0 + kParamEps) {
          continue;
        }
        t = std::clamp(t, 0.0, 1.0);
        u = std::clamp(u, 0.0, 1.0);
      } else {
        // Parallel: intersect only if collinear, then take the first point of
        // overlap along a.
        const double line_dist =
            len_a > 0.0 ? std::abs(cross(qp, r)) / len_a : norm(qp);
        if (line_dist > kOnLineEps) continue;
        if (len_a <= 0.0) {
          // a is a single point lying on b's segment line; range-check via u.
          const double u_pt =
              len_b > 0.0 ? dot(p0 - q0, s) / (len_b * len_b) : 0.0;
          if (len_b > 0.0 &&
              (u_pt < -kParamEps || u_pt > 1.0 + kParamEps)) {
            continue;
          }
          if (len_b <= 0.0 && norm(p0 - q0) > kOnLineEps) continue;
          t = 0.0;
          u = std::clamp(u_pt, 0.0, 1.0);
        } else {
          const double r2 = len_a * len_a;
          double t0 = dot(q0 - p0, r) / r2;
          double t1 = dot(q1 - p0, r) / r2;
          if (t0 > t1) std::swap(t0, t1);
          const double lo = std::max(t0, 0.0);
          const double hi = std::min(t1, 1.0);
          if (lo > hi + kParamEps) continue;
          t = std::clamp(lo, 0.0, 1.0);
          const Vec2 hit_pt = p0 + r * t;
          u = len_b > 0.0
                  ? std::clamp(dot(hit_pt - q0, s) / (len_b * len_b), 0.0, 1.0)
                  : 0.0;
        }
      }

      const double arc_b = cum_b[j] + u * len_b;
      if (!found || t < best_t - kParamEps ||
          (std::abs(t - best_t) <= kParamEps && arc_b < best_arc_b)) {
        found = true;
        best_t = t;
        best_arc_b = arc_b;
        best_pt = p0 + r * best_t;
      }
    }

    if (found) {
      return IntersectionHit{best_pt, cum_a + best_t * len_a, best_arc_b};
    }
    cum_a += len_a;
  }
  return std::nullopt;
}

double min_distance_to_polyline(Vec2 p, const Polyline& line) {
  const auto& pts = line.points();
  if (pts.empty()) return std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return norm(p - pts[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    best = std::min(best, point_segment_distance(p, pts[i], pts[i + 1]));
  }
  return best;
}

bool enters_buffer(const Polyline& moving, const Polyline& corridor,
                   double n) {
  if (n <= 0.0) throw NonPositiveBuffer("enters_buffer: n must be > 0");
  const auto& pts = moving.points();
  if (pts.empty()) return false;
  if (min_distance_to_polyline(pts[0], corridor) <= n) return true;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 seg = pts[i + 1] - pts[i];
    const double len = norm(seg);
    const auto steps =
        static_cast<std::size_t>(std::ceil(len / kSamplePitch));
    for (std::size_t k = 1; k <= steps; ++k) {
      const Vec2 sample =
          pts[i] + seg * (static_cast<double>(k) / static_cast<double>(steps));
      if (min_distance_to_polyline(sample, corridor) <= n) return true;
    }
  }
  return false;
}

bool starts_outside_buffer(const Polyline& moving, const Polyline& corridor,
                           double n) {
  if (n <= 0.0) throw NonPositiveBuffer("starts_outside_buffer: n must be > 0");
  if (moving.empty()) return false;
  return min_distance_to_polyline(moving.front(), corridor) > n;
}

double arc_length_to_point(const Polyline& line, Vec2 p) {
  const auto& pts = line.points();
  if (pts.empty()) throw PointNotOnPolyline("arc_length_to_point: empty line");
  if (pts.size() == 1) {
    if (norm(p - pts[0]) > kOnLineEps) {
      throw PointNotOnPolyline("arc_length_to_point: point off polyline");
    }
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 seg = pts[i + 1] - pts[i];
    const double len = norm(seg);
    const double t =
        len > 0.0 ? std::clamp(dot(p - pts[i], seg) / (len * len), 0.0, 1.0)
                  : 0.0;
    if (norm(p - (pts[i] + seg * t)) <= kOnLineEps) {
      best = std::min(best, cum + t * len);
    }
    cum += len;
  }
  if (!std::isfinite(best)) {
    throw PointNotOnPolyline("arc_length_to_point: point off polyline");
  }
  return best;
}

Vec2 direction_at_arc(const Polyline& line, double arc) {
  const auto& pts = line.points();
  if (pts.size() < 2) return {0.0, 0.0};
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 seg = pts[i + 1] - pts[i];
    const double len = norm(seg);
    if (arc <= cum + len || i + 2 == pts.size()) {
      return seg * (1.0 / len);
    }
    cum += len;
  }
  return {0.0, 0.0};
}

}  // namespace trajmine
