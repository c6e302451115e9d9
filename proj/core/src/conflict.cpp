#include "trajmine/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "trajmine/errors.hpp"

namespace trajmine {

namespace {

// Tolerance when testing passage times against the horizon, so a path
// truncated at exactly speed * horizon meters keeps its endpoint eligible.
constexpr double kHorizonEps = 1e-9;

Polyline truncate_to_arc(const std::vector<Vec2>& pts, double arc,
                         double final_heading) {
  std::vector<Vec2> out;
  out.push_back(pts.front());
  double remaining = arc;
  for (std::size_t i = 0; i + 1 < pts.size() && remaining > 0.0; ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[i + 1];
    const double seg = norm(b - a);
    if (seg >= remaining) {
      const double t = remaining / seg;
      out.push_back(a + (b - a) * t);
      remaining = 0.0;
    } else {
      out.push_back(b);
      remaining -= seg;
    }
  }
  if (remaining > 0.0) {
    const Vec2 dir{std::cos(final_heading), std::sin(final_heading)};
    out.push_back(out.back() + dir * remaining);
  }
  return Polyline(std::move(out));
}

struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

const char* to_string(PathMode m) {
  return m == PathMode::recorded_retimed ? "recorded_retimed" : "straight_line";
}

std::optional<PathMode> path_mode_from_string(const std::string& s) {
  if (s == "recorded_retimed") return PathMode::recorded_retimed;
  if (s == "straight_line") return PathMode::straight_line;
  return std::nullopt;
}

FuturePath future_path(const AgentTrack& track, std::int64_t step,
                       double horizon_m, PathMode mode) {
  const AgentState& now = track.at(step);
  FuturePath fp;
  fp.track_id = track.track_id;
  fp.origin_step = step;
  fp.assumed_speed = now.speed;
  fp.horizon_m = horizon_m;
  fp.half_width = now.width / 2.0;

  const double arc = now.speed * horizon_m;
  if (arc <= 0.0) {
    fp.path = Polyline({now.position()});
    return fp;
  }

  if (mode == PathMode::straight_line) {
    const Vec2 dir{std::cos(now.heading), std::sin(now.heading)};
    fp.path = Polyline({now.position(), now.position() + dir * arc});
    return fp;
  }

  const Polyline recorded = recorded_path_after(track, step);
  if (recorded.size() < 2) {
    // No recorded motion ahead; extend along the final recorded heading.
    const double h = track.states.back().heading;
    const Vec2 dir{std::cos(h), std::sin(h)};
    fp.path = Polyline({now.position(), now.position() + dir * arc});
    return fp;
  }
  fp.path =
      truncate_to_arc(recorded.points(), arc, track.states.back().heading);
  return fp;
}

std::optional<double> time_to_point(const FuturePath& fp, Vec2 p) {
  const double arc = arc_length_to_point(fp.path, p);
  if (fp.assumed_speed <= 0.0) return std::nullopt;
  return arc / fp.assumed_speed;
}

namespace {

// Buffer-corridor predicate with `corridor` in the corridor role: the moving
// path must start strictly outside the widened corridor and enter it.
bool corridor_ok(const FuturePath& moving, const FuturePath& corridor,
                 double buffer_floor, double* n_out) {
  const double n = std::max(buffer_floor, corridor.half_width);
  if (!starts_outside_buffer(moving.path, corridor.path, n)) return false;
  if (!enters_buffer(moving.path, corridor.path, n)) return false;
  *n_out = n;
  return true;
}

}  // namespace

std::optional<ConflictPair> st_conflict(const FuturePath& fa,
                                        const FuturePath& fb,
                                        const ConflictParams& params) {
  const auto hit = first_intersection(fa.path, fb.path);
  if (!hit) return std::nullopt;

  if (fa.assumed_speed <= 0.0 || fb.assumed_speed <= 0.0) return std::nullopt;
  const double ta = hit->arc_a / fa.assumed_speed;
  const double tb = hit->arc_b / fb.assumed_speed;
  if (ta > params.horizon_m + kHorizonEps) return std::nullopt;
  if (tb > params.horizon_m + kHorizonEps) return std::nullopt;
  if (std::abs(ta - tb) >= params.conf_time) return std::nullopt;

  // Both corridor-role assignments must validate the buffer predicate; a
  // follower already inside the leader's corridor is not a conflict.
  double n_a = 0.0;
  double n_b = 0.0;
  if (!corridor_ok(fb, fa, params.buffer_floor, &n_a) ||
      !corridor_ok(fa, fb, params.buffer_floor, &n_b)) {
    return std::nullopt;
  }

  ConflictPair pair;
  pair.point = hit->point;
  pair.buffer_n = std::max(n_a, n_b);
  if (fa.track_id < fb.track_id) {
    pair.id_a = fa.track_id;
    pair.id_b = fb.track_id;
    pair.time_a = ta;
    pair.time_b = tb;
  } else {
    pair.id_a = fb.track_id;
    pair.id_b = fa.track_id;
    pair.time_a = tb;
    pair.time_b = ta;
  }
  return pair;
}

std::vector<FuturePath> future_paths_at(const Scene& scene, std::int64_t step,
                                        const ConflictParams& params) {
  std::vector<FuturePath> out;
  for (const AgentTrack& track : scene.tracks) {
    if (!track.covers(step)) continue;
    if (!params.include_nonvehicles && track.agent_type != AgentType::vehicle)
      continue;
    if (track.at(step).speed < params.min_speed) continue;
    out.push_back(future_path(track, step, params.horizon_m, params.path_mode));
  }
  return out;
}

std::vector<ChainComponent> build_components(
    const std::vector<FuturePath>& paths, const ConflictParams& params) {
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return paths[a].track_id < paths[b].track_id;
  });

  std::vector<ConflictPair> pairs;
  UnionFind uf(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      auto pair = st_conflict(paths[order[i]], paths[order[j]], params);
      if (pair) {
        pairs.push_back(*pair);
        uf.unite(order[i], order[j]);
      }
    }
  }

  // Group members by union-find root, keyed by the smallest member id.
  std::map<std::string, std::vector<std::string>> members;
  std::map<std::size_t, std::string> root_key;
  for (std::size_t idx : order) {
    const std::size_t root = uf.find(idx);
    auto it = root_key.find(root);
    if (it == root_key.end())
      it = root_key.emplace(root, paths[idx].track_id).first;
    members[it->second].push_back(paths[idx].track_id);
  }

  std::vector<ChainComponent> out;
  for (auto& [key, ids] : members) {
    if (ids.size() < 2) continue;
    ChainComponent comp;
    comp.agent_ids = std::move(ids);
    std::sort(comp.agent_ids.begin(), comp.agent_ids.end());
    for (const ConflictPair& p : pairs) {
      if (std::binary_search(comp.agent_ids.begin(), comp.agent_ids.end(),
                             p.id_a)) {
        comp.pairs.push_back(p);
      }
    }
    std::sort(comp.pairs.begin(), comp.pairs.end(),
              [](const ConflictPair& x, const ConflictPair& y) {
                return std::tie(x.id_a, x.id_b) < std::tie(y.id_a, y.id_b);
              });
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace trajmine
