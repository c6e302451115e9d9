#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajmine/geometry.hpp"
#include "trajmine/traj_model.hpp"

namespace trajmine {

enum class PathMode { recorded_retimed, straight_line };

const char* to_string(PathMode m);
std::optional<PathMode> path_mode_from_string(const std::string& s);

struct ConflictParams {
  double horizon_m = 5.0;     // seconds, the future-path horizon
  double conf_time = 3.0;     // seconds, max passage-time difference
  double buffer_floor = 1.0;  // meters, lower bound on the corridor buffer
  PathMode path_mode = PathMode::recorded_retimed;
  double min_speed = 0.1;     // m/s, slower agents are skipped
  bool include_nonvehicles = false;
};

/// An agent's assumed future trajectory over the horizon: recorded (or
/// extrapolated) geometry traversed at the current speed.
struct FuturePath {
  std::string track_id;
  std::int64_t origin_step = 0;
  Polyline path;
  double assumed_speed = 0.0;  // m/s, held constant over the horizon
  double horizon_m = 5.0;      // seconds
  double half_width = 0.9;     // meters, buffer input when in the corridor role
};

/// A pairwise spatiotemporal conflict: both future paths cross at `point`
/// and the passage-time difference is below ConfTime.
struct ConflictPair {
  std::string id_a;  // id_a < id_b lexicographically
  std::string id_b;
  Vec2 point;          // the potential conflict point
  double time_a = 0.0; // seconds until id_a reaches the point
  double time_b = 0.0;
  double buffer_n = 0.0;  // meters, the corridor buffer that validated

  const std::string& other(const std::string& id) const {
    return id == id_a ? id_b : id_a;
  }
  bool involves(const std::string& id) const {
    return id == id_a || id == id_b;
  }
  double time_of(const std::string& id) const {
    return id == id_a ? time_a : time_b;
  }
};

/// A connected set of agents linked by chain conflicts, with the pairwise
/// conflicts restricted to the component.
struct ChainComponent {
  std::vector<std::string> agent_ids;  // sorted, |agent_ids| >= 2
  std::vector<ConflictPair> pairs;     // sorted by (id_a, id_b)
};

/// Builds the future path at `step`. recorded_retimed keeps the recorded
/// geometry truncated to assumed_speed * horizon meters of arc (extended
/// straight along the final heading when the record runs out);
/// straight_line extrapolates along the heading at `step`.
FuturePath future_path(const AgentTrack& track, std::int64_t step,
                       double horizon_m, PathMode mode);

/// Seconds until the path reaches `p` at the assumed speed; nullopt when the
/// agent is stationary. Throws PointNotOnPolyline if `p` is off the path.
std::optional<double> time_to_point(const FuturePath& fp, Vec2 p);

/// Evaluates the spatiotemporal-conflict predicate on one ordered pair of
/// future paths. Symmetric in its arguments.
std::optional<ConflictPair> st_conflict(const FuturePath& fa,
                                        const FuturePath& fb,
                                        const ConflictParams& params);

/// Future paths for every eligible track at `step` (covers the step, vehicle
/// unless include_nonvehicles, speed >= min_speed).
std::vector<FuturePath> future_paths_at(const Scene& scene, std::int64_t step,
                                        const ConflictParams& params);

/// Evaluates st_conflict over all unordered pairs and returns the connected
/// components of the conflict graph, each with its restricted pair set.
/// Components sorted by smallest member id; members sorted by id.
std::vector<ChainComponent> build_components(
    const std::vector<FuturePath>& paths, const ConflictParams& params);

}  // namespace trajmine
