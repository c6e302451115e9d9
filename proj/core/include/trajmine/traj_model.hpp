#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajmine/errors.hpp"
#include "trajmine/geometry.hpp"

namespace trajmine {

enum class AgentType { vehicle, pedestrian, cyclist, other };

const char* to_string(AgentType t);
std::optional<AgentType> agent_type_from_string(const std::string& s);

/// Wraps an angle into (-pi, pi].
double normalize_heading(double h);

/// One timestamped kinematic state. Positions are meters in a scene-local
/// planar frame, heading is radians CCW from +x.
struct AgentState {
  std::string track_id;
  std::int64_t step = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]
  double speed = 0.0;    // m/s, >= 0
  double accel = 0.0;    // m/s^2, signed longitudinal
  double length = 0.0;   // m, > 0
  double width = 0.0;    // m, > 0
  double height = 0.0;   // m, 0 when unknown

  Vec2 position() const { return {x, y}; }
};

/// Mutable pre-ingest state: dynamics may still be absent.
struct StateDraft {
  std::int64_t step = 0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> heading;
  std::optional<double> speed;
  std::optional<double> accel;
  std::optional<double> length;
  std::optional<double> width;
  std::optional<double> height;
};

struct TrackDraft {
  std::string track_id;
  AgentType agent_type = AgentType::vehicle;
  bool is_ego = false;
  std::vector<StateDraft> states;  // sorted by step, contiguous
};

/// One agent's contiguous observation window within a scene.
struct AgentTrack {
  std::string track_id;
  AgentType agent_type = AgentType::vehicle;
  bool is_ego = false;
  std::vector<AgentState> states;  // strictly consecutive steps, no gaps

  std::int64_t first_step() const { return states.front().step; }
  std::int64_t last_step() const { return states.back().step; }
  bool covers(std::int64_t step) const {
    return !states.empty() && step >= first_step() && step <= last_step();
  }
  /// State at an absolute step index; throws StepOutOfRange outside the window.
  const AgentState& at(std::int64_t step) const;
};

struct Scene {
  std::string scene_id;
  std::string dataset_tag;
  double dt = 0.1;                 // seconds per step, > 0
  std::vector<AgentTrack> tracks;  // sorted by track_id, ids unique

  const AgentTrack* find(const std::string& track_id) const;
};

/// One parsed input record (one CSV data row).
struct SceneRow {
  std::string scene_id;
  std::string track_id;
  std::int64_t step = 0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> heading;
  std::optional<double> speed;
  std::optional<double> accel;
  std::optional<double> length;
  std::optional<double> width;
  std::optional<double> height;
  std::optional<AgentType> agent_type;
  std::optional<bool> is_ego;
};

// Extent fallbacks when the input omits them entirely.
inline constexpr double kDefaultLength = 4.5;
inline constexpr double kDefaultWidth = 1.8;
inline constexpr double kDefaultHeight = 1.5;

/// Fills absent speed/heading/accel by finite differences of the recorded
/// positions. Present values are never touched; applying twice equals once.
TrackDraft backfill_dynamics(TrackDraft track, double dt);

/// Completes a backfilled draft into an AgentTrack, applying extent defaults
/// and normalizing headings.
AgentTrack finalize_track(const TrackDraft& draft, double dt);

/// Groups rows by track, backfills dynamics, and assembles the Scene.
/// All rows must share one scene_id and each track's steps must be contiguous.
Scene ingest_scene(const std::vector<SceneRow>& rows, double dt,
                   std::string dataset_tag = "");

/// Recorded positions from `step` (inclusive) to the end of the track,
/// consecutive duplicates removed.
Polyline recorded_path_after(const AgentTrack& track, std::int64_t step);

}  // namespace trajmine
