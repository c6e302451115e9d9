#include "trajmine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trajmine/errors.hpp"

namespace trajmine {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::crossing: return "crossing";
    case ScenarioKind::merging: return "merging";
    case ScenarioKind::head_on: return "head_on";
    case ScenarioKind::following: return "following";
    default: return "chain";
  }
}

std::optional<ScenarioKind> scenario_kind_from_string(const std::string& s) {
  if (s == "crossing") return ScenarioKind::crossing;
  if (s == "merging") return ScenarioKind::merging;
  if (s == "head_on") return ScenarioKind::head_on;
  if (s == "following") return ScenarioKind::following;
  if (s == "chain") return ScenarioKind::chain;
  return std::nullopt;
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAngleTol = 1e-9;

/// Angle between two approach directions folded into [0, 180] degrees.
double folded_angle(double a_deg, double b_deg) {
  double d = std::fmod(std::fabs(a_deg - b_deg), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

void check_pair_angle(ScenarioKind kind, double theta) {
  auto fail = [&](const char* need) {
    std::ostringstream msg;
    msg << to_string(kind) << " spec: pairwise approach angle " << theta
        << " degrees, need " << need;
    throw InvalidSpec(msg.str());
  };
  switch (kind) {
    case ScenarioKind::merging:
      if (!(theta > kAngleTol && theta < 45.0)) fail("(0, 45)");
      break;
    case ScenarioKind::crossing:
      if (!(theta >= 45.0 && theta <= 135.0)) fail("[45, 135]");
      break;
    case ScenarioKind::head_on:
      if (!(theta > 135.0 && theta < 180.0 - kAngleTol)) fail("(135, 180)");
      break;
    case ScenarioKind::chain:
      if (!(theta > kAngleTol && theta < 180.0 - kAngleTol)) fail("(0, 180)");
      break;
    case ScenarioKind::following:
      if (theta > kAngleTol) fail("0 (same lane)");
      break;
  }
}

std::string derived_scene_id(const ScenarioSpec& spec) {
  if (!spec.scene_id.empty()) return spec.scene_id;
  std::ostringstream id;
  id << "synth_" << to_string(spec.kind) << '_' << spec.seed;
  return id.str();
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  std::size_t n = spec.speeds.size();
  if (n < 2) throw InvalidSpec("spec needs at least 2 agents");
  if (spec.arrival_offsets.size() != n || spec.approach_angles.size() != n) {
    throw InvalidSpec("speeds, arrival_offsets, approach_angles must have "
                      "equal sizes");
  }
  bool pairwise = spec.kind == ScenarioKind::crossing ||
                  spec.kind == ScenarioKind::merging ||
                  spec.kind == ScenarioKind::head_on;
  if (pairwise && n != 2) {
    throw InvalidSpec(std::string(to_string(spec.kind)) +
                      " spec needs exactly 2 agents");
  }
  if (spec.dt <= 0.0) throw InvalidSpec("dt must be positive");
  if (spec.length <= 0.0 || spec.width <= 0.0) {
    throw InvalidSpec("vehicle extents must be positive");
  }
  double max_offset = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.speeds[i] <= 0.0) throw InvalidSpec("speeds must be positive");
    if (spec.arrival_offsets[i] < 0.0) {
      throw InvalidSpec("arrival offsets must be non-negative");
    }
    max_offset = std::max(max_offset, spec.arrival_offsets[i]);
  }
  if (spec.duration < max_offset + 2.0) {
    throw InvalidSpec("duration must cover max arrival offset + 2 s");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      check_pair_angle(spec.kind, folded_angle(spec.approach_angles[i],
                                               spec.approach_angles[j]));
      if (spec.kind == ScenarioKind::following &&
          std::fabs(spec.speeds[i] - spec.speeds[j]) < kAngleTol &&
          std::fabs(spec.arrival_offsets[i] - spec.arrival_offsets[j]) <
              kAngleTol) {
        throw InvalidSpec("following spec: two agents share speed and "
                          "arrival offset, their tracks coincide");
      }
    }
  }
}

std::string synth_track_id(std::size_t index) {
  std::ostringstream id;
  id << 'a';
  if (index < 10) id << '0';
  id << index;
  return id.str();
}

Scene generate(const ScenarioSpec& spec) {
  validate(spec);
  std::size_t n = spec.speeds.size();
  std::int64_t steps =
      static_cast<std::int64_t>(std::floor(spec.duration / spec.dt + 1e-9));

  std::vector<SceneRow> rows;
  rows.reserve(n * static_cast<std::size_t>(steps + 1));
  std::string scene_id = derived_scene_id(spec);
  for (std::size_t i = 0; i < n; ++i) {
    double v = spec.speeds[i];
    double theta = spec.approach_angles[i] * kPi / 180.0;
    Vec2 dir{std::cos(theta), std::sin(theta)};
    for (std::int64_t s = 0; s <= steps; ++s) {
      double t = static_cast<double>(s) * spec.dt;
      // Through the origin exactly at the arrival offset.
      Vec2 p = dir * (v * (t - spec.arrival_offsets[i]));
      SceneRow row;
      row.scene_id = scene_id;
      row.track_id = synth_track_id(i);
      row.step = s;
      // + 0.0 turns negative zeros into plain zeros in the output.
      row.x = p.x + 0.0;
      row.y = p.y + 0.0;
      row.heading = theta;
      row.speed = v;
      row.accel = 0.0;
      row.length = spec.length;
      row.width = spec.width;
      row.height = spec.height;
      row.agent_type = AgentType::vehicle;
      row.is_ego = false;
      rows.push_back(std::move(row));
    }
  }
  return ingest_scene(rows, spec.dt);
}

std::vector<std::pair<std::string, std::string>> expected_conflicts(
    const ScenarioSpec& spec, const ConflictParams& params) {
  validate(spec);
  std::vector<std::pair<std::string, std::string>> out;
  if (spec.kind == ScenarioKind::following) return out;
  std::size_t n = spec.speeds.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (spec.speeds[i] < params.min_speed ||
          spec.speeds[j] < params.min_speed) {
        continue;
      }
      if (spec.arrival_offsets[i] > params.horizon_m ||
          spec.arrival_offsets[j] > params.horizon_m) {
        continue;
      }
      double dt_arrive =
          std::fabs(spec.arrival_offsets[i] - spec.arrival_offsets[j]);
      if (dt_arrive >= params.conf_time) continue;
      out.emplace_back(synth_track_id(i), synth_track_id(j));
    }
  }
  return out;
}

}  // namespace trajmine
