#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trajmine/conflict.hpp"
#include "trajmine/traj_model.hpp"

namespace trajmine {

enum class ScenarioKind { crossing, merging, head_on, following, chain };

const char* to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_kind_from_string(const std::string& s);

/// Parametric straight-path scenario: agent i drives a constant-speed
/// straight line through a single common conflict point (the origin),
/// reaching it exactly arrival_offsets[i] seconds after the scene starts.
/// kinds constrain the pairwise angle between approach directions:
/// merging under 45 degrees, crossing 45..135, head_on above 135 (never
/// exactly 180: opposed collinear lines have no single crossing point),
/// following all equal (same lane, which must yield no conflicts), chain
/// any mix of non-collinear angles.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::crossing;
  std::string scene_id;                 // derived from kind+seed when empty
  std::vector<double> speeds;           // m/s per agent, > 0
  std::vector<double> arrival_offsets;  // seconds per agent, >= 0
  std::vector<double> approach_angles;  // degrees per agent
  double dt = 0.1;                      // seconds per step
  double duration = 10.0;  // seconds, >= max arrival_offset + 2
  std::uint64_t seed = 0;
  // Vehicle extents applied to every agent.
  double length = kDefaultLength;
  double width = kDefaultWidth;
  double height = kDefaultHeight;
};

/// Throws InvalidSpec when the spec violates its invariants (sizes, signs,
/// duration, or the kind's angle constraints).
void validate(const ScenarioSpec& spec);

/// Builds the scene: track ids a00, a01, ... in input order, states at
/// every step of [0, duration], agent i positioned so it reaches the
/// origin at its arrival offset. Deterministic.
Scene generate(const ScenarioSpec& spec);

/// Analytic ground truth, no pipeline code: the track-id pairs whose
/// arrival-offset difference is below conf_time, with both offsets within
/// the horizon and both speeds at or above min_speed. following yields
/// none. Exactly matches detection when the spec keeps agents
/// well-separated: offsets within the horizon, pairwise angles away from 0
/// and 180 degrees, and approach legs long enough to start outside the
/// conflict buffer.
std::vector<std::pair<std::string, std::string>> expected_conflicts(
    const ScenarioSpec& spec, const ConflictParams& params);

/// The track id of agent `index` as generate() names it.
std::string synth_track_id(std::size_t index);

}  // namespace trajmine
