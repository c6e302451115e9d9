#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trajmine/conflict.hpp"
#include "trajmine/msaa.hpp"
#include "trajmine/mtl.hpp"
#include "trajmine/traj_model.hpp"

namespace trajmine {

struct ExtractParams {
  ConflictParams conflict;
  MsaaParams msaa;
  double msaa_threshold = 0.1;  // m/s^2, IntCheck boundary
  std::int64_t gap_steps = 3;   // longest below-threshold run kept in-event
};

/// Geometric relation of a conflicting pair, from the angle between their
/// path tangents at the conflict point: under 45 degrees merging, up to 135
/// crossing, beyond that head_on.
enum class ConflictType { crossing, merging, head_on };

const char* to_string(ConflictType t);
std::optional<ConflictType> conflict_type_from_string(const std::string& s);

/// One chain component at one step, with its solved intensity and the unit
/// path tangents (one per pair, in pair order) at the conflict points.
struct StepComponent {
  ChainComponent component;
  double msaa = 0.0;
  std::vector<std::string> key_agents;
  std::vector<std::pair<Vec2, Vec2>> tangents;  // (tangent of id_a, of id_b)
};

struct StepRecord {
  std::int64_t step = 0;
  std::vector<StepComponent> components;
};

/// One interaction thread: a maximal run of steps over which conflict
/// components persist (components at consecutive steps sharing an agent
/// belong to the same thread). The per-step vectors are indexed by
/// step - first_step and cover the run with no holes.
struct ThreadTrace {
  std::vector<std::string> agent_ids;  // union over the run, sorted
  std::int64_t first_step = 0;
  std::int64_t last_step = 0;
  std::vector<bool> intcheck;          // strongest component > threshold
  std::vector<double> intensity;       // strongest component's msaa
  std::vector<std::vector<std::string>> key_agents;  // of that component
};

/// One extracted interaction event.
struct Event {
  std::string scene_id;
  std::string dataset_tag;
  std::vector<std::string> agent_ids;  // sorted, >= 2
  std::int64_t start_step = 0;
  std::int64_t end_step = 0;           // inclusive
  double duration_s = 0.0;             // (end - start + 1) * dt
  double intensity_max = 0.0;
  double intensity_mean = 0.0;
  std::optional<double> min_pet;       // seconds; absent when no pair's
                                       // conflict zone is entered by both
  bool pet_overlap = false;            // some pair occupied a zone jointly
  bool has_av = false;
  std::vector<AgentType> agent_types;        // aligned with agent_ids
  std::vector<ConflictType> conflict_types;  // sorted unique labels
};

/// Representative observation of one conflicting pair within an event: the
/// step where its component was strongest, with the classification there.
struct EventPairAnnotation {
  ConflictPair pair;
  std::int64_t step = 0;
  ConflictType type = ConflictType::crossing;
};

struct SceneAnalysis {
  std::vector<StepRecord> steps;
  std::vector<ThreadTrace> threads;
  std::vector<Event> events;
  std::vector<std::size_t> event_thread;  // events[i] came from threads[...]
  std::vector<std::vector<EventPairAnnotation>> event_pairs;  // per event
};

/// Detects conflict components at every step of the scene and quantifies
/// each with the min-effort solver.
std::vector<StepRecord> scan_scene(const Scene& scene,
                                   const ExtractParams& params);

/// Maximal true-runs of the trace, bridging false-gaps of at most gap_steps
/// steps. Returns inclusive (start_step, end_step) pairs in the trace's
/// absolute step numbering; bridged gaps count toward a run's extent.
std::vector<std::pair<std::int64_t, std::int64_t>> cut_segments(
    const BoolTrace& int_check, std::int64_t gap_steps);

struct PetOutcome {
  double pet = 0.0;      // seconds between first leaving and second entering
  bool overlap = false;  // both occupied the zone at once (pet forced to 0)
};

/// Post-encroachment time at the pair's conflict point. Each agent's
/// occupancy of its circular zone (radius n + vehicle length / 2) is the
/// hull of its recorded passage, entry and exit linearly interpolated.
/// nullopt when either track never enters its zone.
std::optional<PetOutcome> compute_pet(const AgentTrack& track_a,
                                      const AgentTrack& track_b,
                                      const ConflictPair& pair, double n,
                                      double dt);

/// Classifies from the unit path tangents at the conflict point.
ConflictType classify_conflict(Vec2 tangent_a, Vec2 tangent_b);

/// Classifies a conflict from the two future paths, taking each tangent at
/// the arc where the path reaches the conflict point.
ConflictType classify_conflict(const ConflictPair& pair, const FuturePath& fa,
                               const FuturePath& fb);

/// The segment acceptance condition for a run of `run_length` steps starting
/// at the evaluation step, over signal `ic`: true at the boundaries, no
/// internal false-gap longer than gap_steps, and maximal on both sides.
MtlFormula segment_formula(std::int64_t run_length, std::int64_t gap_steps);

/// Threads the step records, cuts each thread's IntCheck trace into events,
/// and assembles them. Every event is re-verified against segment_formula
/// before emission. Events sorted by (start_step, end_step, agent_ids).
std::vector<Event> assemble_events(const Scene& scene,
                                   const std::vector<StepRecord>& records,
                                   const ExtractParams& params);

/// Full per-scene pipeline (scan_scene + assembly) keeping the intermediate
/// step records, threads, and per-event conflict annotations.
SceneAnalysis analyze_scene(const Scene& scene, const ExtractParams& params);

/// analyze_scene reduced to its event list.
std::vector<Event> extract_events(const Scene& scene,
                                  const ExtractParams& params);

}  // namespace trajmine
