#include "trajmine/traj_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace trajmine {

namespace {
constexpr double kStationaryEps = 1e-6;  // m, heading hold-over threshold
}

const char* to_string(AgentType t) {
  switch (t) {
    case AgentType::vehicle: return "vehicle";
    case AgentType::pedestrian: return "pedestrian";
    case AgentType::cyclist: return "cyclist";
    case AgentType::other: return "other";
  }
  return "other";
}

std::optional<AgentType> agent_type_from_string(const std::string& s) {
  if (s == "vehicle") return AgentType::vehicle;
  if (s == "pedestrian") return AgentType::pedestrian;
  if (s == "cyclist") return AgentType::cyclist;
  if (s == "other") return AgentType::other;
  return std::nullopt;
}

double normalize_heading(double h) {
  h = std::remainder(h, 2.0 * std::numbers::pi);
  if (h <= -std::numbers::pi) h = std::numbers::pi;
  return h;
}

const AgentState& AgentTrack::at(std::int64_t step) const {
  if (!covers(step)) {
    throw StepOutOfRange("track " + track_id + ": step " +
                         std::to_string(step) + " outside window");
  }
  return states[static_cast<std::size_t>(step - first_step())];
}

const AgentTrack* Scene::find(const std::string& track_id) const {
  const auto it = std::lower_bound(
      tracks.begin(), tracks.end(), track_id,
      [](const AgentTrack& t, const std::string& id) { return t.track_id < id; });
  if (it == tracks.end() || it->track_id != track_id) return nullptr;
  return &*it;
}

TrackDraft backfill_dynamics(TrackDraft track, double dt) {
  auto& st = track.states;
  const std::size_t n = st.size();
  if (n == 0) return track;

  auto displacement = [&](std::size_t i) {
    return Vec2{st[i + 1].x - st[i].x, st[i + 1].y - st[i].y};
  };

  // Speeds from forward differences; last sample held from the penultimate.
  for (std::size_t i = 0; i < n; ++i) {
    if (st[i].speed) continue;
    if (n == 1) {
      st[i].speed = 0.0;
    } else if (i + 1 < n) {
      st[i].speed = norm(displacement(i)) / dt;
    } else {
      st[i].speed = st[i - 1].speed;
    }
  }

  // Headings from the same displacements, held over when stationary.
  for (std::size_t i = 0; i < n; ++i) {
    if (st[i].heading) continue;
    if (i + 1 < n) {
      const Vec2 d = displacement(i);
      if (norm(d) >= kStationaryEps) {
        st[i].heading = std::atan2(d.y, d.x);
        continue;
      }
    }
    st[i].heading = i > 0 ? st[i - 1].heading : 0.0;
  }

  // Accelerations from the (now complete) speeds.
  for (std::size_t i = 0; i < n; ++i) {
    if (st[i].accel) continue;
    if (n == 1) {
      st[i].accel = 0.0;
    } else if (i + 1 < n) {
      st[i].accel = (*st[i + 1].speed - *st[i].speed) / dt;
    } else {
      st[i].accel = st[i - 1].accel;
    }
  }
  return track;
}

AgentTrack finalize_track(const TrackDraft& draft, double dt) {
  const TrackDraft filled = backfill_dynamics(draft, dt);
  AgentTrack out;
  out.track_id = filled.track_id;
  out.agent_type = filled.agent_type;
  out.is_ego = filled.is_ego;
  out.states.reserve(filled.states.size());
  for (const StateDraft& d : filled.states) {
    AgentState s;
    s.track_id = filled.track_id;
    s.step = d.step;
    s.x = d.x;
    s.y = d.y;
    s.heading = normalize_heading(*d.heading);
    s.speed = std::max(0.0, *d.speed);
    s.accel = *d.accel;
    s.length = d.length.value_or(kDefaultLength);
    s.width = d.width.value_or(kDefaultWidth);
    s.height = d.height.value_or(kDefaultHeight);
    out.states.push_back(std::move(s));
  }
  return out;
}

Scene ingest_scene(const std::vector<SceneRow>& rows, double dt,
                   std::string dataset_tag) {
  if (rows.empty()) throw EmptyInput("ingest_scene: no records");
  if (!(dt > 0.0)) throw NonPositiveDt("ingest_scene: dt must be > 0");

  const std::string& scene_id = rows.front().scene_id;
  std::map<std::string, TrackDraft> drafts;
  for (const SceneRow& r : rows) {
    if (r.scene_id != scene_id) {
      throw MixedScenes("ingest_scene: records span scene_ids '" + scene_id +
                        "' and '" + r.scene_id + "'");
    }
    TrackDraft& d = drafts[r.track_id];
    if (d.states.empty()) {
      d.track_id = r.track_id;
    }
    if (r.agent_type) d.agent_type = *r.agent_type;
    if (r.is_ego) d.is_ego = d.is_ego || *r.is_ego;
    StateDraft s;
    s.step = r.step;
    s.x = r.x;
    s.y = r.y;
    s.heading = r.heading;
    s.speed = r.speed;
    s.accel = r.accel;
    s.length = r.length;
    s.width = r.width;
    s.height = r.height;
    d.states.push_back(s);
  }

  Scene scene;
  scene.scene_id = scene_id;
  scene.dataset_tag = std::move(dataset_tag);
  scene.dt = dt;
  scene.tracks.reserve(drafts.size());
  for (auto& [id, draft] : drafts) {
    std::sort(draft.states.begin(), draft.states.end(),
              [](const StateDraft& a, const StateDraft& b) {
                return a.step < b.step;
              });
    for (std::size_t i = 1; i < draft.states.size(); ++i) {
      if (draft.states[i].step != draft.states[i - 1].step + 1) {
        throw NonContiguousTrack(
            "ingest_scene: track '" + id + "' steps " +
            std::to_string(draft.states[i - 1].step) + " -> " +
            std::to_string(draft.states[i].step));
      }
    }
    scene.tracks.push_back(finalize_track(draft, dt));
  }
  return scene;
}

Polyline recorded_path_after(const AgentTrack& track, std::int64_t step) {
  if (!track.covers(step)) {
    throw StepOutOfRange("recorded_path_after: step " + std::to_string(step) +
                         " outside track window");
  }
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(track.last_step() - step) + 1);
  for (std::int64_t s = step; s <= track.last_step(); ++s) {
    pts.push_back(track.at(s).position());
  }
  return Polyline(std::move(pts));
}

}  // namespace trajmine
