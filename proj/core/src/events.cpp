#include "trajmine/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "trajmine/errors.hpp"

namespace trajmine {

const char* to_string(ConflictType t) {
  switch (t) {
    case ConflictType::crossing: return "crossing";
    case ConflictType::merging: return "merging";
    default: return "head_on";
  }
}

std::optional<ConflictType> conflict_type_from_string(const std::string& s) {
  if (s == "crossing") return ConflictType::crossing;
  if (s == "merging") return ConflictType::merging;
  if (s == "head_on") return ConflictType::head_on;
  return std::nullopt;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct StepRange {
  std::int64_t first = 0;
  std::int64_t last = -1;
  bool empty() const { return last < first; }
};

StepRange scene_step_range(const Scene& scene) {
  StepRange r;
  bool any = false;
  for (const AgentTrack& t : scene.tracks) {
    if (t.states.empty()) continue;
    if (!any) {
      r.first = t.first_step();
      r.last = t.last_step();
      any = true;
    } else {
      r.first = std::min(r.first, t.first_step());
      r.last = std::max(r.last, t.last_step());
    }
  }
  return r;
}

/// Time interval (seconds) during which the track is within `radius` of
/// `center`, as the hull of its recorded in-zone samples with the boundary
/// crossings linearly interpolated on distance.
std::optional<std::pair<double, double>> zone_occupancy(const AgentTrack& track,
                                                        Vec2 center,
                                                        double radius,
                                                        double dt) {
  const auto& st = track.states;
  std::size_t n = st.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = norm(st[i].position() - center);
  }
  std::size_t first = n;
  std::size_t last = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] <= radius) {
      if (first == n) first = i;
      last = i;
    }
  }
  if (first == n) return std::nullopt;

  auto time_of = [&](std::size_t i) {
    return static_cast<double>(st[i].step) * dt;
  };
  double entry = time_of(first);
  if (first > 0 && dist[first - 1] > radius) {
    // dist[first-1] > radius >= dist[first], so the span is positive.
    double span = dist[first - 1] - dist[first];
    double frac = (dist[first - 1] - radius) / span;
    entry = time_of(first - 1) + frac * dt;
  }
  double exit = time_of(last);
  if (last + 1 < n && dist[last + 1] > radius) {
    double span = dist[last + 1] - dist[last];
    double frac = (radius - dist[last]) / span;
    exit = time_of(last) + frac * dt;
  }
  return std::make_pair(entry, exit);
}

double track_length_extent(const AgentTrack& track) {
  return track.states.empty() ? kDefaultLength : track.states.front().length;
}

/// Tangent of the future path where it reaches the pair's conflict point.
Vec2 tangent_at_conflict(const FuturePath& fp, const ConflictPair& pair) {
  double arc = pair.time_of(fp.track_id) * fp.assumed_speed;
  return direction_at_arc(fp.path, arc);
}

}  // namespace

std::vector<StepRecord> scan_scene(const Scene& scene,
                                   const ExtractParams& params) {
  std::vector<StepRecord> out;
  StepRange range = scene_step_range(scene);
  if (range.empty()) return out;
  for (std::int64_t step = range.first; step <= range.last; ++step) {
    std::vector<FuturePath> paths =
        future_paths_at(scene, step, params.conflict);
    std::vector<ChainComponent> comps =
        build_components(paths, params.conflict);
    if (comps.empty()) continue;
    StepRecord rec;
    rec.step = step;
    auto path_of = [&](const std::string& id) -> const FuturePath& {
      for (const FuturePath& fp : paths) {
        if (fp.track_id == id) return fp;
      }
      throw ContractViolation("component references unknown path");
    };
    for (ChainComponent& comp : comps) {
      StepComponent sc;
      std::vector<AgentConflictState> states =
          states_from_component(comp, paths);
      Intensity in = intensity_at(comp, states, params.msaa);
      sc.msaa = in.msaa;
      sc.key_agents = std::move(in.key_agents);
      sc.tangents.reserve(comp.pairs.size());
      for (const ConflictPair& pr : comp.pairs) {
        sc.tangents.emplace_back(tangent_at_conflict(path_of(pr.id_a), pr),
                                 tangent_at_conflict(path_of(pr.id_b), pr));
      }
      sc.component = std::move(comp);
      rec.components.push_back(std::move(sc));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> cut_segments(
    const BoolTrace& int_check, std::int64_t gap_steps) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  const auto& v = int_check.values;
  std::size_t n = v.size();
  std::size_t i = 0;
  while (i < n) {
    if (!v[i]) {
      ++i;
      continue;
    }
    std::size_t start = i;
    std::size_t end = i;
    std::size_t k = i + 1;
    while (k < n) {
      if (v[k]) {
        // Bridge the preceding false-run iff it is at most gap_steps long;
        // the distance between consecutive trues is that run plus one.
        if (static_cast<std::int64_t>(k - end) <= gap_steps + 1) {
          end = k;
          ++k;
          continue;
        }
        break;
      }
      ++k;
    }
    out.emplace_back(int_check.offset + static_cast<std::int64_t>(start),
                     int_check.offset + static_cast<std::int64_t>(end));
    i = end + 1;
  }
  return out;
}

std::optional<PetOutcome> compute_pet(const AgentTrack& track_a,
                                      const AgentTrack& track_b,
                                      const ConflictPair& pair, double n,
                                      double dt) {
  double ra = n + track_length_extent(track_a) / 2.0;
  double rb = n + track_length_extent(track_b) / 2.0;
  auto occ_a = zone_occupancy(track_a, pair.point, ra, dt);
  auto occ_b = zone_occupancy(track_b, pair.point, rb, dt);
  if (!occ_a || !occ_b) return std::nullopt;
  PetOutcome out;
  if (occ_a->first <= occ_b->second && occ_b->first <= occ_a->second) {
    out.pet = 0.0;
    out.overlap = true;
    return out;
  }
  if (occ_a->second < occ_b->first) {
    out.pet = occ_b->first - occ_a->second;
  } else {
    out.pet = occ_a->first - occ_b->second;
  }
  return out;
}

ConflictType classify_conflict(Vec2 tangent_a, Vec2 tangent_b) {
  double na = norm(tangent_a);
  double nb = norm(tangent_b);
  if (na <= 0.0 || nb <= 0.0) return ConflictType::crossing;
  double c = dot(tangent_a, tangent_b) / (na * nb);
  c = std::clamp(c, -1.0, 1.0);
  double deg = std::acos(c) * 180.0 / kPi;
  if (deg < 45.0) return ConflictType::merging;
  if (deg <= 135.0) return ConflictType::crossing;
  return ConflictType::head_on;
}

ConflictType classify_conflict(const ConflictPair& pair, const FuturePath& fa,
                               const FuturePath& fb) {
  const FuturePath& pa = fa.track_id == pair.id_a ? fa : fb;
  const FuturePath& pb = fa.track_id == pair.id_a ? fb : fa;
  return classify_conflict(tangent_at_conflict(pa, pair),
                           tangent_at_conflict(pb, pair));
}

MtlFormula segment_formula(std::int64_t run_length, std::int64_t gap_steps) {
  std::int64_t L = run_length;
  std::int64_t g = gap_steps;
  std::ostringstream f;
  // Boundaries true, interior never more than g consecutive falses, and no
  // true within g+1 steps on either side (the cut is maximal).
  f << "ic & F[" << L << "," << L << "](ic) & G[0," << L << "](";
  if (g > 0) {
    f << "ic | F[1," << g << "](ic)";
  } else {
    f << "ic";
  }
  f << ") & !F[-" << (g + 1) << ",-1](ic) & !F[" << (L + 1) << ","
    << (L + g + 1) << "](ic)";
  return MtlFormula::parse(f.str());
}

namespace {

/// Checks one cut segment against the acceptance formula on a copy of the
/// trace padded with enough falses that every window the formula touches is
/// in range.
void verify_segment(const BoolTrace& ic, std::int64_t start_step,
                    std::int64_t run_length, std::int64_t gap_steps) {
  std::size_t pad = static_cast<std::size_t>(gap_steps) + 1;
  BoolTrace padded;
  padded.name = ic.name;
  padded.offset = ic.offset - static_cast<std::int64_t>(pad);
  padded.values.assign(pad, false);
  padded.values.insert(padded.values.end(), ic.values.begin(),
                       ic.values.end());
  padded.values.insert(padded.values.end(), pad, false);
  MtlFormula formula = segment_formula(run_length, gap_steps);
  if (eval_at(formula, {padded}, start_step) != MtlValue::True) {
    throw ContractViolation("extracted segment fails its acceptance formula");
  }
}

/// Representative observation of one agent pair across an event window.
struct PairObs {
  ConflictPair pair;
  Vec2 tangent_a;
  Vec2 tangent_b;
  double msaa = 0.0;  // intensity of the carrying component
  std::int64_t step = 0;
};

SceneAnalysis assemble_analysis(const Scene& scene,
                                std::vector<StepRecord> records,
                                const ExtractParams& params) {
  SceneAnalysis out;
  out.steps = std::move(records);

  // Thread identity: union-find over (step record, component) nodes, linking
  // components at consecutive records one step apart that share an agent.
  std::vector<std::pair<std::size_t, std::size_t>> nodes;  // (record, comp)
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> node_of;
  for (std::size_t ri = 0; ri < out.steps.size(); ++ri) {
    for (std::size_t ci = 0; ci < out.steps[ri].components.size(); ++ci) {
      node_of[{ri, ci}] = nodes.size();
      nodes.emplace_back(ri, ci);
    }
  }
  std::vector<std::size_t> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  };
  for (std::size_t ri = 1; ri < out.steps.size(); ++ri) {
    if (out.steps[ri].step != out.steps[ri - 1].step + 1) continue;
    const auto& prev = out.steps[ri - 1].components;
    const auto& cur = out.steps[ri].components;
    for (std::size_t pi = 0; pi < prev.size(); ++pi) {
      const auto& pa = prev[pi].component.agent_ids;
      for (std::size_t ci = 0; ci < cur.size(); ++ci) {
        const auto& ca = cur[ci].component.agent_ids;
        bool shares = std::find_first_of(pa.begin(), pa.end(), ca.begin(),
                                         ca.end()) != pa.end();
        if (shares) unite(node_of[{ri - 1, pi}], node_of[{ri, ci}]);
      }
    }
  }

  struct RawThread {
    std::vector<std::pair<std::size_t, std::size_t>> members;  // (record, comp)
  };
  std::map<std::size_t, RawThread> by_root;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    by_root[find(i)].members.push_back(nodes[i]);
  }

  struct BuiltThread {
    ThreadTrace trace;
    // members[i] lists this thread's components at record first_record + i.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> members;
    std::size_t first_record = 0;
  };
  std::vector<BuiltThread> built;
  for (auto& [root, raw] : by_root) {
    std::sort(raw.members.begin(), raw.members.end());
    std::size_t r0 = raw.members.front().first;
    std::size_t r1 = raw.members.back().first;
    BuiltThread bt;
    bt.first_record = r0;
    bt.members.resize(r1 - r0 + 1);
    std::set<std::string> agents;
    for (auto [ri, ci] : raw.members) {
      bt.members[ri - r0].emplace_back(ri, ci);
      const auto& ids = out.steps[ri].components[ci].component.agent_ids;
      agents.insert(ids.begin(), ids.end());
    }
    for (const auto& slot : bt.members) {
      if (slot.empty()) {
        throw ContractViolation(
            "interaction thread has a step with no component");
      }
    }
    bt.trace.agent_ids.assign(agents.begin(), agents.end());
    bt.trace.first_step = out.steps[r0].step;
    bt.trace.last_step = out.steps[r1].step;
    for (const auto& slot : bt.members) {
      double strongest = 0.0;
      const StepComponent* carrier = nullptr;
      for (auto [ri, ci] : slot) {
        const StepComponent& sc = out.steps[ri].components[ci];
        if (!carrier || sc.msaa > strongest) {
          strongest = sc.msaa;
          carrier = &sc;
        }
      }
      bt.trace.intcheck.push_back(strongest > params.msaa_threshold);
      bt.trace.intensity.push_back(strongest);
      bt.trace.key_agents.push_back(carrier->key_agents);
    }
    built.push_back(std::move(bt));
  }
  std::sort(built.begin(), built.end(),
            [](const BuiltThread& a, const BuiltThread& b) {
              if (a.trace.first_step != b.trace.first_step) {
                return a.trace.first_step < b.trace.first_step;
              }
              return a.trace.agent_ids < b.trace.agent_ids;
            });

  struct Pending {
    Event event;
    std::size_t thread = 0;
    std::vector<EventPairAnnotation> pairs;
  };
  std::vector<Pending> pending;

  for (std::size_t ti = 0; ti < built.size(); ++ti) {
    const BuiltThread& bt = built[ti];
    out.threads.push_back(bt.trace);

    BoolTrace ic;
    ic.name = "ic";
    ic.offset = bt.trace.first_step;
    ic.values = bt.trace.intcheck;
    auto segments = cut_segments(ic, params.gap_steps);
    for (auto [a0, a1] : segments) {
      verify_segment(ic, a0, a1 - a0, params.gap_steps);

      Event ev;
      ev.scene_id = scene.scene_id;
      ev.dataset_tag = scene.dataset_tag;
      ev.start_step = a0;
      ev.end_step = a1;
      ev.duration_s = static_cast<double>(a1 - a0 + 1) * scene.dt;

      std::set<std::string> agents;
      std::map<std::pair<std::string, std::string>, PairObs> reps;
      double sum = 0.0;
      std::size_t s0 = static_cast<std::size_t>(a0 - bt.trace.first_step);
      std::size_t s1 = static_cast<std::size_t>(a1 - bt.trace.first_step);
      for (std::size_t s = s0; s <= s1; ++s) {
        double strongest = 0.0;
        for (auto [ri, ci] : bt.members[s]) {
          const StepComponent& sc = out.steps[ri].components[ci];
          strongest = std::max(strongest, sc.msaa);
          agents.insert(sc.component.agent_ids.begin(),
                        sc.component.agent_ids.end());
          for (std::size_t pi = 0; pi < sc.component.pairs.size(); ++pi) {
            const ConflictPair& pr = sc.component.pairs[pi];
            PairObs obs;
            obs.pair = pr;
            obs.tangent_a = sc.tangents[pi].first;
            obs.tangent_b = sc.tangents[pi].second;
            obs.msaa = sc.msaa;
            obs.step = out.steps[ri].step;
            auto key = std::make_pair(pr.id_a, pr.id_b);
            auto it = reps.find(key);
            // Representative observation: strongest component, earliest step.
            if (it == reps.end() || obs.msaa > it->second.msaa ||
                (obs.msaa == it->second.msaa && obs.step < it->second.step)) {
              reps[key] = obs;
            }
          }
        }
        ev.intensity_max = std::max(ev.intensity_max, strongest);
        sum += strongest;
      }
      ev.intensity_mean = sum / static_cast<double>(s1 - s0 + 1);
      ev.agent_ids.assign(agents.begin(), agents.end());

      std::vector<EventPairAnnotation> annos;
      std::set<ConflictType> labels;
      for (const auto& [key, obs] : reps) {
        EventPairAnnotation anno;
        anno.pair = obs.pair;
        anno.step = obs.step;
        anno.type = classify_conflict(obs.tangent_a, obs.tangent_b);
        labels.insert(anno.type);
        annos.push_back(anno);

        const AgentTrack* ta = scene.find(obs.pair.id_a);
        const AgentTrack* tb = scene.find(obs.pair.id_b);
        if (!ta || !tb) {
          throw ContractViolation("event references unknown track");
        }
        auto pet =
            compute_pet(*ta, *tb, obs.pair, obs.pair.buffer_n, scene.dt);
        if (!pet) continue;
        if (pet->overlap) ev.pet_overlap = true;
        if (!ev.min_pet || pet->pet < *ev.min_pet) ev.min_pet = pet->pet;
      }
      ev.conflict_types.assign(labels.begin(), labels.end());

      for (const std::string& id : ev.agent_ids) {
        const AgentTrack* t = scene.find(id);
        if (!t) throw ContractViolation("event references unknown track");
        ev.agent_types.push_back(t->agent_type);
        if (t->is_ego) ev.has_av = true;
      }

      Pending p;
      p.event = std::move(ev);
      p.thread = ti;
      p.pairs = std::move(annos);
      pending.push_back(std::move(p));
    }
  }

  std::sort(pending.begin(), pending.end(),
            [](const Pending& a, const Pending& b) {
              if (a.event.start_step != b.event.start_step) {
                return a.event.start_step < b.event.start_step;
              }
              if (a.event.end_step != b.event.end_step) {
                return a.event.end_step < b.event.end_step;
              }
              return a.event.agent_ids < b.event.agent_ids;
            });
  for (Pending& p : pending) {
    out.events.push_back(std::move(p.event));
    out.event_thread.push_back(p.thread);
    out.event_pairs.push_back(std::move(p.pairs));
  }
  return out;
}

}  // namespace

std::vector<Event> assemble_events(const Scene& scene,
                                   const std::vector<StepRecord>& records,
                                   const ExtractParams& params) {
  return assemble_analysis(scene, records, params).events;
}

SceneAnalysis analyze_scene(const Scene& scene, const ExtractParams& params) {
  return assemble_analysis(scene, scan_scene(scene, params), params);
}

std::vector<Event> extract_events(const Scene& scene,
                                  const ExtractParams& params) {
  return analyze_scene(scene, params).events;
}

}  // namespace trajmine
