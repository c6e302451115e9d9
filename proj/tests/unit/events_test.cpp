#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support/mtl_oracle.hpp"
#include "trajmine/events.hpp"

using namespace trajmine;

namespace {

std::vector<SceneRow> straight_rows(const std::string& track, Vec2 start,
                                    double heading_rad, double speed,
                                    int steps, double dt,
                                    std::int64_t first_step = 0) {
  std::vector<SceneRow> rows;
  Vec2 dir{std::cos(heading_rad), std::sin(heading_rad)};
  for (int i = 0; i < steps; ++i) {
    SceneRow r;
    r.scene_id = "s";
    r.track_id = track;
    r.step = first_step + i;
    double t = dt * i;
    r.x = start.x + dir.x * speed * t;
    r.y = start.y + dir.y * speed * t;
    rows.push_back(r);
  }
  return rows;
}

void append(std::vector<SceneRow>& all, const std::vector<SceneRow>& more) {
  all.insert(all.end(), more.begin(), more.end());
}

// a reaches the crossing point at 2.05 s, b at 2.5 s. The half-meter start
// offset keeps every buffer-margin comparison well away from exact ties.
Scene canonical_crossing() {
  std::vector<SceneRow> rows;
  append(rows, straight_rows("a", {-20.5, 0.0}, 0.0, 10.0, 46, 0.1));
  append(rows, straight_rows("b", {0.0, -25.0}, std::numbers::pi / 2, 10.0,
                             46, 0.1));
  return ingest_scene(rows, 0.1);
}

BoolTrace trace(std::vector<int> values, std::int64_t offset) {
  BoolTrace t;
  t.name = "ic";
  t.offset = offset;
  for (int v : values) t.values.push_back(v != 0);
  return t;
}

ConflictPair origin_pair(double n) {
  ConflictPair p;
  p.id_a = "a";
  p.id_b = "b";
  p.point = {0.0, 0.0};
  p.buffer_n = n;
  return p;
}

Vec2 at_angle(double deg) {
  double rad = deg * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

}  // namespace

TEST_CASE("segments bridge short gaps and stay in absolute steps") {
  // F T T F F T F F F F T with gap 3: the two-step gap is bridged, the
  // four-step gap is not.
  auto t = trace({0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1}, 0);
  auto segs = cut_segments(t, 3);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0] == std::pair<std::int64_t, std::int64_t>{1, 5});
  CHECK(segs[1] == std::pair<std::int64_t, std::int64_t>{10, 10});

  auto shifted = trace({0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1}, 7);
  auto abs_segs = cut_segments(shifted, 3);
  REQUIRE(abs_segs.size() == 2);
  CHECK(abs_segs[0] == std::pair<std::int64_t, std::int64_t>{8, 12});
  CHECK(abs_segs[1] == std::pair<std::int64_t, std::int64_t>{17, 17});
}

TEST_CASE("segment cutting edge cases") {
  CHECK(cut_segments(trace({0, 0, 0, 0}, 0), 3).empty());
  CHECK(cut_segments(trace({}, 0), 3).empty());

  auto all_true = cut_segments(trace({1, 1, 1, 1}, 5), 3);
  REQUIRE(all_true.size() == 1);
  CHECK(all_true[0] == std::pair<std::int64_t, std::int64_t>{5, 8});

  // A gap of exactly gap_steps is bridged; one longer is not.
  auto exact = cut_segments(trace({1, 0, 0, 0, 1}, 0), 3);
  REQUIRE(exact.size() == 1);
  CHECK(exact[0] == std::pair<std::int64_t, std::int64_t>{0, 4});
  auto over = cut_segments(trace({1, 0, 0, 0, 0, 1}, 0), 3);
  REQUIRE(over.size() == 2);

  // gap 0 keeps only contiguous runs.
  auto strict = cut_segments(trace({1, 1, 0, 1}, 0), 0);
  REQUIRE(strict.size() == 2);
  CHECK(strict[0] == std::pair<std::int64_t, std::int64_t>{0, 1});
  CHECK(strict[1] == std::pair<std::int64_t, std::int64_t>{3, 3});
}

TEST_CASE("the segment formula spells out boundaries, gaps and maximality") {
  CHECK(segment_formula(4, 3).str() ==
        "ic & F[4,4](ic) & G[0,4](ic | F[1,3](ic)) & !F[-4,-1](ic) & "
        "!F[5,8](ic)");
  CHECK(segment_formula(0, 0).str() ==
        "ic & F[0,0](ic) & G[0,0](ic) & !F[-1,-1](ic) & !F[1,1](ic)");
}

TEST_CASE("cut segments satisfy the formula exactly at their starts") {
  auto ic = trace({0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1}, 0);
  std::int64_t gap = 3;
  auto segs = cut_segments(ic, gap);

  // Pad with enough falses that every window is defined.
  BoolTrace padded;
  padded.name = "ic";
  padded.offset = ic.offset - (gap + 1);
  padded.values.assign(static_cast<std::size_t>(gap) + 1, false);
  padded.values.insert(padded.values.end(), ic.values.begin(),
                       ic.values.end());
  padded.values.insert(padded.values.end(), static_cast<std::size_t>(gap) + 1,
                       false);

  for (auto [a0, a1] : segs) {
    MtlFormula f = segment_formula(a1 - a0, gap);
    CHECK(eval_at(f, {padded}, a0) == MtlValue::True);
    CHECK(*testing::oracle_eval(f.root(), {padded}, a0) == true);
    // One step off on either side must fail the condition.
    CHECK(eval_at(f, {padded}, a0 - 1) != MtlValue::True);
    CHECK(eval_at(f, {padded}, a0 + 1) != MtlValue::True);
  }
  // A segment one step short of the true run is not maximal.
  MtlFormula shorter = segment_formula(3, gap);
  CHECK(eval_at(shorter, {padded}, 1) == MtlValue::False);
}

TEST_CASE("post-encroachment time from staggered zone passages") {
  // Zone radius n + length/2 = 1 + 2.25 = 3.25 m around the origin; speeds
  // place a in the zone over [2.0, 4.2] s and b over [5.0, 7.2] s.
  double v = 6.5 / 2.2;
  std::vector<SceneRow> rows;
  append(rows,
         straight_rows("a", {-(3.25 + 2.0 * v), 0.0}, 0.0, v, 80, 0.1));
  append(rows, straight_rows("b", {0.0, -(3.25 + 5.0 * v)},
                             std::numbers::pi / 2, v, 80, 0.1));
  Scene scene = ingest_scene(rows, 0.1);

  auto pet = compute_pet(*scene.find("a"), *scene.find("b"), origin_pair(1.0),
                         1.0, scene.dt);
  REQUIRE(pet.has_value());
  CHECK(!pet->overlap);
  CHECK(pet->pet == doctest::Approx(0.8).epsilon(0.01));

  // Same answer with the roles swapped.
  auto swapped = compute_pet(*scene.find("b"), *scene.find("a"),
                             origin_pair(1.0), 1.0, scene.dt);
  REQUIRE(swapped.has_value());
  CHECK(swapped->pet == doctest::Approx(pet->pet));
}

TEST_CASE("joint zone occupancy forces a zero PET") {
  double v = 6.5 / 2.2;
  std::vector<SceneRow> rows;
  append(rows,
         straight_rows("a", {-(3.25 + 2.0 * v), 0.0}, 0.0, v, 80, 0.1));
  // b enters at 3.0 s, inside a's [2.0, 4.2] window.
  append(rows, straight_rows("b", {0.0, -(3.25 + 3.0 * v)},
                             std::numbers::pi / 2, v, 80, 0.1));
  Scene scene = ingest_scene(rows, 0.1);
  auto pet = compute_pet(*scene.find("a"), *scene.find("b"), origin_pair(1.0),
                         1.0, scene.dt);
  REQUIRE(pet.has_value());
  CHECK(pet->overlap);
  CHECK(pet->pet == 0.0);
}

TEST_CASE("PET is absent when a track never reaches the zone") {
  std::vector<SceneRow> rows;
  append(rows, straight_rows("a", {-10.0, 0.0}, 0.0, 5.0, 60, 0.1));
  // b runs parallel, 20 m from the conflict point.
  append(rows, straight_rows("b", {-10.0, 20.0}, 0.0, 5.0, 60, 0.1));
  Scene scene = ingest_scene(rows, 0.1);
  CHECK(!compute_pet(*scene.find("a"), *scene.find("b"), origin_pair(1.0), 1.0,
                     scene.dt)
             .has_value());
}

TEST_CASE("conflict classification by tangent angle") {
  CHECK(classify_conflict(at_angle(0.0), at_angle(90.0)) ==
        ConflictType::crossing);
  CHECK(classify_conflict(at_angle(0.0), at_angle(20.0)) ==
        ConflictType::merging);
  CHECK(classify_conflict(at_angle(0.0), at_angle(170.0)) ==
        ConflictType::head_on);
  CHECK(classify_conflict(at_angle(30.0), at_angle(74.9)) ==
        ConflictType::merging);
  CHECK(classify_conflict(at_angle(30.0), at_angle(75.1)) ==
        ConflictType::crossing);
  CHECK(classify_conflict(at_angle(0.0), at_angle(134.9)) ==
        ConflictType::crossing);
  CHECK(classify_conflict(at_angle(0.0), at_angle(135.1)) ==
        ConflictType::head_on);
  // Degenerate tangents default to crossing.
  CHECK(classify_conflict({0.0, 0.0}, at_angle(10.0)) ==
        ConflictType::crossing);
  CHECK(to_string(ConflictType::merging) == std::string("merging"));
  CHECK(conflict_type_from_string("head_on") == ConflictType::head_on);
  CHECK(!conflict_type_from_string("sideswipe").has_value());
}

TEST_CASE("the crossing scene yields one fully populated event") {
  Scene scene = canonical_crossing();
  ExtractParams params;
  SceneAnalysis analysis = analyze_scene(scene, params);

  REQUIRE(analysis.threads.size() == 1);
  const ThreadTrace& th = analysis.threads[0];
  CHECK(th.agent_ids == std::vector<std::string>{"a", "b"});
  CHECK(th.intcheck.size() ==
        static_cast<std::size_t>(th.last_step - th.first_step + 1));
  CHECK(th.intensity.size() == th.intcheck.size());

  REQUIRE(analysis.events.size() == 1);
  const Event& ev = analysis.events[0];
  CHECK(ev.scene_id == "s");
  CHECK(ev.agent_ids == std::vector<std::string>{"a", "b"});
  CHECK(ev.start_step == 0);
  // The run ends once a's start point is no longer strictly outside the
  // n = 1 buffer around b's corridor: margin 20.5 - k drops below 1 at 20.
  CHECK(ev.end_step == 19);
  CHECK(ev.duration_s == doctest::Approx(2.0));
  // Through step 18 the cheapest resolution is b braking to a stop, cost
  // 50 / (25 - k). At step 19 b would need 50 / 6 > 8 and no ordering fits
  // either, so the closing step saturates at the infeasibility cap.
  CHECK(ev.intensity_max == doctest::Approx(10.0));
  CHECK(ev.intensity_mean > 0.0);
  CHECK(ev.intensity_mean <= ev.intensity_max);
  REQUIRE(ev.min_pet.has_value());
  CHECK(*ev.min_pet == 0.0);
  CHECK(ev.pet_overlap);
  CHECK(!ev.has_av);
  CHECK(ev.agent_types ==
        std::vector<AgentType>{AgentType::vehicle, AgentType::vehicle});
  CHECK(ev.conflict_types == std::vector<ConflictType>{ConflictType::crossing});

  REQUIRE(analysis.event_pairs.size() == 1);
  REQUIRE(analysis.event_pairs[0].size() == 1);
  const EventPairAnnotation& ann = analysis.event_pairs[0][0];
  CHECK(ann.pair.id_a == "a");
  CHECK(ann.pair.id_b == "b");
  CHECK(ann.type == ConflictType::crossing);

  auto direct = extract_events(scene, params);
  REQUIRE(direct.size() == 1);
  CHECK(direct[0].start_step == ev.start_step);
  CHECK(direct[0].end_step == ev.end_step);
  CHECK(direct[0].intensity_mean == ev.intensity_mean);
}

TEST_CASE("disjoint conflicts become separate sorted events") {
  std::vector<SceneRow> rows;
  append(rows, straight_rows("a", {-20.5, 0.0}, 0.0, 10.0, 46, 0.1));
  append(rows, straight_rows("b", {0.0, -25.0}, std::numbers::pi / 2, 10.0,
                             46, 0.1));
  append(rows, straight_rows("c", {979.5, 1000.0}, 0.0, 10.0, 46, 0.1));
  append(rows, straight_rows("d", {1000.0, 975.0}, std::numbers::pi / 2, 10.0,
                             46, 0.1));
  Scene scene = ingest_scene(rows, 0.1);
  ExtractParams params;
  auto events = extract_events(scene, params);
  REQUIRE(events.size() == 2);
  CHECK(events[0].agent_ids == std::vector<std::string>{"a", "b"});
  CHECK(events[1].agent_ids == std::vector<std::string>{"c", "d"});
  for (const Event& ev : events) {
    CHECK(ev.duration_s ==
          doctest::Approx((ev.end_step - ev.start_step + 1) * scene.dt));
    CHECK(std::is_sorted(ev.agent_ids.begin(), ev.agent_ids.end()));
    CHECK(ev.intensity_max >= ev.intensity_mean);
  }
}

TEST_CASE("calm scenes produce no events") {
  std::vector<SceneRow> rows;
  append(rows, straight_rows("a", {-10.0, 0.0}, 0.0, 10.0, 50, 0.1));
  append(rows, straight_rows("b", {-20.0, 0.0}, 0.0, 10.0, 50, 0.1));
  Scene scene = ingest_scene(rows, 0.1);
  ExtractParams params;
  SceneAnalysis analysis = analyze_scene(scene, params);
  CHECK(analysis.threads.empty());
  CHECK(analysis.events.empty());

  // A high threshold silences even the crossing scene.
  ExtractParams strict;
  strict.msaa_threshold = 999.0;
  CHECK(extract_events(canonical_crossing(), strict).empty());
}

TEST_CASE("raising gap_steps can only merge events, never split them") {
  Scene scene = canonical_crossing();
  ExtractParams params;
  auto base = extract_events(scene, params);
  ExtractParams wide = params;
  wide.gap_steps = 10;
  auto merged = extract_events(scene, wide);
  CHECK(merged.size() <= base.size());
}
