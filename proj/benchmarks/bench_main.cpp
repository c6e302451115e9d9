// Micro-benchmarks for the hot paths of the extraction pipeline: polyline
// intersection, the per-step conflict scan, the min-effort solver, formula
// evaluation, and a whole-scene extraction.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <utility>
#include <vector>

#include "trajmine/conflict.hpp"
#include "trajmine/events.hpp"
#include "trajmine/geometry.hpp"
#include "trajmine/msaa.hpp"
#include "trajmine/mtl.hpp"
#include "trajmine/synth.hpp"

namespace {

using namespace trajmine;

Polyline straight(Vec2 from, Vec2 dir, double step, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back(from + dir * (step * i));
  return Polyline(std::move(pts));
}

Scene crossing_scene() {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::crossing;
  spec.speeds = {10.0, 10.0};
  spec.arrival_offsets = {2.0, 2.5};
  spec.approach_angles = {0.0, 90.0};
  spec.duration = 6.0;
  return generate(spec);
}

Scene chain_scene() {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::chain;
  spec.speeds = {10.0, 10.0, 10.0, 10.0, 10.0, 10.0};
  spec.arrival_offsets = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  spec.approach_angles = {0.0, 30.0, 60.0, 90.0, 120.0, 150.0};
  spec.duration = 6.0;
  return generate(spec);
}

void BM_FirstIntersection(benchmark::State& state) {
  auto n = static_cast<int>(state.range(0));
  Polyline a = straight({-30.0, 0.0}, {1.0, 0.0}, 60.0 / n, n);
  Polyline b = straight({0.0, -30.0}, {0.0, 1.0}, 60.0 / n, n);
  for (auto _ : state) {
    auto hit = first_intersection(a, b);
    benchmark::DoNotOptimize(hit);
  }
}
BENCHMARK(BM_FirstIntersection)->Arg(16)->Arg(64)->Arg(256);

void BM_EntersBuffer(benchmark::State& state) {
  Polyline moving = straight({-30.0, 5.0}, {1.0, 0.0}, 1.0, 60);
  Polyline corridor = straight({0.0, -30.0}, {0.0, 1.0}, 1.0, 60);
  for (auto _ : state) {
    bool in = enters_buffer(moving, corridor, 1.0);
    benchmark::DoNotOptimize(in);
  }
}
BENCHMARK(BM_EntersBuffer);

void BM_StepScan(benchmark::State& state) {
  Scene scene = chain_scene();
  ConflictParams params;
  for (auto _ : state) {
    auto paths = future_paths_at(scene, 5, params);
    auto comps = build_components(paths, params);
    benchmark::DoNotOptimize(comps);
  }
}
BENCHMARK(BM_StepScan);

void BM_SolvePair(benchmark::State& state) {
  MsaaParams params;
  AgentConflictState sa{"a", 10.0, {{0, 20.0}}};
  AgentConflictState sb{"b", 10.0, {{0, 22.0}}};
  ConflictPair pair;
  pair.id_a = "a";
  pair.id_b = "b";
  pair.time_a = 2.0;
  pair.time_b = 2.2;
  for (auto _ : state) {
    auto sol = solve_pair(sa, sb, pair, params);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolvePair);

void BM_SolveChain(benchmark::State& state) {
  auto agents = static_cast<std::size_t>(state.range(0));
  MsaaParams params;
  std::vector<AgentConflictState> states(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    states[i].track_id = synth_track_id(i);
    states[i].speed = 10.0;
  }
  std::vector<ConflictPair> pairs;
  for (std::size_t i = 0; i + 1 < agents; ++i) {
    ConflictPair p;
    p.id_a = synth_track_id(i);
    p.id_b = synth_track_id(i + 1);
    p.time_a = 2.0 + 0.2 * i;
    p.time_b = 2.2 + 0.2 * i;
    states[i].distances[pairs.size()] = 10.0 * p.time_a;
    states[i + 1].distances[pairs.size()] = 10.0 * p.time_b;
    pairs.push_back(p);
  }
  for (auto _ : state) {
    auto sol = solve_chain(states, pairs, params);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveChain)->Arg(2)->Arg(3)->Arg(4)->Arg(6);

void BM_MtlEvalAll(benchmark::State& state) {
  MtlFormula f = segment_formula(40, 3);
  BoolTrace trace;
  trace.name = "ic";
  trace.offset = 0;
  for (int i = 0; i < 500; ++i) trace.values.push_back(i % 47 < 40);
  std::vector<BoolTrace> traces{trace};
  for (auto _ : state) {
    auto out = eval_all(f, traces);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_MtlEvalAll);

void BM_ExtractScene(benchmark::State& state) {
  Scene scene = crossing_scene();
  ExtractParams params;
  for (auto _ : state) {
    auto events = extract_events(scene, params);
    benchmark::DoNotOptimize(events);
  }
}
BENCHMARK(BM_ExtractScene);

}  // namespace

BENCHMARK_MAIN();
