// Acceptance gate: each criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/corpus.hpp"
#include "support/grid_oracle.hpp"
#include "support/mtl_oracle.hpp"
#include "trajmine/catalog_io.hpp"
#include "trajmine/commands.hpp"
#include "trajmine/events.hpp"
#include "trajmine/stats.hpp"
#include "trajmine/synth.hpp"

using namespace trajmine;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& what, bool ok,
            const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number,
              what.c_str(), detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("trajmine_accept_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// --- criterion 1: detection equals the analytic oracle on random crossings --

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  ConflictParams params;
  int bad = 0;
  std::string first_bad;
  int with_conflict = 0;

  for (std::uint64_t i = 0; i < 500; ++i) {
    ScenarioSpec spec = testing::random_crossing_spec(rng, i);
    Scene scene = generate(spec);
    auto expected_list = expected_conflicts(spec, params);
    std::set<std::pair<std::string, std::string>> expected(
        expected_list.begin(), expected_list.end());
    if (!expected.empty()) ++with_conflict;

    // Union of detected pairs over every step of the scene.
    std::set<std::pair<std::string, std::string>> detected;
    std::int64_t last = scene.tracks[0].last_step();
    for (std::int64_t step = 0; step <= last; ++step) {
      auto paths = future_paths_at(scene, step, params);
      for (const auto& comp : build_components(paths, params)) {
        for (const auto& p : comp.pairs) detected.insert({p.id_a, p.id_b});
      }
    }
    if (detected != expected && bad++ == 0) {
      first_bad = spec.scene_id + ": expected " +
                  std::to_string(expected.size()) + " pair(s), detected " +
                  std::to_string(detected.size());
    }
  }
  double elapsed = seconds_since(t0);
  bool ok = bad == 0 && with_conflict >= 100 &&
            with_conflict <= 450 && elapsed < 30.0;
  report(1, "crossing sweep matches the analytic conflict oracle", ok,
         std::to_string(500 - bad) + "/500 scenes, " +
             std::to_string(with_conflict) + " with conflicts, " +
             fmt(elapsed) + " s" +
             (first_bad.empty() ? "" : ", first mismatch " + first_bad));
}

// --- criterion 2: solver vs exhaustive grid, plus the canonical instance ---

struct RandomPair {
  double va, vb, ta, tb;
};

void criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  MsaaParams params;
  int bad = 0;
  std::string first_bad;

  auto check_pair_instance = [&](double va, double vb, double ta, double tb,
                                 double h, const std::string& label) {
    AgentConflictState sa{"a", va, {{0, va * ta}}};
    AgentConflictState sb{"b", vb, {{0, vb * tb}}};
    ConflictPair pr;
    pr.id_a = "a";
    pr.id_b = "b";
    pr.time_a = ta;
    pr.time_b = tb;
    MsaaSolution sol = solve_pair(sa, sb, pr, params);
    auto oracle = testing::grid_min_effort(
        {{va, vb}, {{0, 1, va * ta, vb * tb}}, params.tau_safe, params.a_min,
         params.a_max},
        h);
    bool ok = sol.feasible == oracle.feasible;
    if (ok && sol.feasible) {
      ok = sol.objective <= oracle.objective + 1e-6 &&
           sol.objective >= oracle.objective - 2.0 * h - 1e-6;
    }
    if (!ok && bad++ == 0) {
      first_bad = label + " solver " + fmt(sol.objective) + " grid " +
                  fmt(oracle.objective);
    }
  };

  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> speed(4.0, 16.0);
  std::uniform_real_distribution<double> when(0.3, 4.5);
  for (int i = 0; i < 200; ++i) {
    check_pair_instance(speed(rng), speed(rng), when(rng), when(rng), 0.01,
                        "pair#" + std::to_string(i));
  }

  for (int i = 0; i < 50; ++i) {
    double va = speed(rng), vb = speed(rng), vc = speed(rng);
    double t1a = when(rng), t1b = when(rng);
    double t2b = when(rng), t2c = when(rng);
    bool triangle = i % 2 == 1;
    std::vector<AgentConflictState> states;
    std::vector<ConflictPair> pairs;
    auto mk_pair = [](const std::string& a, const std::string& b, double t1,
                      double t2) {
      ConflictPair p;
      p.id_a = a;
      p.id_b = b;
      p.time_a = t1;
      p.time_b = t2;
      return p;
    };
    testing::OracleProblem prob;
    prob.speeds = {va, vb, vc};
    if (!triangle) {
      // Chain a-b-c with two conflict points.
      states = {{"a", va, {{0, va * t1a}}},
                {"b", vb, {{0, vb * t1b}, {1, vb * t2b}}},
                {"c", vc, {{1, vc * t2c}}}};
      pairs = {mk_pair("a", "b", t1a, t1b), mk_pair("b", "c", t2b, t2c)};
      prob.pairs = {{0, 1, va * t1a, vb * t1b}, {1, 2, vb * t2b, vc * t2c}};
    } else {
      // Triangle: all three pairwise conflicts at distinct points.
      double t3a = when(rng), t3c = when(rng);
      states = {{"a", va, {{0, va * t1a}, {1, va * t3a}}},
                {"b", vb, {{0, vb * t1b}, {2, vb * t2b}}},
                {"c", vc, {{1, vc * t3c}, {2, vc * t2c}}}};
      pairs = {mk_pair("a", "b", t1a, t1b), mk_pair("a", "c", t3a, t3c),
               mk_pair("b", "c", t2b, t2c)};
      prob.pairs = {{0, 1, va * t1a, vb * t1b},
                    {0, 2, va * t3a, vc * t3c},
                    {1, 2, vb * t2b, vc * t2c}};
    }
    MsaaSolution sol = solve_chain(states, pairs, params);
    auto oracle = testing::grid_min_effort(prob, 0.05);
    bool ok = sol.feasible == oracle.feasible;
    if (ok && sol.feasible) {
      ok = sol.objective <= oracle.objective + 1e-6 &&
           sol.objective >= oracle.objective - 3.0 * 0.05 - 1e-6;
    }
    if (!ok && bad++ == 0) {
      first_bad = "chain#" + std::to_string(i) + " solver " +
                  fmt(sol.objective) + " grid " + fmt(oracle.objective);
    }
  }

  // The canonical symmetric crossing: both at 10 m/s, 20 m out.
  AgentConflictState sa{"a", 10.0, {{0, 20.0}}};
  AgentConflictState sb{"b", 10.0, {{0, 20.0}}};
  ConflictPair pr;
  pr.id_a = "a";
  pr.id_b = "b";
  pr.time_a = 2.0;
  pr.time_b = 2.0;
  MsaaSolution canon = solve_pair(sa, sb, pr, params);
  bool canon_ok =
      canon.feasible && std::fabs(canon.objective - 2.5) <= 0.01;
  if (!canon_ok && bad++ == 0) {
    first_bad = "canonical objective " + fmt(canon.objective);
  }

  double elapsed = seconds_since(t0);
  bool ok = bad == 0 && elapsed < 120.0;
  report(2, "min-effort solver tracks the exhaustive grid oracle", ok,
         std::to_string(250 - (bad > 0 ? bad : 0)) +
             "/250 instances + canonical " + fmt(canon.objective) + ", " +
             fmt(elapsed) + " s" +
             (first_bad.empty() ? "" : ", first mismatch " + first_bad));
}

// --- criterion 3: objective scales linearly when bounds stay inactive ------

void criterion_3() {
  MsaaParams params;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> speed(5.0, 14.0);
  std::uniform_real_distribution<double> when(0.5, 4.5);
  int collected = 0;
  int bad = 0;
  std::string first_bad;
  int attempts = 0;

  while (collected < 50 && attempts < 5000) {
    ++attempts;
    double va = speed(rng), vb = speed(rng);
    double ta = when(rng), tb = when(rng);
    AgentConflictState sa{"a", va, {{0, va * ta}}};
    AgentConflictState sb{"b", vb, {{0, vb * tb}}};
    ConflictPair pr;
    pr.id_a = "a";
    pr.id_b = "b";
    pr.time_a = ta;
    pr.time_b = tb;
    MsaaSolution base = solve_pair(sa, sb, pr, params);
    if (!base.feasible || base.objective < 1e-3) continue;
    double peak = 0.0;
    for (const auto& [id, a] : base.accels) peak = std::max(peak, std::fabs(a));
    if (peak > 1.9) continue;  // keep the accel bounds inactive at k = 2
    ++collected;

    for (double k : {0.5, 2.0}) {
      AgentConflictState ska{"a", k * va, {{0, k * va * ta}}};
      AgentConflictState skb{"b", k * vb, {{0, k * vb * tb}}};
      MsaaSolution scaled = solve_pair(ska, skb, pr, params);
      double want = k * base.objective;
      if (!scaled.feasible ||
          std::fabs(scaled.objective - want) > 1e-3 * std::fabs(want)) {
        if (bad++ == 0) {
          first_bad = "k=" + fmt(k) + " got " + fmt(scaled.objective) +
                      " want " + fmt(want);
        }
      }
    }
  }
  bool ok = bad == 0 && collected == 50;
  report(3, "intensity scales linearly in (speed, distance)", ok,
         std::to_string(collected) + " instances x {0.5, 2}" +
             (first_bad.empty() ? "" : ", first mismatch " + first_bad));
}

// --- criterion 4: following corpora stay silent across buffer sizes --------

void criterion_4() {
  std::mt19937_64 rng(404);
  std::vector<Scene> scenes;
  for (std::uint64_t i = 0; i < 100; ++i) {
    scenes.push_back(generate(testing::random_following_spec(rng, i)));
  }
  int events_total = 0;
  for (double floor : {0.5, 1.0, 1.5}) {
    ExtractParams params;
    params.conflict.buffer_floor = floor;
    for (const Scene& scene : scenes) {
      events_total += static_cast<int>(extract_events(scene, params).size());
    }
  }
  report(4, "same-lane following yields no events at any buffer",
         events_total == 0,
         "100 scenes x buffers {0.5, 1.0, 1.5}, " +
             std::to_string(events_total) + " events");
}

// --- criterion 5: every mined event satisfies the segment condition --------

void criterion_5() {
  auto corpus = testing::mixed_corpus();
  ExtractParams params;
  int violations = 0;
  int events_checked = 0;
  for (const auto& spec : corpus.specs) {
    Scene scene = generate(spec);
    SceneAnalysis analysis = analyze_scene(scene, params);
    for (std::size_t e = 0; e < analysis.events.size(); ++e) {
      const Event& ev = analysis.events[e];
      const ThreadTrace& th = analysis.threads[analysis.event_thread[e]];

      BoolTrace ic;
      ic.name = "ic";
      ic.offset = th.first_step - (params.gap_steps + 1);
      ic.values.assign(static_cast<std::size_t>(params.gap_steps) + 1, false);
      for (bool v : th.intcheck) ic.values.push_back(v);
      ic.values.insert(ic.values.end(),
                       static_cast<std::size_t>(params.gap_steps) + 1, false);

      MtlFormula f =
          segment_formula(ev.end_step - ev.start_step, params.gap_steps);
      auto verdict = testing::oracle_eval(f.root(), {ic}, ev.start_step);
      ++events_checked;
      if (!verdict || !*verdict) ++violations;
    }
  }
  bool ok = violations == 0 && events_checked >= 25;
  report(5, "all mined events satisfy the segment formula independently", ok,
         std::to_string(events_checked) + " events, " +
             std::to_string(violations) + " violations");
}

// --- criterion 6: evaluator vs brute-force recursion, plus duality ---------

void criterion_6() {
  std::mt19937 rng(606);
  std::vector<std::string> atoms{"p", "q", "r"};
  long compared = 0;
  int bad = 0;

  for (int i = 0; i < 1000; ++i) {
    auto f = MtlFormula::parse(testing::random_formula(rng, atoms, 4));
    std::vector<BoolTrace> traces{testing::random_trace(rng, "p"),
                                  testing::random_trace(rng, "q"),
                                  testing::random_trace(rng, "r")};
    for (std::int64_t step = -12; step <= 22; ++step) {
      auto expect = testing::oracle_eval(f.root(), traces, step);
      MtlValue got = eval_at(f, traces, step);
      MtlValue want = !expect ? MtlValue::OutOfWindow
                              : (*expect ? MtlValue::True : MtlValue::False);
      ++compared;
      if (got != want) ++bad;
    }
  }

  long duality_steps = 0;
  for (int i = 0; i < 200; ++i) {
    std::uniform_int_distribution<std::int64_t> bound(-3, 3);
    std::int64_t lo = bound(rng);
    std::int64_t hi = bound(rng);
    if (lo > hi) std::swap(lo, hi);
    std::string l = std::to_string(lo);
    std::string h = std::to_string(hi);
    auto box = MtlFormula::parse("G[" + l + "," + h + "](p)");
    auto dia = MtlFormula::parse("!F[" + l + "," + h + "](!p)");
    std::vector<BoolTrace> traces{testing::random_trace(rng, "p")};
    for (std::int64_t step = -10; step <= 18; ++step) {
      MtlValue vb = eval_at(box, traces, step);
      MtlValue vd = eval_at(dia, traces, step);
      if (vb != vd) ++bad;
      if (vb != MtlValue::OutOfWindow) ++duality_steps;
    }
  }
  bool ok = bad == 0 && duality_steps > 500;
  report(6, "formula evaluation agrees with brute-force semantics", ok,
         std::to_string(compared) + " evaluations, " +
             std::to_string(duality_steps) + " duality steps, " +
             std::to_string(bad) + " mismatches");
}

// --- criterion 7: PET within half a step of the closed form ----------------

void criterion_7() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> speed(2.0, 8.0);
  std::uniform_real_distribution<double> entry(1.0, 3.0);
  std::uniform_real_distribution<double> gap(0.3, 2.0);
  const double dt = 0.1;
  const double radius = 3.25;  // buffer 1 m + default length / 2
  int bad = 0;
  std::string first_bad;

  auto build_scene = [&](double va, double a_entry, double vb,
                         double b_entry) {
    std::vector<SceneRow> rows;
    auto push = [&](const std::string& id, double v, double enter, bool on_x,
                    int steps) {
      double start = -(radius + enter * v);
      for (int s = 0; s < steps; ++s) {
        SceneRow r;
        r.scene_id = "pet";
        r.track_id = id;
        r.step = s;
        double pos = start + v * dt * s;
        r.x = on_x ? pos : 0.0;
        r.y = on_x ? 0.0 : pos;
        rows.push_back(r);
      }
    };
    push("a", va, a_entry, true, 140);
    push("b", vb, b_entry, false, 140);
    return ingest_scene(rows, dt);
  };

  ConflictPair pr;
  pr.id_a = "a";
  pr.id_b = "b";
  pr.point = {0.0, 0.0};
  pr.buffer_n = 1.0;

  // The fixed example: a occupies [2.0, 4.2], b [5.0, 7.2] -> PET 0.8 s.
  {
    double v = 6.5 / 2.2;
    Scene scene = build_scene(v, 2.0, v, 5.0);
    auto pet = compute_pet(*scene.find("a"), *scene.find("b"), pr, 1.0, dt);
    if (!pet || pet->overlap || std::fabs(pet->pet - 0.8) > 0.5 * dt) {
      ++bad;
      first_bad = "fixed example";
    }
  }

  int overlaps = 0;
  for (int i = 0; i < 60; ++i) {
    double va = speed(rng);
    double vb = speed(rng);
    double a_entry = entry(rng);
    double a_exit = a_entry + 2.0 * radius / va;
    bool overlap_case = i % 3 == 0;
    double b_entry = overlap_case ? a_entry + (a_exit - a_entry) * 0.5
                                  : a_exit + gap(rng);
    Scene scene = build_scene(va, a_entry, vb, b_entry);
    auto pet = compute_pet(*scene.find("a"), *scene.find("b"), pr, 1.0, dt);
    if (!pet) {
      ++bad;
      if (first_bad.empty()) first_bad = "case " + std::to_string(i);
      continue;
    }
    if (overlap_case) {
      ++overlaps;
      if (!pet->overlap || pet->pet != 0.0) {
        ++bad;
        if (first_bad.empty()) {
          first_bad = "overlap case " + std::to_string(i);
        }
      }
    } else {
      double want = b_entry - a_exit;
      if (pet->overlap || std::fabs(pet->pet - want) > 0.5 * dt + 1e-9) {
        ++bad;
        if (first_bad.empty()) {
          first_bad = "case " + std::to_string(i) + " got " + fmt(pet->pet) +
                      " want " + fmt(want);
        }
      }
    }
  }
  bool ok = bad == 0 && overlaps >= 15;
  report(7, "PET lands within half a step of the closed form", ok,
         "61 cases (" + std::to_string(overlaps) + " overlap), " +
             std::to_string(bad) + " failures" +
             (first_bad.empty() ? "" : ", first " + first_bad));
}

// --- criterion 8: the catalog is byte-identical at any parallelism ---------

void criterion_8() {
  fs::path dir = fresh_dir("determinism");
  fs::path scenes = dir / "scenes";
  auto corpus = testing::mixed_corpus();
  testing::write_corpus(scenes.string(), corpus.specs);

  std::ostringstream log;
  RunConfig config;
  config.input_dir = scenes;
  config.log_level = 0;

  RunConfig serial = config;
  serial.jobs = 1;
  serial.output = dir / "serial.csv";
  RunConfig parallel = config;
  parallel.jobs = 8;
  parallel.output = dir / "parallel.csv";

  int rc1 = cmd_extract(serial, log);
  int rc2 = cmd_extract(parallel, log);
  std::string a = slurp(serial.output);
  std::string b = slurp(parallel.output);
  bool ok = rc1 == kExitOk && rc2 == kExitOk && !a.empty() && a == b;
  report(8, "extraction catalog is byte-identical at jobs 1 and 8", ok,
         std::to_string(a.size()) + " bytes vs " + std::to_string(b.size()));
  fs::remove_all(dir);
}

// --- criterion 9: stats recover the known composition of a mixed corpus ----

void criterion_9() {
  fs::path dir = fresh_dir("statistics");
  fs::path scenes = dir / "scenes";
  auto corpus = testing::mixed_corpus();
  testing::write_corpus(scenes.string(), corpus.specs);

  std::ostringstream log;
  RunConfig config;
  config.input_dir = scenes;
  config.output = dir / "catalog.csv";
  config.log_level = 0;
  int rc = cmd_extract(config, log);

  auto catalog = read_catalog_csv(config.output);
  int two = 0;
  int multi = 0;
  for (const Event& ev : catalog) {
    if (ev.agent_ids.size() == 2) {
      ++two;
    } else {
      ++multi;
    }
  }

  CatalogSummary sum = summarize(catalog);
  auto [p_two, p_multi] =
      proportions(catalog, corpus.specs.size());

  fs::path stats_dir = dir / "stats";
  int rc_stats = cmd_stats(config.output, corpus.specs.size(), stats_dir,
                           BinSpec{}, log);
  std::string table = slurp(stats_dir / "summary.txt");
  std::string header = table.substr(0, table.find('\n'));
  bool layout_ok =
      header.find("Dataset") == 0 &&
      header.find("Num. of interaction events") != std::string::npos &&
      header.find("Intensity (m/s^2)") != std::string::npos &&
      header.find("Num. of agents") != std::string::npos &&
      header.find("Duration (s)") != std::string::npos &&
      header.find("Min. PET (s)") != std::string::npos;

  bool ok = rc == kExitOk && rc_stats == kExitOk &&
            two == corpus.two_agent_events &&
            multi == corpus.multi_agent_events &&
            sum.participants.counts[0] ==
                static_cast<std::size_t>(corpus.two_agent_events) &&
            sum.participants.counts[1] ==
                static_cast<std::size_t>(corpus.multi_agent_events) &&
            std::fabs(p_two - corpus.scenes_with_two / 50.0) < 1e-12 &&
            std::fabs(p_multi - corpus.scenes_with_multi / 50.0) < 1e-12 &&
            layout_ok;
  report(9, "stats report the known two-agent/multi-agent composition", ok,
         "events " + std::to_string(two) + "+" + std::to_string(multi) +
             " (want " + std::to_string(corpus.two_agent_events) + "+" +
             std::to_string(corpus.multi_agent_events) + "), proportions " +
             fmt(p_two) + "/" + fmt(p_multi) + ", layout " +
             (layout_ok ? "ok" : "bad"));
  fs::remove_all(dir);
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%s: %d criteria failed (total %s s)\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures, fmt(seconds_since(t0)).c_str());
  return g_failures == 0 ? 0 : 1;
}
