// Command-line front end: unify -> extract -> stats / export, plus synth
// for generating ground-truth scenes. Flags accept both underscore and
// dash spellings; precedence is CLI flag > --config file > built-in
// default. Exit codes: 0 success, 1 partial or domain failure, 2
// environment/I/O failure.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trajmine/commands.hpp"
#include "trajmine/errors.hpp"

namespace {

using trajmine::RunConfig;

/// Mutable CLI state that needs post-parse conversion.
struct CliState {
  RunConfig config;
  std::string path_mode = "recorded_retimed";
  double dt = 0.0;  // 0 = use each file's dt sidecar
  std::string export_dir;
  std::string segment_formula;

  void finalize() {
    auto mode = trajmine::path_mode_from_string(path_mode);
    if (!mode) throw trajmine::Error("unknown path_mode: " + path_mode);
    config.params.conflict.path_mode = *mode;
    if (dt > 0.0) config.dt_override = dt;
    if (!export_dir.empty()) config.export_dir = export_dir;
    if (!segment_formula.empty()) config.segment_formula = segment_formula;
  }
};

void add_param_flags(CLI::App* cmd, CliState& st) {
  auto& conflict = st.config.params.conflict;
  auto& msaa = st.config.params.msaa;
  cmd->add_option("--horizon_m,--horizon-m", conflict.horizon_m,
                  "Future-path horizon in seconds")
      ->capture_default_str();
  cmd->add_option("--conf_time,--conf-time", conflict.conf_time,
                  "Max passage-time difference in seconds")
      ->capture_default_str();
  cmd->add_option("--buffer_floor,--buffer-floor", conflict.buffer_floor,
                  "Lower bound on the conflict corridor buffer in meters")
      ->capture_default_str();
  cmd->add_option("--path_mode,--path-mode", st.path_mode,
                  "Future-path construction: recorded_retimed or "
                  "straight_line")
      ->check(CLI::IsMember({"recorded_retimed", "straight_line"}))
      ->capture_default_str();
  cmd->add_option("--min_speed,--min-speed", conflict.min_speed,
                  "Slower agents are skipped, m/s")
      ->capture_default_str();
  cmd->add_flag("--include_nonvehicles,--include-nonvehicles",
                conflict.include_nonvehicles,
                "Also scan pedestrian/cyclist/other tracks");
  cmd->add_option("--tau_safe,--tau-safe", msaa.tau_safe,
                  "Required passage-time separation in seconds")
      ->capture_default_str();
  cmd->add_option("--a_min,--a-min", msaa.a_min,
                  "Strongest braking, m/s^2 (negative)")
      ->capture_default_str();
  cmd->add_option("--a_max,--a-max", msaa.a_max,
                  "Strongest throttle, m/s^2")
      ->capture_default_str();
  cmd->add_option("--infeasible_cap,--infeasible-cap", msaa.infeasible_cap,
                  "Intensity reported for unresolvable conflicts, m/s^2")
      ->capture_default_str();
  cmd->add_option("--exact_agent_limit,--exact-agent-limit",
                  msaa.exact_agent_limit,
                  "Largest component solved exactly")
      ->capture_default_str();
  cmd->add_option("--msaa_threshold,--msaa-threshold",
                  st.config.params.msaa_threshold,
                  "IntCheck intensity boundary, m/s^2")
      ->capture_default_str();
  cmd->add_option("--gap_steps,--gap-steps", st.config.params.gap_steps,
                  "Longest below-threshold gap kept inside an event, steps")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--dt", st.dt,
                  "Seconds per step; overrides the file's dt sidecar");
  cmd->add_option("--dataset_tag,--dataset-tag", st.config.dataset_tag,
                  "Label stamped on every event");
  cmd->add_option("--log_level,--log-level", st.config.log_level,
                  "0 silent, 1 progress, 2 debug")
      ->capture_default_str();
}

/// Reads one ScenarioSpec from a small key=value file (one pair per line,
/// '#' comments; list values comma-separated).
trajmine::ScenarioSpec read_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw trajmine::Error("cannot open spec file: " + path);
  trajmine::ScenarioSpec spec;
  std::string line;
  std::size_t lineno = 0;
  auto parse_list = [](const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw trajmine::Error(path + ":" + std::to_string(lineno) +
                            ": expected key=value");
    }
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    try {
      if (key == "kind") {
        auto k = trajmine::scenario_kind_from_string(value);
        if (!k) throw trajmine::Error("unknown kind: " + value);
        spec.kind = *k;
      } else if (key == "scene_id") {
        spec.scene_id = value;
      } else if (key == "speeds") {
        spec.speeds = parse_list(value);
      } else if (key == "arrival_offsets" || key == "offsets") {
        spec.arrival_offsets = parse_list(value);
      } else if (key == "approach_angles" || key == "angles") {
        spec.approach_angles = parse_list(value);
      } else if (key == "dt") {
        spec.dt = std::stod(value);
      } else if (key == "duration") {
        spec.duration = std::stod(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "length") {
        spec.length = std::stod(value);
      } else if (key == "width") {
        spec.width = std::stod(value);
      } else if (key == "height") {
        spec.height = std::stod(value);
      } else {
        throw trajmine::Error("unknown key: " + key);
      }
    } catch (const trajmine::Error&) {
      throw;
    } catch (const std::exception&) {
      throw trajmine::Error(path + ":" + std::to_string(lineno) +
                            ": bad value for " + key);
    }
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mines multi-agent interaction events from trajectory "
               "records: conflict detection, intensity quantification, "
               "segment extraction, and catalog statistics."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Configuration file ([subcommand] sections, key=value); "
                 "CLI flags take precedence");

  CliState st;

  // ---- unify ----
  std::string unify_in;
  std::string unify_out;
  double unify_dt = 0.0;
  CLI::App* unify =
      app.add_subcommand("unify", "Validate and canonicalize raw Scene CSVs");
  unify->add_option("--input,-i", unify_in, "Directory of raw Scene CSVs")
      ->required();
  unify->add_option("--output,-o", unify_out,
                    "Directory for canonical Scene CSVs")
      ->required();
  unify->add_option("--dt", unify_dt,
                    "Seconds per step; overrides the files' dt sidecars");

  // ---- extract ----
  std::string extract_in;
  std::string extract_out;
  CLI::App* extract = app.add_subcommand(
      "extract", "Mine interaction events into an event catalog");
  extract->add_option("--input,-i", extract_in,
                      "Directory of canonical Scene CSVs")
      ->required();
  extract->add_option("--output,-o", extract_out, "Catalog file to write")
      ->required();
  extract->add_option("--jobs,-j", st.config.jobs,
                      "Worker threads (0 = logical processors)")
      ->capture_default_str();
  extract->add_flag("--json", st.config.json,
                    "Write the catalog as JSONL instead of CSV");
  extract->add_option("--export_dir,--export-dir", st.export_dir,
                      "Also write per-event trajectory/intensity/conflict "
                      "CSVs into this directory");
  extract->add_option("--segment_formula,--segment-formula",
                      st.segment_formula,
                      "Extra acceptance formula over the 'ic' signal; "
                      "events not True at their start step are dropped "
                      "(grammar: see grammar.md)");
  add_param_flags(extract, st);

  // ---- stats ----
  std::string stats_catalog;
  std::string stats_out;
  std::size_t stats_scenes = 0;
  trajmine::BinSpec bins;
  double bin_width = 0.25;
  double bin_max = 6.0;
  std::size_t participants_max = 10;
  CLI::App* stats = app.add_subcommand(
      "stats", "Aggregate a catalog into summary tables and histograms");
  stats->add_option("--catalog,-c", stats_catalog, "Catalog CSV or JSONL")
      ->required();
  stats->add_option("--output,-o", stats_out, "Directory for the outputs")
      ->required();
  stats->add_option("--scene_count,--scene-count", stats_scenes,
                    "Total scenes scanned (for proportions); default: "
                    "distinct scenes in the catalog");
  stats->add_option("--bin_width,--bin-width", bin_width,
                    "Histogram bin width for duration/intensity/PET")
      ->capture_default_str();
  stats->add_option("--bin_max,--bin-max", bin_max,
                    "Histogram upper edge for duration/intensity/PET")
      ->capture_default_str();
  stats->add_option("--participants_max,--participants-max", participants_max,
                    "Largest per-event agent count binned individually")
      ->capture_default_str();

  // ---- export ----
  std::string export_in;
  std::string export_catalog;
  std::string export_out;
  std::int64_t export_event_id = 0;
  CLI::App* exporter = app.add_subcommand(
      "export", "Write one event's plot-ready CSVs (trajectories, "
                "intensity trace, conflict annotations)");
  exporter->add_option("--input,-i", export_in,
                       "Directory of canonical Scene CSVs")
      ->required();
  exporter->add_option("--catalog,-c", export_catalog,
                       "Catalog CSV or JSONL")
      ->required();
  exporter->add_option("--event_id,--event-id,-e", export_event_id,
                       "1-based catalog row index")
      ->required();
  exporter->add_option("--output,-o", export_out,
                       "Directory for the three CSVs")
      ->required();
  add_param_flags(exporter, st);

  // ---- synth ----
  std::string synth_out;
  std::vector<std::string> synth_spec_files;
  std::string synth_kind = "crossing";
  std::string synth_scene_id;
  std::vector<double> synth_speeds;
  std::vector<double> synth_offsets;
  std::vector<double> synth_angles;
  double synth_dt = 0.1;
  double synth_duration = 10.0;
  std::uint64_t synth_seed = 0;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate ground-truth scenes with known conflicts");
  synth->add_option("--output,-o", synth_out,
                    "Directory for generated Scene CSVs")
      ->required();
  synth->add_option("--spec_file,--spec-file", synth_spec_files,
                    "key=value scenario file (repeatable; overrides flags)");
  synth->add_option("--kind", synth_kind,
                    "crossing, merging, head_on, following or chain")
      ->check(CLI::IsMember(
          {"crossing", "merging", "head_on", "following", "chain"}))
      ->capture_default_str();
  synth->add_option("--scene_id,--scene-id", synth_scene_id,
                    "Scene id (default: derived from kind and seed)");
  synth->add_option("--speeds", synth_speeds,
                    "Speed per agent, m/s (comma-separated or repeated)")
      ->delimiter(',');
  synth->add_option("--offsets,--arrival_offsets,--arrival-offsets",
                    synth_offsets,
                    "Seconds until each agent reaches the conflict point")
      ->delimiter(',');
  synth->add_option("--angles,--approach_angles,--approach-angles",
                    synth_angles, "Approach angle per agent, degrees")
      ->delimiter(',');
  synth->add_option("--dt", synth_dt, "Seconds per step")
      ->capture_default_str();
  synth->add_option("--duration", synth_duration, "Scene length in seconds")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "Spec seed (names the scene)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? trajmine::kExitOk : trajmine::kExitPartial;
  }

  try {
    st.finalize();
    if (unify->parsed()) {
      std::optional<double> dt;
      if (unify_dt > 0.0) dt = unify_dt;
      return trajmine::cmd_unify(unify_in, unify_out, dt, std::cout);
    }
    if (extract->parsed()) {
      st.config.input_dir = extract_in;
      st.config.output = extract_out;
      return trajmine::cmd_extract(st.config, std::cout);
    }
    if (stats->parsed()) {
      bins.duration = {0.0, bin_max, bin_width};
      bins.intensity = {0.0, bin_max, bin_width};
      bins.pet = {0.0, bin_max, bin_width};
      bins.participants_hi = participants_max;
      std::optional<std::size_t> scenes;
      if (stats->count("--scene_count") || stats->count("--scene-count")) {
        scenes = stats_scenes;
      }
      return trajmine::cmd_stats(stats_catalog, scenes, stats_out, bins,
                                 std::cout);
    }
    if (exporter->parsed()) {
      st.config.input_dir = export_in;
      return trajmine::cmd_export(st.config, export_catalog, export_event_id,
                                  export_out, std::cout);
    }
    if (synth->parsed()) {
      std::vector<trajmine::ScenarioSpec> specs;
      if (!synth_spec_files.empty()) {
        for (const std::string& f : synth_spec_files) {
          specs.push_back(read_spec_file(f));
        }
      } else {
        trajmine::ScenarioSpec spec;
        auto k = trajmine::scenario_kind_from_string(synth_kind);
        if (!k) throw trajmine::Error("unknown kind: " + synth_kind);
        spec.kind = *k;
        spec.scene_id = synth_scene_id;
        spec.speeds = synth_speeds;
        spec.arrival_offsets = synth_offsets;
        spec.approach_angles = synth_angles;
        spec.dt = synth_dt;
        spec.duration = synth_duration;
        spec.seed = synth_seed;
        specs.push_back(std::move(spec));
      }
      return trajmine::cmd_synth(specs, synth_out, std::cout);
    }
  } catch (const trajmine::Error& e) {
    std::cout << "error: " << e.what() << '\n';
    return trajmine::kExitPartial;
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << '\n';
    return trajmine::kExitEnvironment;
  }
  return trajmine::kExitOk;
}
