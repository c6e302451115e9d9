#include "trajmine/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "trajmine/catalog_io.hpp"
#include "trajmine/errors.hpp"
#include "trajmine/scene_io.hpp"

namespace trajmine {

namespace {

unsigned effective_jobs(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

std::string padded_id(std::int64_t id) {
  std::ostringstream out;
  out << std::setfill('0') << std::setw(6) << id;
  return out.str();
}

bool ensure_dir(const std::filesystem::path& dir, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    log << "error: cannot create directory " << dir.string() << ": "
        << ec.message() << '\n';
    return false;
  }
  return true;
}

/// Everything cmd_extract derives from one scene file.
struct SceneResult {
  std::string scene_id;
  std::vector<Event> events;
  SceneAnalysis analysis;
  Scene scene;
  std::string error;  // nonempty marks a skipped scene
};

void process_scene(const std::filesystem::path& file, const RunConfig& config,
                   const std::optional<MtlFormula>& filter, bool keep_scene,
                   SceneResult& out) {
  try {
    Scene scene =
        read_scene_csv(file, config.dt_override, config.dataset_tag);
    out.scene_id = scene.scene_id;
    SceneAnalysis analysis = analyze_scene(scene, config.params);
    if (filter) {
      SceneAnalysis kept;
      kept.steps = std::move(analysis.steps);
      kept.threads = analysis.threads;
      for (std::size_t i = 0; i < analysis.events.size(); ++i) {
        const ThreadTrace& th = analysis.threads[analysis.event_thread[i]];
        BoolTrace trace;
        trace.name = "ic";
        trace.offset = th.first_step;
        trace.values = th.intcheck;
        if (eval_at(*filter, {trace}, analysis.events[i].start_step) !=
            MtlValue::True) {
          continue;
        }
        kept.events.push_back(std::move(analysis.events[i]));
        kept.event_thread.push_back(analysis.event_thread[i]);
        kept.event_pairs.push_back(std::move(analysis.event_pairs[i]));
      }
      analysis = std::move(kept);
    }
    out.events = analysis.events;
    if (keep_scene) {
      out.analysis = std::move(analysis);
      out.scene = std::move(scene);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
}

/// The three per-event sidecar CSVs shared by cmd_extract --export-dir and
/// cmd_export.
void write_event_export(const Scene& scene, const SceneAnalysis& analysis,
                        std::size_t event_index, std::int64_t catalog_id,
                        const std::filesystem::path& dir) {
  const Event& ev = analysis.events[event_index];
  const ThreadTrace& th = analysis.threads[analysis.event_thread[event_index]];
  std::string stem = "event_" + padded_id(catalog_id);

  {
    Scene sub;
    sub.scene_id = scene.scene_id;
    sub.dataset_tag = scene.dataset_tag;
    sub.dt = scene.dt;
    for (const std::string& id : ev.agent_ids) {
      const AgentTrack* t = scene.find(id);
      if (!t) throw ContractViolation("event references unknown track");
      sub.tracks.push_back(*t);
    }
    write_scene_csv(sub, dir / (stem + "_trajectories.csv"));
  }

  {
    std::ofstream out(dir / (stem + "_msaa.csv"), std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + stem + "_msaa.csv");
    out << "step,time_s,intensity,intcheck,key_agents\n";
    for (std::int64_t step = ev.start_step; step <= ev.end_step; ++step) {
      auto i = static_cast<std::size_t>(step - th.first_step);
      out << step << ',' << format_double(static_cast<double>(step) * scene.dt)
          << ',' << format_double(th.intensity[i]) << ','
          << (th.intcheck[i] ? '1' : '0') << ',';
      const auto& keys = th.key_agents[i];
      for (std::size_t k = 0; k < keys.size(); ++k) {
        if (k) out << ';';
        out << keys[k];
      }
      out << '\n';
    }
  }

  {
    std::ofstream out(dir / (stem + "_conflicts.csv"), std::ios::binary);
    if (!out) {
      throw Error("cannot open for writing: " + stem + "_conflicts.csv");
    }
    out << "id_a,id_b,point_x,point_y,time_a,time_b,buffer_n,step,type\n";
    for (const EventPairAnnotation& a : analysis.event_pairs[event_index]) {
      out << a.pair.id_a << ',' << a.pair.id_b << ','
          << format_double(a.pair.point.x) << ','
          << format_double(a.pair.point.y) << ','
          << format_double(a.pair.time_a) << ','
          << format_double(a.pair.time_b) << ','
          << format_double(a.pair.buffer_n) << ',' << a.step << ','
          << to_string(a.type) << '\n';
    }
  }
}

}  // namespace

std::vector<std::filesystem::path> list_scene_files(
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_unify(const std::filesystem::path& input_dir,
              const std::filesystem::path& output_dir,
              std::optional<double> dt, std::ostream& log) {
  if (!std::filesystem::is_directory(input_dir)) {
    log << "error: input directory not found: " << input_dir.string() << '\n';
    return kExitEnvironment;
  }
  std::vector<std::filesystem::path> files = list_scene_files(input_dir);
  if (files.empty()) {
    log << "warning: no .csv files in " << input_dir.string() << '\n';
    return kExitOk;
  }
  if (!ensure_dir(output_dir, log)) return kExitEnvironment;

  std::set<std::string> written;
  std::size_t failed = 0;
  for (const auto& file : files) {
    try {
      Scene scene = read_scene_csv(file, dt);
      if (!written.insert(scene.scene_id).second) {
        throw Error("duplicate scene_id '" + scene.scene_id + "'");
      }
      auto out_path = output_dir / (scene.scene_id + ".csv");
      write_scene_csv(scene, out_path);
      log << "unified " << file.filename().string() << " -> "
          << out_path.filename().string() << " (" << scene.tracks.size()
          << " tracks)\n";
    } catch (const std::exception& e) {
      ++failed;
      log << "error: " << file.filename().string() << ": " << e.what()
          << '\n';
    }
  }
  if (failed > 0) {
    log << failed << " of " << files.size() << " files failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_extract(const RunConfig& config, std::ostream& log) {
  if (!std::filesystem::is_directory(config.input_dir)) {
    log << "error: input directory not found: " << config.input_dir.string()
        << '\n';
    return kExitEnvironment;
  }
  std::optional<MtlFormula> filter;
  if (config.segment_formula) {
    try {
      filter = MtlFormula::parse(*config.segment_formula);
    } catch (const std::exception& e) {
      log << "error: --segment-formula: " << e.what() << '\n';
      return kExitPartial;
    }
  }

  std::vector<std::filesystem::path> files =
      list_scene_files(config.input_dir);
  if (files.empty() && config.log_level >= 1) {
    log << "warning: no .csv files in " << config.input_dir.string() << '\n';
  }
  bool keep_scene = config.export_dir.has_value();

  std::vector<SceneResult> results(files.size());
  std::atomic<std::size_t> next{0};
  unsigned jobs =
      std::min<unsigned>(effective_jobs(config.jobs),
                         std::max<std::size_t>(files.size(), 1));
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= files.size()) break;
      process_scene(files[i], config, filter, keep_scene, results[i]);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<Event> catalog;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const SceneResult& r = results[i];
    if (!r.error.empty()) {
      ++failed;
      log << "error: " << files[i].filename().string() << ": " << r.error
          << '\n';
      continue;
    }
    if (config.log_level >= 1) {
      log << "scene " << r.scene_id << ": " << r.events.size() << " events\n";
    }
    catalog.insert(catalog.end(), r.events.begin(), r.events.end());
  }

  try {
    if (config.json) {
      write_catalog_jsonl(catalog, config.output);
    } else {
      write_catalog_csv(catalog, config.output);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitEnvironment;
  }

  if (config.export_dir) {
    if (!ensure_dir(*config.export_dir, log)) return kExitEnvironment;
    std::int64_t catalog_id = 0;
    try {
      for (const SceneResult& r : results) {
        if (!r.error.empty()) continue;
        for (std::size_t e = 0; e < r.analysis.events.size(); ++e) {
          write_event_export(r.scene, r.analysis, e, ++catalog_id,
                             *config.export_dir);
        }
      }
    } catch (const std::exception& e) {
      log << "error: " << e.what() << '\n';
      return kExitEnvironment;
    }
  }

  if (config.log_level >= 1) {
    log << "catalog: " << catalog.size() << " events from "
        << files.size() - failed << " scenes -> " << config.output.string()
        << '\n';
  }
  if (failed > 0) {
    log << failed << " of " << files.size() << " scenes failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_stats(const std::filesystem::path& catalog_path,
              std::optional<std::size_t> scene_count,
              const std::filesystem::path& out_dir, const BinSpec& bins,
              std::ostream& log) {
  if (!std::filesystem::is_regular_file(catalog_path)) {
    log << "error: catalog not found: " << catalog_path.string() << '\n';
    return kExitEnvironment;
  }
  std::vector<Event> catalog;
  try {
    catalog = read_catalog(catalog_path);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  if (!ensure_dir(out_dir, log)) return kExitEnvironment;

  try {
    std::vector<SummaryRow> rows = summarize_by_dataset(catalog, bins);
    CatalogSummary all = summarize(catalog, bins);

    std::set<std::string> scenes;
    for (const Event& ev : catalog) scenes.insert(ev.scene_id);
    std::size_t denom = scene_count.value_or(scenes.size());

    std::ostringstream text;
    write_summary_text(rows, text);
    if (denom > 0) {
      auto [two_agent, multi_agent] = proportions(catalog, denom);
      text << "\nscenes: " << denom
           << "\ntwo_agent_scene_fraction: " << format_double(two_agent)
           << "\nmulti_agent_scene_fraction: " << format_double(multi_agent)
           << '\n';
    } else {
      text << "\nproportions unavailable: no scenes\n";
    }
    log << text.str();

    std::ofstream summary_txt(out_dir / "summary.txt", std::ios::binary);
    summary_txt << text.str();
    std::ofstream summary_csv(out_dir / "summary.csv", std::ios::binary);
    write_summary_csv(rows, summary_csv);
    std::ofstream hd(out_dir / "hist_duration.csv", std::ios::binary);
    write_histogram_csv(all.duration, hd);
    std::ofstream hi(out_dir / "hist_intensity.csv", std::ios::binary);
    write_histogram_csv(all.intensity, hi);
    std::ofstream hp(out_dir / "hist_pet.csv", std::ios::binary);
    write_histogram_csv(all.pet, hp);
    std::ofstream hn(out_dir / "hist_participants.csv", std::ios::binary);
    write_histogram_csv(all.participants, hn);
    if (!summary_txt || !summary_csv || !hd || !hi || !hp || !hn) {
      log << "error: failed writing stats outputs\n";
      return kExitEnvironment;
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_export(const RunConfig& config,
               const std::filesystem::path& catalog_path,
               std::int64_t event_id, const std::filesystem::path& out_dir,
               std::ostream& log) {
  if (!std::filesystem::is_regular_file(catalog_path)) {
    log << "error: catalog not found: " << catalog_path.string() << '\n';
    return kExitEnvironment;
  }
  std::vector<Event> catalog;
  try {
    catalog = read_catalog(catalog_path);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  if (event_id < 1 || event_id > static_cast<std::int64_t>(catalog.size())) {
    UnknownEventId err("event id " + std::to_string(event_id) +
                       " outside catalog of " +
                       std::to_string(catalog.size()) + " events");
    log << "error: " << err.what() << '\n';
    return kExitPartial;
  }
  const Event& target = catalog[static_cast<std::size_t>(event_id - 1)];

  auto scene_path = config.input_dir / (target.scene_id + ".csv");
  if (!std::filesystem::is_regular_file(scene_path)) {
    log << "error: scene file not found: " << scene_path.string() << '\n';
    return kExitEnvironment;
  }
  if (!ensure_dir(out_dir, log)) return kExitEnvironment;

  try {
    Scene scene =
        read_scene_csv(scene_path, config.dt_override, config.dataset_tag);
    SceneAnalysis analysis = analyze_scene(scene, config.params);
    std::size_t match = analysis.events.size();
    for (std::size_t i = 0; i < analysis.events.size(); ++i) {
      const Event& ev = analysis.events[i];
      if (ev.start_step == target.start_step &&
          ev.end_step == target.end_step &&
          ev.agent_ids == target.agent_ids) {
        match = i;
        break;
      }
    }
    if (match == analysis.events.size()) {
      log << "error: catalog event not reproduced by the scene (check that "
             "extraction flags match)\n";
      return kExitPartial;
    }
    write_event_export(scene, analysis, match, event_id, out_dir);
    log << "exported event " << event_id << " (scene " << target.scene_id
        << ", " << target.agent_ids.size() << " agents) -> "
        << out_dir.string() << '\n';
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_synth(const std::vector<ScenarioSpec>& specs,
              const std::filesystem::path& output_dir, std::ostream& log) {
  if (!ensure_dir(output_dir, log)) return kExitEnvironment;
  std::set<std::string> written;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    try {
      Scene scene = generate(specs[i]);
      if (!written.insert(scene.scene_id).second) {
        throw InvalidSpec("duplicate scene_id '" + scene.scene_id + "'");
      }
      auto out_path = output_dir / (scene.scene_id + ".csv");
      write_scene_csv(scene, out_path);
      log << "generated " << out_path.filename().string() << " ("
          << scene.tracks.size() << " tracks)\n";
    } catch (const std::exception& e) {
      ++failed;
      log << "error: spec " << i + 1 << ": " << e.what() << '\n';
    }
  }
  if (failed > 0) {
    log << failed << " of " << specs.size() << " specs failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace trajmine
