#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trajmine/events.hpp"
#include "trajmine/stats.hpp"
#include "trajmine/synth.hpp"

namespace trajmine {

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;           // success
inline constexpr int kExitPartial = 1;      // domain or partial failure
inline constexpr int kExitEnvironment = 2;  // I/O or environment failure

struct RunConfig {
  ExtractParams params;
  std::filesystem::path input_dir;   // canonical Scene CSVs
  std::filesystem::path output;      // catalog path for extract
  std::optional<double> dt_override;
  std::string dataset_tag;
  unsigned jobs = 0;                 // 0 = number of logical processors
  bool json = false;                 // catalog as JSONL instead of CSV
  std::optional<std::filesystem::path> export_dir;  // per-event sidecars
  // Extra per-event filter over the thread's "ic" trace; events where the
  // formula is not True at their start step are dropped.
  std::optional<std::string> segment_formula;
  int log_level = 1;  // 0 silent, 1 progress, 2 debug
};

/// Validates and canonicalizes raw Scene CSVs from input_dir into
/// output_dir (one <scene_id>.csv per file, dynamics backfilled, headings
/// normalized). Per-file errors are reported; any failure yields exit 1,
/// an empty input directory a warning and exit 0.
int cmd_unify(const std::filesystem::path& input_dir,
              const std::filesystem::path& output_dir,
              std::optional<double> dt, std::ostream& log);

/// Runs the full extraction over every scene in config.input_dir and
/// writes the event catalog to config.output. Scene-parallel under
/// config.jobs with a byte-identical catalog at any parallelism; one
/// progress line per scene. Missing input exits 2; failed scenes are
/// skipped, logged, and yield exit 1 at the end.
int cmd_extract(const RunConfig& config, std::ostream& log);

/// Aggregates a catalog: summary table (text + CSV) and one histogram CSV
/// per feature, written into out_dir. scene_count feeds the proportion
/// estimates; absent, the distinct scene count of the catalog is used.
int cmd_stats(const std::filesystem::path& catalog_path,
              std::optional<std::size_t> scene_count,
              const std::filesystem::path& out_dir, const BinSpec& bins,
              std::ostream& log);

/// Exports one catalog event (1-based row index) as plot-ready CSVs:
/// the involved agents' trajectories, the per-step intensity / key-agent
/// trace, and the conflict-pair annotations. Unknown ids exit 1.
int cmd_export(const RunConfig& config,
               const std::filesystem::path& catalog_path,
               std::int64_t event_id, const std::filesystem::path& out_dir,
               std::ostream& log);

/// Generates the scenes of a spec batch into output_dir as Scene CSVs.
/// Invalid specs are reported per scene and yield exit 1.
int cmd_synth(const std::vector<ScenarioSpec>& specs,
              const std::filesystem::path& output_dir, std::ostream& log);

/// Lexicographically sorted *.csv files directly inside `dir`.
std::vector<std::filesystem::path> list_scene_files(
    const std::filesystem::path& dir);

}  // namespace trajmine
