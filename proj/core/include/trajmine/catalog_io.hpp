#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "trajmine/events.hpp"

namespace trajmine {

/// Column order of the catalog CSV. agent_ids, agent_types and
/// conflict_types are semicolon-joined; min_pet is empty when absent;
/// has_av is 0/1.
inline constexpr const char* kCatalogHeader =
    "scene_id,dataset_tag,agent_ids,start_step,end_step,duration_s,"
    "intensity_max,intensity_mean,min_pet,n_agents,has_av,agent_types,"
    "conflict_types";

/// Writes the catalog CSV (header + one row per event, LF line endings,
/// '.' decimal separator, shortest round-trip doubles). String fields must
/// not contain delimiters; violations throw ContractViolation.
void write_catalog_csv(const std::vector<Event>& events, std::ostream& out);
void write_catalog_csv(const std::vector<Event>& events,
                       const std::filesystem::path& path);

/// Reads a catalog CSV back into events. The overlap flag is not a CSV
/// column; it is recovered from the min_pet = 0 convention.
std::vector<Event> read_catalog_csv(std::istream& in);
std::vector<Event> read_catalog_csv(const std::filesystem::path& path);

/// Writes one JSON object per line, same field order as the CSV plus an
/// explicit pet_overlap flag (min_pet is null when absent).
void write_catalog_jsonl(const std::vector<Event>& events, std::ostream& out);
void write_catalog_jsonl(const std::vector<Event>& events,
                         const std::filesystem::path& path);

std::vector<Event> read_catalog_jsonl(std::istream& in);
std::vector<Event> read_catalog_jsonl(const std::filesystem::path& path);

/// Dispatches on the extension: .jsonl / .ndjson read as JSONL, anything
/// else as CSV.
std::vector<Event> read_catalog(const std::filesystem::path& path);

}  // namespace trajmine
