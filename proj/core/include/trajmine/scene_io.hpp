#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trajmine/traj_model.hpp"

namespace trajmine {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

/// Parses Scene CSV content. Recognizes the `# dt=<seconds>` sidecar line;
/// the parsed dt (if any) is returned through `dt_out`.
std::vector<SceneRow> read_scene_rows(std::istream& in,
                                      std::optional<double>& dt_out);

/// Reads and ingests one Scene CSV file. `dt_override` wins over the file's
/// sidecar; missing both is an error.
Scene read_scene_csv(const std::filesystem::path& path,
                     std::optional<double> dt_override = std::nullopt,
                     std::string dataset_tag = "");

/// Writes the canonical Scene CSV: sidecar dt line, header, then one row per
/// state with every field filled. LF line endings, '.' decimal separator.
void write_scene_csv(const Scene& scene, std::ostream& out);
void write_scene_csv(const Scene& scene, const std::filesystem::path& path);

}  // namespace trajmine
