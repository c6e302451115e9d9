#include "trajmine/scene_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace trajmine {

namespace {

const char* kHeader =
    "scene_id,track_id,step,x,y,heading,speed,accel,length,width,height,"
    "agent_type,is_ego";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("scene csv: bad " + what + " value '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("scene csv: bad " + what + " value '" + s + "'");
  }
  return v;
}

std::optional<double> parse_opt_double(const std::string& s,
                                       const std::string& what) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, what);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::vector<SceneRow> read_scene_rows(std::istream& in,
                                      std::optional<double>& dt_out) {
  dt_out.reset();
  std::vector<SceneRow> rows;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("dt=");
      if (pos != std::string::npos) {
        dt_out = parse_double(line.substr(pos + 3), "dt");
      }
      continue;
    }
    if (!header_seen) {
      // First non-comment line is the header.
      header_seen = true;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 13) {
      throw Error("scene csv line " + std::to_string(lineno) + ": expected 13 "
                  "columns, got " + std::to_string(cells.size()));
    }
    SceneRow r;
    r.scene_id = cells[0];
    r.track_id = cells[1];
    r.step = parse_int(cells[2], "step");
    r.x = parse_double(cells[3], "x");
    r.y = parse_double(cells[4], "y");
    r.heading = parse_opt_double(cells[5], "heading");
    r.speed = parse_opt_double(cells[6], "speed");
    r.accel = parse_opt_double(cells[7], "accel");
    r.length = parse_opt_double(cells[8], "length");
    r.width = parse_opt_double(cells[9], "width");
    r.height = parse_opt_double(cells[10], "height");
    if (!cells[11].empty()) {
      const auto t = agent_type_from_string(cells[11]);
      if (!t) {
        throw Error("scene csv line " + std::to_string(lineno) +
                    ": unknown agent_type '" + cells[11] + "'");
      }
      r.agent_type = t;
    }
    if (!cells[12].empty()) {
      if (cells[12] != "0" && cells[12] != "1") {
        throw Error("scene csv line " + std::to_string(lineno) +
                    ": is_ego must be 0 or 1");
      }
      r.is_ego = cells[12] == "1";
    }
    if (r.speed && *r.speed < 0.0) {
      throw Error("scene csv line " + std::to_string(lineno) +
                  ": negative speed");
    }
    if ((r.length && *r.length <= 0.0) || (r.width && *r.width <= 0.0)) {
      throw Error("scene csv line " + std::to_string(lineno) +
                  ": non-positive extent");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Scene read_scene_csv(const std::filesystem::path& path,
                     std::optional<double> dt_override,
                     std::string dataset_tag) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scene file " + path.string());
  std::optional<double> file_dt;
  const auto rows = read_scene_rows(in, file_dt);
  const std::optional<double> dt = dt_override ? dt_override : file_dt;
  if (!dt) {
    throw Error("scene file " + path.string() +
                ": no '# dt=' sidecar line and no dt override");
  }
  return ingest_scene(rows, *dt, std::move(dataset_tag));
}

void write_scene_csv(const Scene& scene, std::ostream& out) {
  out << "# dt=" << format_double(scene.dt) << "\n" << kHeader << "\n";
  for (const AgentTrack& track : scene.tracks) {
    for (const AgentState& s : track.states) {
      out << scene.scene_id << ',' << track.track_id << ',' << s.step << ','
          << format_double(s.x) << ',' << format_double(s.y) << ','
          << format_double(s.heading) << ',' << format_double(s.speed) << ','
          << format_double(s.accel) << ',' << format_double(s.length) << ','
          << format_double(s.width) << ',' << format_double(s.height) << ','
          << to_string(track.agent_type) << ',' << (track.is_ego ? '1' : '0')
          << "\n";
    }
  }
}

void write_scene_csv(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write scene file " + path.string());
  write_scene_csv(scene, out);
}

}  // namespace trajmine
