#include "trajmine/catalog_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trajmine/errors.hpp"
#include "trajmine/scene_io.hpp"

namespace trajmine {

namespace {

void check_field(const std::string& s) {
  if (s.find_first_of(",;\n\r") != std::string::npos) {
    throw ContractViolation("catalog field contains a delimiter: " + s);
  }
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ';';
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::vector<std::string> type_names(const std::vector<AgentType>& types) {
  std::vector<std::string> out;
  out.reserve(types.size());
  for (AgentType t : types) out.push_back(to_string(t));
  return out;
}

std::vector<std::string> label_names(const std::vector<ConflictType>& types) {
  std::vector<std::string> out;
  out.reserve(types.size());
  for (ConflictType t : types) out.push_back(to_string(t));
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(std::string("catalog: bad ") + what + " value '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(std::string("catalog: bad ") + what + " value '" + s + "'");
  }
}

Event event_from_fields(const std::vector<std::string>& f) {
  if (f.size() != 13) {
    throw Error("catalog: expected 13 columns, got " +
                std::to_string(f.size()));
  }
  Event ev;
  ev.scene_id = f[0];
  ev.dataset_tag = f[1];
  ev.agent_ids = split(f[2], ';');
  ev.start_step = parse_int(f[3], "start_step");
  ev.end_step = parse_int(f[4], "end_step");
  ev.duration_s = parse_double(f[5], "duration_s");
  ev.intensity_max = parse_double(f[6], "intensity_max");
  ev.intensity_mean = parse_double(f[7], "intensity_mean");
  if (!f[8].empty()) ev.min_pet = parse_double(f[8], "min_pet");
  std::int64_t n_agents = parse_int(f[9], "n_agents");
  if (n_agents != static_cast<std::int64_t>(ev.agent_ids.size())) {
    throw Error("catalog: n_agents disagrees with agent_ids");
  }
  ev.has_av = f[10] == "1";
  if (f[10] != "0" && f[10] != "1") {
    throw Error("catalog: bad has_av value '" + f[10] + "'");
  }
  for (const std::string& name : split(f[11], ';')) {
    auto t = agent_type_from_string(name);
    if (!t) throw Error("catalog: unknown agent type '" + name + "'");
    ev.agent_types.push_back(*t);
  }
  for (const std::string& name : split(f[12], ';')) {
    auto t = conflict_type_from_string(name);
    if (!t) throw Error("catalog: unknown conflict type '" + name + "'");
    ev.conflict_types.push_back(*t);
  }
  ev.pet_overlap = ev.min_pet.has_value() && *ev.min_pet == 0.0;
  return ev;
}

}  // namespace

void write_catalog_csv(const std::vector<Event>& events, std::ostream& out) {
  out << kCatalogHeader << '\n';
  for (const Event& ev : events) {
    check_field(ev.scene_id);
    check_field(ev.dataset_tag);
    for (const std::string& id : ev.agent_ids) check_field(id);
    out << ev.scene_id << ',' << ev.dataset_tag << ',' << join(ev.agent_ids)
        << ',' << ev.start_step << ',' << ev.end_step << ','
        << format_double(ev.duration_s) << ','
        << format_double(ev.intensity_max) << ','
        << format_double(ev.intensity_mean) << ',';
    if (ev.min_pet) out << format_double(*ev.min_pet);
    out << ',' << ev.agent_ids.size() << ',' << (ev.has_av ? '1' : '0') << ','
        << join(type_names(ev.agent_types)) << ','
        << join(label_names(ev.conflict_types)) << '\n';
  }
}

void write_catalog_csv(const std::vector<Event>& events,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_catalog_csv(events, out);
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<Event> read_catalog_csv(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kCatalogHeader) {
        throw Error("catalog: unrecognized header line");
      }
      saw_header = true;
      continue;
    }
    out.push_back(event_from_fields(split(line, ',')));
  }
  if (!saw_header) throw Error("catalog: missing header line");
  return out;
}

std::vector<Event> read_catalog_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  return read_catalog_csv(in);
}

void write_catalog_jsonl(const std::vector<Event>& events, std::ostream& out) {
  for (const Event& ev : events) {
    nlohmann::ordered_json j;
    j["scene_id"] = ev.scene_id;
    j["dataset_tag"] = ev.dataset_tag;
    j["agent_ids"] = ev.agent_ids;
    j["start_step"] = ev.start_step;
    j["end_step"] = ev.end_step;
    j["duration_s"] = ev.duration_s;
    j["intensity_max"] = ev.intensity_max;
    j["intensity_mean"] = ev.intensity_mean;
    if (ev.min_pet) {
      j["min_pet"] = *ev.min_pet;
    } else {
      j["min_pet"] = nullptr;
    }
    j["pet_overlap"] = ev.pet_overlap;
    j["n_agents"] = ev.agent_ids.size();
    j["has_av"] = ev.has_av;
    j["agent_types"] = type_names(ev.agent_types);
    j["conflict_types"] = label_names(ev.conflict_types);
    out << j.dump() << '\n';
  }
}

void write_catalog_jsonl(const std::vector<Event>& events,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_catalog_jsonl(events, out);
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<Event> read_catalog_jsonl(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw Error("catalog line " + std::to_string(lineno) + ": " + e.what());
    }
    Event ev;
    ev.scene_id = j.at("scene_id").get<std::string>();
    ev.dataset_tag = j.at("dataset_tag").get<std::string>();
    ev.agent_ids = j.at("agent_ids").get<std::vector<std::string>>();
    ev.start_step = j.at("start_step").get<std::int64_t>();
    ev.end_step = j.at("end_step").get<std::int64_t>();
    ev.duration_s = j.at("duration_s").get<double>();
    ev.intensity_max = j.at("intensity_max").get<double>();
    ev.intensity_mean = j.at("intensity_mean").get<double>();
    if (!j.at("min_pet").is_null()) {
      ev.min_pet = j.at("min_pet").get<double>();
    }
    ev.pet_overlap = j.at("pet_overlap").get<bool>();
    ev.has_av = j.at("has_av").get<bool>();
    for (const auto& name : j.at("agent_types")) {
      auto t = agent_type_from_string(name.get<std::string>());
      if (!t) throw Error("catalog: unknown agent type");
      ev.agent_types.push_back(*t);
    }
    for (const auto& name : j.at("conflict_types")) {
      auto t = conflict_type_from_string(name.get<std::string>());
      if (!t) throw Error("catalog: unknown conflict type");
      ev.conflict_types.push_back(*t);
    }
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<Event> read_catalog_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  return read_catalog_jsonl(in);
}

std::vector<Event> read_catalog(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return read_catalog_jsonl(path);
  return read_catalog_csv(path);
}

}  // namespace trajmine
