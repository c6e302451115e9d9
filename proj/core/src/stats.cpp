#include "trajmine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "trajmine/errors.hpp"
#include "trajmine/scene_io.hpp"

namespace trajmine {

std::size_t Histogram::total() const {
  std::size_t sum = underflow + overflow;
  for (std::size_t c : counts) sum += c;
  return sum;
}

namespace {

Histogram make_histogram(const BinEdges& e) {
  Histogram h;
  if (e.width <= 0.0 || e.hi <= e.lo) {
    throw ContractViolation("histogram bins need hi > lo and width > 0");
  }
  std::size_t n =
      static_cast<std::size_t>(std::ceil((e.hi - e.lo) / e.width - 1e-9));
  h.edges.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    h.edges.push_back(e.lo + static_cast<double>(k) * e.width);
  }
  h.counts.assign(n, 0);
  return h;
}

Histogram make_participant_histogram(std::size_t lo, std::size_t hi) {
  Histogram h;
  if (hi < lo) throw ContractViolation("participant bins need hi >= lo");
  for (std::size_t k = lo; k <= hi + 1; ++k) {
    h.edges.push_back(static_cast<double>(k));
  }
  h.counts.assign(hi - lo + 1, 0);
  return h;
}

void add_sample(Histogram& h, double v) {
  if (v < h.edges.front()) {
    ++h.underflow;
    return;
  }
  if (v >= h.edges.back()) {
    ++h.overflow;
    return;
  }
  // Regular spacing: index arithmetic, clamped against float edge effects.
  double width = h.edges[1] - h.edges[0];
  auto idx = static_cast<std::size_t>((v - h.edges.front()) / width);
  idx = std::min(idx, h.counts.size() - 1);
  if (v < h.edges[idx]) --idx;
  if (v >= h.edges[idx + 1]) ++idx;
  ++h.counts[idx];
}

std::string fixed3(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v;
  return out.str();
}

constexpr const char* kSummaryColumns[6] = {
    "Dataset",      "Num. of interaction events",
    "Intensity (m/s^2)", "Num. of agents",
    "Duration (s)", "Min. PET (s)",
};

std::vector<std::string> row_cells(const SummaryRow& r) {
  return {
      r.dataset,
      std::to_string(r.summary.n_events),
      fixed3(r.summary.mean_intensity),
      std::to_string(r.summary.total_agents),
      fixed3(r.summary.mean_duration_s),
      fixed3(r.summary.mean_min_pet_s),
  };
}

}  // namespace

CatalogSummary summarize(const std::vector<Event>& catalog,
                         const BinSpec& bins) {
  CatalogSummary s;
  s.duration = make_histogram(bins.duration);
  s.intensity = make_histogram(bins.intensity);
  s.pet = make_histogram(bins.pet);
  s.participants =
      make_participant_histogram(bins.participants_lo, bins.participants_hi);

  double sum_intensity = 0.0;
  double sum_duration = 0.0;
  double sum_pet = 0.0;
  std::size_t with_pet = 0;
  for (const Event& ev : catalog) {
    ++s.n_events;
    s.total_agents += ev.agent_ids.size();
    sum_intensity += ev.intensity_mean;
    sum_duration += ev.duration_s;
    add_sample(s.duration, ev.duration_s);
    add_sample(s.intensity, ev.intensity_mean);
    add_sample(s.participants, static_cast<double>(ev.agent_ids.size()));
    if (ev.min_pet) {
      sum_pet += *ev.min_pet;
      ++with_pet;
      add_sample(s.pet, *ev.min_pet);
    } else {
      ++s.missing_pet;
    }
  }
  if (s.n_events > 0) {
    sum_intensity /= static_cast<double>(s.n_events);
    sum_duration /= static_cast<double>(s.n_events);
    s.mean_intensity = sum_intensity;
    s.mean_duration_s = sum_duration;
  }
  if (with_pet > 0) {
    s.mean_min_pet_s = sum_pet / static_cast<double>(with_pet);
  }
  return s;
}

std::pair<double, double> proportions(const std::vector<Event>& catalog,
                                      std::size_t scene_count) {
  if (scene_count == 0) throw ZeroScenes("proportions over zero scenes");
  std::set<std::string> all_scenes;
  std::set<std::string> two_agent;
  std::set<std::string> multi_agent;
  for (const Event& ev : catalog) {
    all_scenes.insert(ev.scene_id);
    if (ev.agent_ids.size() == 2) {
      two_agent.insert(ev.scene_id);
    } else if (ev.agent_ids.size() >= 3) {
      multi_agent.insert(ev.scene_id);
    }
  }
  if (all_scenes.size() > scene_count) {
    throw ContractViolation("scene_count smaller than the distinct scenes "
                            "in the catalog");
  }
  double denom = static_cast<double>(scene_count);
  return {static_cast<double>(two_agent.size()) / denom,
          static_cast<double>(multi_agent.size()) / denom};
}

std::vector<SummaryRow> summarize_by_dataset(const std::vector<Event>& catalog,
                                             const BinSpec& bins) {
  std::map<std::string, std::vector<Event>> by_tag;
  for (const Event& ev : catalog) {
    by_tag[ev.dataset_tag.empty() ? "-" : ev.dataset_tag].push_back(ev);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [tag, events] : by_tag) {
    rows.push_back({tag, summarize(events, bins)});
  }
  if (by_tag.size() != 1) {
    rows.push_back({"all", summarize(catalog, bins)});
  }
  return rows;
}

void write_summary_text(const std::vector<SummaryRow>& rows,
                        std::ostream& out) {
  std::vector<std::vector<std::string>> table;
  table.emplace_back(std::begin(kSummaryColumns), std::end(kSummaryColumns));
  for (const SummaryRow& r : rows) table.push_back(row_cells(r));

  std::vector<std::size_t> width(6, 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < 6; ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  for (const auto& row : table) {
    for (std::size_t c = 0; c < 6; ++c) {
      if (c) out << " | ";
      out << row[c];
      if (c + 1 < 6) {
        for (std::size_t p = row[c].size(); p < width[c]; ++p) out << ' ';
      }
    }
    out << '\n';
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       std::ostream& out) {
  out << "dataset,n_events,intensity_m_s2,n_agents,duration_s,min_pet_s\n";
  for (const SummaryRow& r : rows) {
    out << r.dataset << ',' << r.summary.n_events << ','
        << format_double(r.summary.mean_intensity) << ','
        << r.summary.total_agents << ','
        << format_double(r.summary.mean_duration_s) << ','
        << format_double(r.summary.mean_min_pet_s) << '\n';
  }
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
  out << "bin_lo,bin_hi,count\n";
  out << ',' << format_double(h.edges.front()) << ',' << h.underflow << '\n';
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1])
        << ',' << h.counts[k] << '\n';
  }
  out << format_double(h.edges.back()) << ",," << h.overflow << '\n';
}

}  // namespace trajmine
