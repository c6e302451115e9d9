#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "trajmine/events.hpp"

namespace trajmine {

/// Regular half-open bins [lo + k*width, lo + (k+1)*width) covering
/// [lo, hi); values outside land in the underflow/overflow counters.
struct BinEdges {
  double lo = 0.0;
  double hi = 6.0;
  double width = 0.25;
};

struct BinSpec {
  BinEdges duration;   // seconds
  BinEdges intensity;  // m/s^2, over intensity_mean
  BinEdges pet;        // seconds
  std::size_t participants_lo = 2;   // one integer bin per agent count
  std::size_t participants_hi = 10;  // inclusive
};

struct Histogram {
  std::vector<double> edges;        // ascending, bin k = [edges[k], edges[k+1])
  std::vector<std::size_t> counts;  // size edges.size() - 1
  std::size_t underflow = 0;        // below edges.front()
  std::size_t overflow = 0;         // at or above edges.back()

  std::size_t total() const;
};

/// Catalog aggregates. Means are plain arithmetic means over events;
/// mean_intensity averages the per-event intensity_mean; mean_min_pet_s
/// averages only events carrying a PET. Histogram totals equal n_events
/// (the PET histogram: n_events - missing_pet).
struct CatalogSummary {
  std::size_t n_events = 0;
  double mean_intensity = 0.0;
  std::size_t total_agents = 0;
  double mean_duration_s = 0.0;
  double mean_min_pet_s = 0.0;
  std::size_t missing_pet = 0;
  Histogram duration;
  Histogram intensity;
  Histogram pet;
  Histogram participants;
};

/// Permutation-invariant aggregation; empty catalogs yield zeros and empty
/// histograms (bin layout still present).
CatalogSummary summarize(const std::vector<Event>& catalog,
                         const BinSpec& bins = {});

/// Fraction of scenes containing at least one two-agent event, and at
/// least one multi-agent (>= 3 agents) event. Throws ZeroScenes when
/// scene_count is zero, ContractViolation when scene_count is smaller than
/// the number of distinct scenes in the catalog.
std::pair<double, double> proportions(const std::vector<Event>& catalog,
                                      std::size_t scene_count);

/// One summary-table row; `dataset` labels where the events came from.
struct SummaryRow {
  std::string dataset;
  CatalogSummary summary;
};

/// Groups by dataset_tag (empty tag shown as "-"), one row per tag sorted
/// lexicographically, plus an "all" row when more than one tag occurs.
std::vector<SummaryRow> summarize_by_dataset(const std::vector<Event>& catalog,
                                             const BinSpec& bins = {});

/// Five value columns per dataset row: event count, intensity, agent
/// count, duration, minimum PET.
void write_summary_text(const std::vector<SummaryRow>& rows,
                        std::ostream& out);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

/// Plot-ready rows bin_lo,bin_hi,count; the underflow row has an empty
/// bin_lo and the overflow row an empty bin_hi.
void write_histogram_csv(const Histogram& h, std::ostream& out);

}  // namespace trajmine
