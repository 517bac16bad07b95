#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transdyn/base_location.hpp"
#include "transdyn/discovery.hpp"
#include "transdyn/event.hpp"
#include "transdyn/grid.hpp"
#include "transdyn/model.hpp"

namespace transdyn {

struct PipelineConfig {
  ModelParams params{};
  double cell_size = 0.05;
  HourWindow night_window{};
  std::uint64_t min_unique_visitors = 3;
  double absent_threshold = 0.0;
  /// 0 picks TRANSIENT_DYN_THREADS or hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

/// Headline numbers shared by the model run and the brute-force oracle.
struct RunSummary {
  PopulationSummary population;
  double W = 0.0;
  std::int64_t theta_seconds = 0;
  double beta = 1.0;
  /// Locations with Q > 0.
  std::map<std::string, std::uint64_t> Q;
  /// Every observed person.
  std::map<std::string, double> M;
};

std::string summary_to_json(const RunSummary& summary);
RunSummary summary_from_json(const std::string& text);

struct PipelineResult {
  EventBatch batch;
  /// Parameters after the observation window is resolved against the data.
  ModelParams effective_params;
  std::map<std::string, BaseAssignment> bases;
  /// Sorted by person_id.
  std::vector<PersonProfile> profiles;
  /// Suppressed edges, person-major and time-ordered.
  std::vector<MovementEdge> edges;
  LocationStatsMap stats;
  std::vector<LocationStats> locations;
  std::vector<CategoryRank> categories;
  Grid grid;
  std::vector<CellDiff> grid_diff;
  double W = 0.0;
  DurationSummary duration;
  PopulationSummary population;

  RunSummary summary() const;
};

/// Fills an unbounded observation window from the batch's first and last
/// timestamps.
ObservationWindow resolve_window(const ObservationWindow& window, const EventBatch& batch);

/// Runs bases -> model -> discovery -> grid on an already canonical batch.
PipelineResult run_pipeline(EventBatch canonical, const PipelineConfig& config,
                            const BaseMap& base_overrides = {},
                            const std::optional<CensusBaseline>& census = std::nullopt);

/// CSV `user,base,raw_edges,suppressed_edges,M,is_transient`.
void write_profiles_csv(std::ostream& out, std::span<const PersonProfile> profiles);
/// CSV `location,Q,unique_visitors,category`.
void write_location_stats_csv(std::ostream& out, const LocationStatsMap& stats);

}  // namespace transdyn
