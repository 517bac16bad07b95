#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transdyn/time.hpp"

namespace transdyn {

struct VenueCategory {
  std::string name;
  std::uint32_t n_venues = 0;
  /// Relative weight when a transient picks a category for a free stop.
  double weight = 1.0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_persons = 200;
  double transient_fraction = 0.3;
  std::vector<VenueCategory> categories = {
      {"Restaurant", 4, 0.5}, {"MarketPlace", 3, 0.3}, {"Pub", 3, 0.2}};
  /// Venues visited by a single person each; never transient locations.
  std::uint32_t n_minor_venues = 3;
  /// Every category venue is visited by at least this many distinct persons.
  std::uint32_t attraction_min_visitors = 3;
  std::uint32_t days = 7;
  Timestamp start = Timestamp{Seconds{1456790400}};  // 2016-03-01T00:00:00Z
  /// Chance that a transient goes out on a given day.
  double visit_probability = 0.6;
  /// Stops per outing, 1..3.
  std::uint32_t max_stops = 2;
  /// Chance that a venue stop carries one injected A->B->A oscillation.
  double pingpong_injection_rate = 0.0;
  /// Chance per person-day of one stray venue-less sighting.
  double noise = 0.0;
  double city_lat = -33.87;
  double city_lon = 151.21;
  double city_radius = 0.08;
  /// Fraction of category venues placed in uninhabited outback cells.
  double outback_fraction = 0.0;
  double cell_size = 0.05;
  double census_per_home = 100.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct SynthOutput {
  /// Events in the ingest JSONL schema.
  std::string events_jsonl;
  /// Ground-truth JSON document.
  std::string ground_truth_json;
  /// Census baseline CSV on the config's cell grid.
  std::string census_csv;
};

/// Deterministic in (config, seed).
SynthOutput generate(const SynthConfig& config);

/// Builds a config from a JSON object; unknown keys are a ConfigError.
SynthConfig synth_config_from_json(const std::string& text);
std::string synth_config_to_json(const SynthConfig& config);

}  // namespace transdyn
