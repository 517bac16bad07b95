#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "transdyn/base_location.hpp"
#include "transdyn/event.hpp"

namespace transdyn {

/// A directed transition from_location -> to_location by one person.
struct MovementEdge {
  std::string person_id;
  std::string from_location;
  std::string to_location;
  /// Last sighting at from_location.
  Timestamp depart_ts{};
  /// First sighting at to_location.
  Timestamp arrive_ts{};
  /// Positions of those sightings within the person's event sequence.
  std::size_t depart_index = 0;
  std::size_t arrive_index = 0;
  double arrive_lat = 0.0;
  double arrive_lon = 0.0;
  friend bool operator==(const MovementEdge&, const MovementEdge&) = default;
};

struct ModelParams {
  /// Multiplicative ping-pong damping constant, 0 < beta <= 1.
  double beta = 1.0;
  /// Reversal pairs spanning at most this long are dropped. 0 disables.
  Seconds pingpong_window{15 * 60};
  /// Upper bound on any single dwell interval.
  Seconds max_dwell_cap{12 * 3600};
  ObservationWindow observation_window{};

  /// Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Uncapped cap for tests and the synthetic ground-truth path.
inline constexpr Seconds unbounded_dwell = Seconds::max();

struct DwellInterval {
  std::string location_id;
  Timestamp start{};
  /// Next sighting elsewhere, or the observation end for a trailing interval.
  Timestamp end{};
  bool trailing = false;
  friend bool operator==(const DwellInterval&, const DwellInterval&) = default;
};

struct PersonProfile {
  std::string person_id;
  std::string base_location;
  std::size_t raw_edge_count = 0;
  std::size_t suppressed_edge_count = 0;
  double movement_profile_M = 0.0;
  bool is_transient = false;
  std::vector<DwellInterval> dwell_intervals;
  /// Parameters the profile was computed with.
  double beta = 1.0;
  Seconds pingpong_window{0};
};

/// Per-event transient flags for one person.
struct TransientFlags {
  std::vector<bool> per_event;
  bool person = false;
};

struct LocationStats {
  std::string location_id;
  /// Arrivals from persons not based here.
  std::uint64_t Q = 0;
  std::uint64_t unique_visitors = 0;
  /// All arrivals, before base exclusion.
  std::uint64_t inbound_edges = 0;
  std::uint64_t resident_count = 0;
  std::string category;
  bool is_transient_location = false;
  double mean_lat = 0.0;
  double mean_lon = 0.0;
};

using LocationStatsMap = std::map<std::string, LocationStats, std::less<>>;

struct DurationSummary {
  Seconds total{0};
  std::map<std::string, Seconds> per_person;
};

struct PopulationSummary {
  std::uint64_t N = 0;
  std::uint64_t eta = 0;
  std::uint64_t gamma = 0;
  friend bool operator==(const PopulationSummary&, const PopulationSummary&) = default;
};

/// One edge per consecutive pair of sightings at distinct locations.
std::vector<MovementEdge> movement_edges(PersonEvents events);

/// Left-to-right removal of adjacent reversal pairs (A->B, B->A) whose span
/// from the first departure to the second arrival is within `window`. A
/// removed pair never exposes its neighbours as a new pair.
std::vector<MovementEdge> suppress_ping_pong(std::span<const MovementEdge> edges, Seconds window);

/// T = 1 on both endpoints of every (suppressed) movement and on every
/// sighting away from `base`; the person flag is their OR.
TransientFlags classify_transient(PersonEvents events, std::string_view base,
                                  Seconds pingpong_window = Seconds{0});

/// beta * |edges|.
double movement_profile(std::span<const MovementEdge> suppressed, const ModelParams& params);

/// Non-base dwell intervals: from arrival at a location to the next sighting
/// elsewhere, with a trailing interval closed at `observation_end`.
std::vector<DwellInterval> dwell_intervals(PersonEvents events, std::string_view base,
                                           Timestamp observation_end);

/// Builds the profile; appends the person's suppressed edges to `edges_out`
/// when given.
PersonProfile build_profile(PersonEvents events, std::string_view base,
                            const ModelParams& params,
                            std::vector<MovementEdge>* edges_out = nullptr);

/// W = beta * total suppressed edges. Throws DataError("inconsistent params")
/// when profiles disagree on beta or the ping-pong window.
double cumulative_estimate(std::span<const PersonProfile> profiles);

/// Q, unique visitors and raw inbound counts per destination. Arrivals at the
/// arriving person's own base do not count towards Q.
LocationStatsMap location_agglomeration(std::span<const MovementEdge> edges, const BaseMap& bases);

/// Sum over persons and their non-base dwell intervals of
/// min(end - start, max_dwell_cap).
DurationSummary transient_duration(std::span<const PersonProfile> profiles,
                                   const ModelParams& params);

/// N persons, eta transient persons, gamma distinct locations in the batch.
PopulationSummary summarize_population(std::span<const PersonProfile> profiles,
                                       const EventBatch& batch);

}  // namespace transdyn
